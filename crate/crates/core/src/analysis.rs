//! Closed-form performance laws.
//!
//! Ergodic rates use the Jensen form `log2(1 + E[|h|^2] snr)`: the in-band
//! law from the moments of the co-phased channel, the OOB law as a Binomial
//! mixture over the number of IRSs whose beam happens to hit one of the OOB
//! user's cascaded paths. The outage law factors the OOB user's outage event
//! over the IRSs and needs one semi-infinite integral per evaluation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, QuadSettings};
use crate::scenario::LinkBetas;

const PI2_OVER_16: f64 = PI * PI / 16.0;

/// `pi^{3/2} / 4`.
fn pi_three_halves_over_4() -> f64 {
    PI.powf(1.5) / 4.0
}

/// How the per-IRS alignment probability is modelled in the OOB mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlignmentModel {
    /// `min(L, M) / M`, the flat-top beam approximation.
    PathRatio,
    /// `1 - (1 - 1/M)^L`, exact for `L` i.i.d. uniform grid angles.
    GridExact,
}

impl AlignmentModel {
    pub fn probability(self, m: usize, l: usize) -> f64 {
        let (m, l) = (m as f64, l as f64);
        match self {
            AlignmentModel::PathRatio => l.min(m) / m,
            AlignmentModel::GridExact => 1.0 - (1.0 - 1.0 / m).powf(l),
        }
    }
}

/// Inputs of the per-user rate laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateLawParams {
    pub n_total: usize,
    pub s: usize,
    pub m: usize,
    pub l: usize,
    pub beta_r: f64,
    pub beta_d: f64,
    pub snr: f64,
}

impl RateLawParams {
    pub fn new(s: usize, m: usize, l: usize, links: &LinkBetas, snr: f64) -> Result<Self> {
        if s == 0 || m == 0 || l == 0 {
            return Err(Error::Domain(format!("S, M, L must be positive (got {s}, {m}, {l})")));
        }
        let beta_r = links.beta_r();
        for (name, v) in [("beta_r", beta_r), ("beta_d", links.beta_d), ("snr", snr)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(RateLawParams {
            n_total: s * m,
            s,
            m,
            l,
            beta_r,
            beta_d: links.beta_d,
            snr,
        })
    }

    /// `eta = M / N = 1 / S`.
    pub fn eta(&self) -> f64 {
        self.m as f64 / self.n_total as f64
    }
}

/// Mean in-band gain under optimal phases:
/// `N^2 (pi^2/16 + eta (1 - pi^2/16)) beta_r + N pi^{3/2}/4 sqrt(beta_d beta_r) + beta_d`.
pub fn inband_mean_gain(p: &RateLawParams) -> f64 {
    let n = p.n_total as f64;
    n * n * (PI2_OVER_16 + p.eta() * (1.0 - PI2_OVER_16)) * p.beta_r
        + n * pi_three_halves_over_4() * (p.beta_d * p.beta_r).sqrt()
        + p.beta_d
}

/// Ergodic SE (bps/Hz) of one in-band user.
pub fn se_inband(p: &RateLawParams) -> f64 {
    (inband_mean_gain(p) * p.snr).ln_1p() / std::f64::consts::LN_2
}

/// Mean OOB gain given that `aligned` IRSs hit one of the user's paths.
pub fn oob_conditional_gain(aligned: usize, m: usize, l: usize, beta_r: f64, beta_d: f64) -> f64 {
    aligned as f64 * (m * m) as f64 / l as f64 * beta_r + beta_d
}

/// Ergodic SE (bps/Hz) of one OOB user.
///
/// For `L < M` a Binomial(S, p) mixture of conditional rates with `p` from
/// `model`; for `L >= M` every IRS contributes and the mean gain is
/// `beta_d + N beta_r`.
pub fn se_oob(p: &RateLawParams, model: AlignmentModel) -> f64 {
    let log2_1p = |g: f64| (g * p.snr).ln_1p() / std::f64::consts::LN_2;
    if p.l >= p.m {
        return log2_1p(p.beta_d + p.n_total as f64 * p.beta_r);
    }
    let prob = model.probability(p.m, p.l);
    (0..=p.s)
        .map(|k| {
            let w = binomial_pmf(p.s, prob, k).expect("probability in [0, 1]");
            w * log2_1p(oob_conditional_gain(k, p.m, p.l, p.beta_r, p.beta_d))
        })
        .sum()
}

fn mean_over<F: Fn(&LinkBetas) -> Result<f64>>(links: &[LinkBetas], f: F) -> Result<f64> {
    if links.is_empty() {
        return Err(Error::Domain("at least one user required".into()));
    }
    let mut total = 0.0;
    for l in links {
        total += f(l)?;
    }
    Ok(total / links.len() as f64)
}

/// In-band sum-SE under round-robin: the per-user law averaged over users.
pub fn sum_se_inband(s: usize, m: usize, snr: f64, links: &[LinkBetas]) -> Result<f64> {
    mean_over(links, |b| Ok(se_inband(&RateLawParams::new(s, m, 1, b, snr)?)))
}

/// OOB sum-SE under round-robin.
pub fn sum_se_oob(
    s: usize,
    m: usize,
    l: usize,
    snr: f64,
    links: &[LinkBetas],
    model: AlignmentModel,
) -> Result<f64> {
    mean_over(links, |b| Ok(se_oob(&RateLawParams::new(s, m, l, b, snr)?, model)))
}

/// OOB sum-SE without any IRS.
pub fn sum_se_direct_only(snr: f64, links: &[LinkBetas]) -> Result<f64> {
    mean_over(links, |b| Ok((b.beta_d * snr).ln_1p() / std::f64::consts::LN_2))
}

/// Binomial probability mass `C(n, k) p^k (1-p)^(n-k)`.
pub fn binomial_pmf(n: usize, p: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    if k > n {
        return Err(Error::Domain(format!("count {k} exceeds trials {n}")));
    }
    if p == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    let k_small = k.min(n - k);
    if n <= 50 {
        // C(50, 25) < 2^53, so the coefficient is exact.
        let mut coeff = 1.0f64;
        for i in 0..k_small {
            coeff = coeff * (n - i) as f64 / (i + 1) as f64;
        }
        let coeff = coeff.round();
        return Ok(coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
    }
    let ln_coeff: f64 = (0..k_small)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum();
    Ok((ln_coeff + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp())
}

fn quad_settings() -> QuadSettings {
    QuadSettings {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// `I0(x; c1, c2) = int_{c1}^inf exp(-(x/t + t/c2)) dt`.
pub fn i0_integral(x: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(c1 > 0.0 && c2 > 0.0 && x >= 0.0) || !(x.is_finite() && c1.is_finite() && c2.is_finite()) {
        return Err(Error::Domain(format!(
            "I0 needs x >= 0, c1 > 0, c2 > 0 (got {x}, {c1}, {c2})"
        )));
    }
    let r = integrate_to_infinity(|t| (-(x / t + t / c2)).exp(), c1, c2, quad_settings())?;
    Ok(r.value)
}

/// `e^{c1/c2} I0(x; c1, c2) / c2`, evaluated without forming the two
/// factors separately. It is `Pr(|h_d + g|^2 > x)` when `h_d ~ CN(0, c1)` and
/// `g` is a product of complex normals with `E|g|^2 = c2`.
fn shifted_i0(x: f64, c1: f64, c2: f64) -> Result<f64> {
    let r = integrate_to_infinity(|t| (-(x / t + (t - c1) / c2)).exp() / c2, c1, c2, quad_settings())?;
    Ok(r.value)
}

/// Per-IRS outage factor `P0` of the OOB outage law.
pub fn outage_p0(rho: f64, m: usize, l: usize, beta_d: f64, beta_r: f64) -> Result<f64> {
    if !(rho >= 0.0) || m == 0 || l == 0 || !(beta_d > 0.0) || !(beta_r > 0.0) {
        return Err(Error::Domain(format!(
            "outage law needs rho >= 0 and positive M, L, betas (got {rho}, {m}, {l}, {beta_d}, {beta_r})"
        )));
    }
    let l_bar = l.min(m) as f64;
    let m_f = m as f64;
    let direct_survives = (-rho / beta_d).exp();
    let c2 = m_f * m_f / l_bar * beta_r;
    let aligned_survives = shifted_i0(rho, beta_d, c2)?;
    let p0 = 1.0 - l_bar / m_f * (aligned_survives - direct_survives) - direct_survives;
    if !(-1e-9..=1.0 + 1e-12).contains(&p0) {
        return Err(Error::Numerical(format!("P0 = {p0} outside [0, 1]")));
    }
    Ok(p0.clamp(0.0, 1.0))
}

/// OOB outage probability `(1 - e^{-rho/beta_d}) P0^S`.
pub fn outage_closed_form(rho: f64, s: usize, m: usize, l: usize, beta_d: f64, beta_r: f64) -> Result<f64> {
    let p0 = outage_p0(rho, m, l, beta_d, beta_r)?;
    Ok(-(-rho / beta_d).exp_m1() * p0.powi(s as i32))
}

/// Element/IRS split that gives the OOB user full log-linear scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignRule {
    /// `min(1, log_N L)`.
    pub delta_star: f64,
    /// Largest divisor of `N` not above `N^delta_star`.
    pub m_star: usize,
    /// `N / m_star`; never below `ceil(N^(1 - delta_star))`.
    pub s_star: usize,
}

pub fn design_rule(n_total: usize, l: usize) -> Result<DesignRule> {
    if n_total == 0 || l == 0 {
        return Err(Error::Domain(format!("N and L must be positive (got {n_total}, {l})")));
    }
    if n_total == 1 {
        return Ok(DesignRule { delta_star: 1.0, m_star: 1, s_star: 1 });
    }
    let n = n_total as f64;
    let delta_star = ((l as f64).ln() / n.ln()).min(1.0);
    let bound = n.powf(delta_star);
    // Snap values like 128^(1/7) = 1.9999999999999998 to the integer.
    let bound = if (bound - bound.round()).abs() < 1e-9 * bound { bound.round() } else { bound };
    let m_star = (1..=n_total)
        .rev()
        .find(|&m| n_total % m == 0 && m as f64 <= bound)
        .unwrap_or(1);
    Ok(DesignRule {
        delta_star,
        m_star,
        s_star: n_total / m_star,
    })
}

/// Smallest IRS count `ceil(N^(1 - delta_star))` from the design inequality.
pub fn min_irs_count(rule: &DesignRule, n_total: usize) -> usize {
    let x = (n_total as f64).powf(1.0 - rule.delta_star);
    (x - 1e-9 * x).ceil() as usize
}

/// `tau = SE / log2(N)`.
pub fn prelog_factor(sum_se: f64, n_total: usize) -> Result<f64> {
    if n_total < 2 {
        return Err(Error::Domain(format!("pre-log factor needs N >= 2, got {n_total}")));
    }
    Ok(sum_se / (n_total as f64).log2())
}

/// Closed forms of the three terms of the co-phased in-band gain:
/// `E|h_d|^2`, `E[M^2 (sum|gamma|)^2]`, `E[2 M |h_d| sum|gamma|]`.
pub fn inband_term_moments(s: usize, m: usize, beta_d: f64, beta_r: f64) -> [f64; 3] {
    let (s, m) = (s as f64, m as f64);
    [
        beta_d,
        m * m * beta_r * (s * s * PI2_OVER_16 + s * (1.0 - PI2_OVER_16)),
        m * s * pi_three_halves_over_4() * (beta_r * beta_d).sqrt(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit(s: usize, m: usize, l: usize, snr: f64) -> RateLawParams {
        RateLawParams::new(s, m, l, &LinkBetas::UNIT, snr).unwrap()
    }

    #[test]
    fn zero_snr_gives_zero_rate() {
        assert_eq!(se_inband(&unit(4, 16, 1, 0.0)), 0.0);
        assert_eq!(se_oob(&unit(4, 16, 2, 0.0), AlignmentModel::PathRatio), 0.0);
    }

    #[test]
    fn single_irs_collapses_split() {
        let p = unit(1, 64, 1, 1.0);
        let n = 64.0;
        let expected = n * n + n * PI.powf(1.5) / 4.0 + 1.0;
        assert_relative_eq!(inband_mean_gain(&p), expected, max_relative = 1e-14);
    }

    #[test]
    fn inband_hand_value() {
        // N = 64, S = 4 (eta = 1/4), unit betas and snr:
        // 4096 * (0.6168502751 + 0.25 * 0.3831497249) + 64 * 1.3920819992 + 1
        let p = unit(4, 16, 1, 1.0);
        assert_relative_eq!(inband_mean_gain(&p), 3009.0572929584637, max_relative = 1e-12);
        assert_relative_eq!(se_inband(&p), 11.555575231939562, max_relative = 1e-12);
    }

    #[test]
    fn oob_saturated_branch() {
        let p = unit(256, 2, 2, 1.0);
        assert_eq!(p.n_total, 512);
        assert_relative_eq!(se_oob(&p, AlignmentModel::PathRatio), 514f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(514f64.log2(), 9.0056245, max_relative = 1e-7);
    }

    #[test]
    fn oob_without_alignment_is_direct_only() {
        // One IRS that almost never aligns: the direct term dominates.
        let m = 1usize << 20;
        let p = unit(1, m, 1, 3.0);
        let q = 1.0 / m as f64;
        let expect = (1.0 - q) * 2.0 + q * (1.0 + 3.0 * ((m * m) as f64 + 1.0)).log2();
        assert_relative_eq!(se_oob(&p, AlignmentModel::PathRatio), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 2.0, max_relative = 1e-4);
    }

    #[test]
    fn branches_agree_at_boundary() {
        // At L = M the ratio model gives p = 1, and S M^2 / L = N.
        let (s, m) = (8, 16);
        let mixture_at_p1: f64 = (1.0 + oob_conditional_gain(s, m, m, 1.0, 1.0)).log2();
        let branch = se_oob(&unit(s, m, m, 1.0), AlignmentModel::PathRatio);
        assert_relative_eq!(mixture_at_p1, branch, max_relative = 1e-14);
    }

    #[test]
    fn alignment_probabilities() {
        assert_relative_eq!(AlignmentModel::GridExact.probability(64, 2), 1.0 - (63.0f64 / 64.0).powi(2));
        assert_relative_eq!(AlignmentModel::GridExact.probability(64, 2), 0.031005859375, epsilon = 1e-15);
        assert_eq!(AlignmentModel::PathRatio.probability(64, 2), 0.03125);
        assert_eq!(AlignmentModel::PathRatio.probability(4, 9), 1.0);
        assert_eq!(AlignmentModel::GridExact.probability(1, 3), 1.0);
    }

    #[test]
    fn binomial_values() {
        assert_relative_eq!(binomial_pmf(4, 0.5, 2).unwrap(), 0.375, epsilon = 1e-15);
        assert_eq!(binomial_pmf(7, 0.0, 0).unwrap(), 1.0);
        assert_eq!(binomial_pmf(7, 1.0, 7).unwrap(), 1.0);
        assert!(binomial_pmf(4, 1.5, 2).is_err());
        assert!(binomial_pmf(4, 0.5, 5).is_err());
        for n in [1usize, 8, 50, 51, 300] {
            let total: f64 = (0..=n).map(|k| binomial_pmf(n, 0.37, k).unwrap()).sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    /// Exact rational evaluation with integer arithmetic for p = a / b.
    fn binomial_exact(n: u32, a: u128, b: u128, k: u32) -> f64 {
        let mut coeff: u128 = 1;
        for i in 0..k {
            coeff = coeff * u128::from(n - i) / u128::from(i + 1);
        }
        let num = coeff * a.pow(k) * (b - a).pow(n - k);
        let den = b.pow(n);
        num as f64 / den as f64
    }

    #[test]
    fn binomial_matches_rational_arithmetic() {
        for n in 1..=20u32 {
            for k in 0..=n {
                let exact = binomial_exact(n, 3, 8, k);
                let got = binomial_pmf(n as usize, 3.0 / 8.0, k as usize).unwrap();
                assert!((got - exact).abs() <= 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn log_space_matches_direct() {
        // n = 50 uses the product path, compare it against the log path by
        // evaluating the log path formula by hand.
        let (n, p) = (50usize, 0.2f64);
        for k in [0usize, 10, 25, 50] {
            let ln_c: f64 = (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum();
            let log_path = (ln_c + k as f64 * p.ln() + (n - k) as f64 * (1.0f64 - p).ln()).exp();
            assert_relative_eq!(binomial_pmf(n, p, k).unwrap(), log_path, max_relative = 1e-11);
        }
    }

    #[test]
    fn i0_at_zero_threshold() {
        for (c1, c2) in [(0.1f64, 0.1f64), (1.0, 1.0), (10.0, 0.1), (0.1, 10.0), (3.0, 1e4)] {
            let exact = c2 * (-c1 / c2).exp();
            assert_relative_eq!(i0_integral(0.0, c1, c2).unwrap(), exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn i0_decreasing_in_threshold() {
        let mut prev = f64::INFINITY;
        for x in [0.0, 0.01, 0.1, 0.5, 1.0, 5.0, 20.0] {
            let v = i0_integral(x, 1.0, 2.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(i0_integral(-1.0, 1.0, 1.0).is_err());
        assert!(i0_integral(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn outage_at_zero_threshold() {
        assert_eq!(outage_closed_form(0.0, 4, 128, 3, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn outage_log_affine_in_s() {
        let p0 = outage_p0(0.5, 128, 23, 1.0, 1.0).unwrap();
        let base = outage_closed_form(0.5, 1, 128, 23, 1.0, 1.0).unwrap().ln();
        for s in 1..=16 {
            let v = outage_closed_form(0.5, s, 128, 23, 1.0, 1.0).unwrap().ln();
            assert_relative_eq!(v - base, (s - 1) as f64 * p0.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn p0_reduces_to_direct_outage_without_alignment() {
        // A single path on a huge array almost never aligns.
        let p0 = outage_p0(0.5, 1 << 20, 1, 1.0, 1.0).unwrap();
        assert_relative_eq!(p0, 1.0 - (-0.5f64).exp(), max_relative = 1e-5);
    }

    #[test]
    fn design_rule_examples() {
        let r = design_rule(128, 2).unwrap();
        assert_relative_eq!(r.delta_star, 1.0 / 7.0, max_relative = 1e-14);
        assert_eq!((r.m_star, r.s_star), (2, 64));
        assert_eq!(min_irs_count(&r, 128), 64);
        let r = design_rule(64, 200).unwrap();
        assert_eq!((r.delta_star, r.m_star, r.s_star), (1.0, 64, 1));
        let r = design_rule(256, 1).unwrap();
        assert_eq!((r.delta_star, r.m_star, r.s_star), (0.0, 1, 256));
        let r = design_rule(1024, 32).unwrap();
        assert_relative_eq!(r.delta_star, 0.5, max_relative = 1e-14);
        assert_eq!((r.m_star, r.s_star), (32, 32));
        let r = design_rule(1, 5).unwrap();
        assert_eq!((r.m_star, r.s_star), (1, 1));
        assert!(design_rule(0, 2).is_err());
    }

    #[test]
    fn design_rule_non_power_of_two() {
        // N^delta = 3 is not a divisor of 100; round down to 2.
        let r = design_rule(100, 3).unwrap();
        assert_eq!(r.m_star, 2);
        assert_eq!(r.s_star, 50);
        assert!(r.s_star >= min_irs_count(&r, 100));
    }

    #[test]
    fn prelog_examples() {
        assert_relative_eq!(prelog_factor(2.0 * 10.0, 1024).unwrap(), 2.0);
        assert!(prelog_factor(1.0, 1).is_err());
        // A fixed SE has a vanishing pre-log as N grows.
        let fixed = 2.0;
        assert!(prelog_factor(fixed, 1 << 20).unwrap() < prelog_factor(fixed, 1 << 4).unwrap() / 4.0);
    }

    #[test]
    fn prelog_at_design_point_tends_to_one() {
        // Saturated branch: tau = log2(N + 2) / log2(N), decreasing to 1.
        let mut prev = f64::INFINITY;
        for k in [8u32, 12, 16, 20] {
            let n = 1usize << k;
            let rule = design_rule(n, 2).unwrap();
            let se = sum_se_oob(rule.s_star, rule.m_star, 2, 1.0, &[LinkBetas::UNIT], AlignmentModel::PathRatio).unwrap();
            let tau = prelog_factor(se, n).unwrap();
            assert!(tau < prev && tau > 1.0 && tau < 1.01);
            prev = tau;
        }
    }

    #[test]
    fn term_moments_single_element() {
        let t = inband_term_moments(1, 1, 0.0, 1.0);
        assert_relative_eq!(t[1], 1.0, epsilon = 1e-15);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[2], 0.0);
        // The three terms rebuild the mean gain.
        let p = unit(4, 8, 1, 1.0);
        let t = inband_term_moments(4, 8, 1.0, 1.0);
        assert_relative_eq!(t.iter().sum::<f64>(), inband_mean_gain(&p), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn oob_rate_monotone(
            s in 1usize..12, m_exp in 1u32..7, l in 1usize..8, beta_r in 0.01f64..10.0, snr in 0.01f64..100.0,
        ) {
            let m = 1usize << m_exp;
            let links = LinkBetas { beta_d: 1.0, beta_f: 1.0, beta_g: beta_r };
            for model in [AlignmentModel::PathRatio, AlignmentModel::GridExact] {
                let base = se_oob(&RateLawParams::new(s, m, l, &links, snr).unwrap(), model);
                let more_s = se_oob(&RateLawParams::new(s + 1, m, l, &links, snr).unwrap(), model);
                let more_l = se_oob(&RateLawParams::new(s, m, l + 1, &links, snr).unwrap(), model);
                let more_snr = se_oob(&RateLawParams::new(s, m, l, &links, snr * 1.5).unwrap(), model);
                let more_beta = LinkBetas { beta_g: beta_r * 1.5, ..links };
                let more_b = se_oob(&RateLawParams::new(s, m, l, &more_beta, snr).unwrap(), model);
                let tol = 1e-12 * base.max(1.0);
                prop_assert!(more_s >= base - tol);
                prop_assert!(more_snr >= base - tol);
                prop_assert!(more_b >= base - tol);
                if model == AlignmentModel::PathRatio {
                    prop_assert!(more_l >= base - tol);
                }
                // Saturated branch dominates at equal N.
                let saturated = se_oob(&RateLawParams::new(s, m, m, &links, snr).unwrap(), model);
                prop_assert!(saturated >= base - tol);
            }
        }

        #[test]
        fn outage_in_unit_interval_and_decreasing(
            rho in 0.01f64..3.0, m_exp in 1u32..9, l in 1usize..30, s in 1usize..20, beta_r in 0.1f64..10.0,
        ) {
            let m = 1usize << m_exp;
            let p = outage_closed_form(rho, s, m, l, 1.0, beta_r).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(outage_closed_form(rho, s + 1, m, l, 1.0, beta_r).unwrap() <= p);
            prop_assert!(outage_closed_form(rho, s, m, l, 1.0, beta_r * 2.0).unwrap() <= p * (1.0 + 1e-9));
        }
    }
}
