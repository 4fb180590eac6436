//! Fast self-checks run by the `validate` command.
//!
//! Each check compares an implementation against an independent oracle and
//! reports the measured discrepancy next to its tolerance. All tolerances are
//! multiplied by a caller-supplied scale, so a scale of zero forces failure.

use serde::Serialize;

use crate::analysis::{binomial_pmf, i0_integral};
use crate::channel::AngleBook;
use crate::error::Result;
use crate::montecarlo::Engine;
use crate::scenario::ScenarioConfig;

const ORTHOGONALITY_TOL: f64 = 1e-12;
const BINOMIAL_TV_TOL: f64 = 0.02;
const I0_REL_TOL: f64 = 1e-6;
const IDENTITY_REL_TOL: f64 = 1e-9;

const ALIGNMENT_TRIALS: u64 = 20_000;
const IDENTITY_SLOTS: u64 = 2_000;
const ORACLE_POINTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(name: &'static str, measured: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name,
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }
}

/// Largest `|<a(u), a(v)> - [u == v]|` over all grid pairs.
pub fn orthogonality_error(m: usize) -> Result<f64> {
    let book = AngleBook::new(m)?;
    let responses = (0..m)
        .map(|i| book.response(book.entry(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (i, a) in responses.iter().enumerate() {
        for (j, b) in responses.iter().enumerate() {
            let inner: num_complex::Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).norm());
        }
    }
    Ok(worst)
}

/// Trapezoid rule for `I0` on `[c1, c1 + 60 c2]` with Kahan summation.
/// The dropped tail is below `c2 e^{-60}`.
pub fn i0_brute_force(x: f64, c1: f64, c2: f64, points: usize) -> f64 {
    let f = |t: f64| (-(x / t + t / c2)).exp();
    let (a, b) = (c1, c1 + 60.0 * c2);
    let h = (b - a) / (points - 1) as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    let mut comp = 0.0;
    for i in 1..points - 1 {
        let y = f(a + i as f64 * h) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * h
}

/// Runs every check against the scenario's array size and path count.
pub fn run_fast_checks(cfg: &ScenarioConfig, tol_scale: f64, engine: &Engine) -> Result<Vec<CheckOutcome>> {
    cfg.validate()?;
    let mut out = Vec::new();

    let mut ortho = 0.0f64;
    for m in [1, 2, 7, cfg.elements_per_irs] {
        ortho = ortho.max(orthogonality_error(m)?);
    }
    out.push(CheckOutcome::new("orthogonality", ortho, ORTHOGONALITY_TOL * tol_scale));

    let hist = engine.run_alignment(cfg, ALIGNMENT_TRIALS)?;
    let mut tv = 0.0;
    for (b, f) in hist.frequencies().iter().enumerate() {
        tv += 0.5 * (f - binomial_pmf(cfg.num_irs, hist.p_exact, b)?).abs();
    }
    out.push(CheckOutcome::new("binomial_fit", tv, BINOMIAL_TV_TOL * tol_scale));

    let mut i0 = 0.0f64;
    for (x, c1, c2) in [(0.1, 1.0, 1.0), (1.0, 0.1, 10.0), (10.0, 10.0, 0.1)] {
        let oracle = i0_brute_force(x, c1, c2, ORACLE_POINTS);
        i0 = i0.max((i0_integral(x, c1, c2)? - oracle).abs() / oracle);
    }
    out.push(CheckOutcome::new("i0_oracle", i0, I0_REL_TOL * tol_scale));

    let identity = engine.run_inband_identity(cfg, IDENTITY_SLOTS)?;
    out.push(CheckOutcome::new(
        "optimal_gain_identity",
        identity.max_rel_error,
        IDENTITY_REL_TOL * tol_scale,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_closed_case() {
        // x = 0 reduces to c2 e^{-c1/c2}.
        let v = i0_brute_force(0.0, 1.0, 2.0, 100_001);
        assert!((v - 2.0 * (-0.5f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn default_config_passes() {
        let cfg = ScenarioConfig::default();
        let checks = run_fast_checks(&cfg, 1.0, &Engine::new(4).unwrap()).unwrap();
        assert_eq!(checks.len(), 4);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn zero_scale_fails_everything_inexact() {
        let cfg = ScenarioConfig::default();
        let checks = run_fast_checks(&cfg, 0.0, &Engine::new(4).unwrap()).unwrap();
        assert!(checks.iter().any(|c| !c.passed));
    }
}
