//! Slot-level Monte Carlo experiments.
//!
//! Every slot or trial draws from its own counter-based stream, keyed by the
//! master seed and its index. Work is cut into fixed-size blocks of indices;
//! each block is folded in index order and block results are merged in block
//! order, so the floating-point result does not depend on the worker count.
//!
//! Channel generation: in-band users see one dominant cascaded path per IRS;
//! OOB users see `L` cascaded paths per IRS, formed by `L` BS-IRS paths and a
//! single IRS-UE path.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::analysis::{self, AlignmentModel};
use crate::channel::{AngleBook, ChannelRealization};
use crate::error::{Error, Result};
use crate::irs::{alignment_count, effective_channel_inband, effective_channel_oob, optimal_phase_config};
use crate::rng::{stream, StreamLabel};
use crate::scenario::{LinkBetas, ScenarioConfig, Topology};

const BLOCK: u64 = 1024;

/// Two-sided 95% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Running first and second moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Mean of per-user means and its standard error.
fn user_average(per_user: &[Moments]) -> (f64, f64) {
    let active: Vec<&Moments> = per_user.iter().filter(|m| m.count > 0).collect();
    if active.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = active.len() as f64;
    let mean = active.iter().map(|m| m.mean()).sum::<f64>() / k;
    let var: f64 = active.iter().map(|m| m.variance() / m.count as f64).sum();
    (mean, var.sqrt() / k)
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Ergodic sum-SE of both operators at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub n_total: usize,
    pub s: usize,
    pub m: usize,
    pub l: usize,
    pub slots: u64,
    pub seed: u64,
    pub se_x_mc: f64,
    pub stderr_x: f64,
    pub se_y_mc: f64,
    pub stderr_y: f64,
    pub se_x_cf: f64,
    /// OOB law with the `L/M` alignment probability.
    pub se_y_cf: f64,
    /// OOB law with the exact grid alignment probability.
    pub se_y_cf_exact: f64,
}

/// Empirical and closed-form OOB outage at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageReport {
    pub s: usize,
    pub m: usize,
    pub l: usize,
    /// `log_N L`.
    pub delta: f64,
    pub rho: f64,
    pub trials: u64,
    pub outages: u64,
    pub p_out_mc: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub p_out_cf: f64,
    pub p0: f64,
}

/// Histogram of the number of IRSs aligned with an OOB user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentHistogram {
    pub s: usize,
    pub m: usize,
    pub l: usize,
    pub trials: u64,
    /// `counts[b]` trials with exactly `b` aligned IRSs.
    pub counts: Vec<u64>,
    /// Per-IRS alignment frequency, `mean(B) / S`.
    pub fitted_p: f64,
    pub p_ratio: f64,
    pub p_exact: f64,
    pub tv_ratio: f64,
    pub tv_exact: f64,
}

impl AlignmentHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }

    /// Total-variation distance to Binomial(S, p).
    pub fn tv_distance(&self, p: f64) -> f64 {
        let freq = self.frequencies();
        0.5 * freq
            .iter()
            .enumerate()
            .map(|(b, f)| (f - analysis::binomial_pmf(self.s, p, b).unwrap_or(0.0)).abs())
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub closed_form: f64,
}

impl TermEstimate {
    pub fn relative_error(&self) -> f64 {
        if self.closed_form == 0.0 {
            self.mean.abs()
        } else {
            (self.mean - self.closed_form).abs() / self.closed_form.abs()
        }
    }
}

/// Empirical moments of the three terms of the co-phased in-band gain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermDecomposition {
    pub samples: u64,
    /// Direct power, array-gain power, cross term.
    pub terms: [TermEstimate; 3],
}

/// OOB gain statistics conditioned on the number of aligned IRSs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalGain {
    pub aligned: usize,
    pub count: u64,
    pub mean_gain: f64,
    pub std_error: f64,
    pub closed_form: f64,
}

/// Worst deviation from `|h_k| = |h_d| + M sum|gamma_s|` over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub slots: u64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
}

/// Shared per-experiment state handed to every slot.
struct Context {
    book: AngleBook,
    num_irs: usize,
    paths: usize,
    inband: Vec<LinkBetas>,
    oob: Vec<LinkBetas>,
    snr: f64,
    seed: u64,
}

impl Context {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let topo = Topology::from_config(cfg)?;
        Ok(Context {
            book: AngleBook::new(cfg.elements_per_irs)?,
            num_irs: cfg.num_irs,
            paths: cfg.paths,
            inband: topo.inband_links(),
            oob: topo.oob_links(),
            snr: cfg.snr(),
            seed: cfg.master_seed,
        })
    }

    fn inband_channel<R: Rng>(&self, rng: &mut R, user: usize) -> ChannelRealization {
        ChannelRealization::sample(rng, &self.book, self.num_irs, 1, 1, &self.inband[user])
    }

    fn oob_channel<R: Rng>(&self, rng: &mut R, user: usize) -> ChannelRealization {
        ChannelRealization::sample(rng, &self.book, self.num_irs, self.paths, 1, &self.oob[user])
    }

    /// In-band and OOB effective channels with the IRSs tuned to the
    /// in-band user, plus the number of IRSs aligned with the OOB user.
    fn serve<R: Rng>(&self, rng: &mut R, k: usize, q: usize) -> Result<(Complex64, Complex64, usize)> {
        let inband = self.inband_channel(rng, k);
        let oob = self.oob_channel(rng, q);
        let dominant = inband.dominant_paths();
        let phases = optimal_phase_config(&self.book, inband.direct, &dominant)?;
        let h_k = effective_channel_inband(&self.book, inband.direct, &dominant, &phases)?;
        let h_q = effective_channel_oob(&self.book, oob.direct, &oob.per_irs, &phases)?;
        let beams: Vec<_> = dominant.iter().map(|p| p.1).collect();
        Ok((h_k.value, h_q.value, alignment_count(&beams, &oob.per_irs)))
    }
}

/// Parallel executor with a deterministic reduction order.
pub struct Engine {
    pool: ThreadPool,
    workers: usize,
}

impl Engine {
    pub fn new(workers: usize) -> Result<Self> {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
        Ok(Engine { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Folds `step` over `0..n` in fixed blocks and merges block
    /// accumulators in ascending order.
    fn reduce<A, N, S, M>(&self, n: u64, new: N, step: S, merge: M) -> Result<A>
    where
        A: Send,
        N: Fn() -> A + Sync,
        S: Fn(u64, &mut A) -> Result<()> + Sync,
        M: Fn(&mut A, A),
    {
        let blocks = n.div_ceil(BLOCK);
        let partials: Vec<Result<A>> = self.pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut acc = new();
                    for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                        step(i, &mut acc)?;
                    }
                    Ok(acc)
                })
                .collect()
        });
        let mut total = new();
        for p in partials {
            merge(&mut total, p?);
        }
        Ok(total)
    }

    /// Round-robin ergodic sum-SE of both operators with the IRSs re-tuned
    /// to the scheduled in-band user every slot.
    pub fn run_sum_se(&self, cfg: &ScenarioConfig) -> Result<SweepResult> {
        self.sum_se(cfg, true)
    }

    /// Same schedule and fading draws with no IRS deployed.
    pub fn run_sum_se_without_irs(&self, cfg: &ScenarioConfig) -> Result<SweepResult> {
        self.sum_se(cfg, false)
    }

    fn sum_se(&self, cfg: &ScenarioConfig, with_irs: bool) -> Result<SweepResult> {
        let mut ctx = Context::new(cfg)?;
        if !with_irs {
            ctx.num_irs = 0;
        }
        let (kx, ky) = (ctx.inband.len(), ctx.oob.len());
        let new = || (vec![Moments::default(); kx], vec![Moments::default(); ky]);
        let (per_x, per_y) = self.reduce(
            cfg.slots,
            new,
            |t, acc| {
                let (k, q) = ((t % kx as u64) as usize, (t % ky as u64) as usize);
                let mut rng = stream(ctx.seed, StreamLabel::Slot, t);
                let (h_k, h_q, _) = ctx.serve(&mut rng, k, q)?;
                acc.0[k].push(log2_1p(h_k.norm_sqr() * ctx.snr));
                acc.1[q].push(log2_1p(h_q.norm_sqr() * ctx.snr));
                Ok(())
            },
            |total, part| {
                for (a, b) in total.0.iter_mut().zip(&part.0) {
                    a.merge(b);
                }
                for (a, b) in total.1.iter_mut().zip(&part.1) {
                    a.merge(b);
                }
            },
        )?;
        let (se_x_mc, stderr_x) = user_average(&per_x);
        let (se_y_mc, stderr_y) = user_average(&per_y);
        let (s, m, l) = (cfg.num_irs, cfg.elements_per_irs, cfg.paths);
        let (se_x_cf, se_y_cf, se_y_cf_exact) = if with_irs {
            (
                analysis::sum_se_inband(s, m, ctx.snr, &ctx.inband)?,
                analysis::sum_se_oob(s, m, l, ctx.snr, &ctx.oob, AlignmentModel::PathRatio)?,
                analysis::sum_se_oob(s, m, l, ctx.snr, &ctx.oob, AlignmentModel::GridExact)?,
            )
        } else {
            let y = analysis::sum_se_direct_only(ctx.snr, &ctx.oob)?;
            (analysis::sum_se_direct_only(ctx.snr, &ctx.inband)?, y, y)
        };
        Ok(SweepResult {
            n_total: if with_irs { s * m } else { 0 },
            s: ctx.num_irs,
            m,
            l,
            slots: cfg.slots,
            seed: cfg.master_seed,
            se_x_mc,
            stderr_x,
            se_y_mc,
            stderr_y,
            se_x_cf,
            se_y_cf,
            se_y_cf_exact,
        })
    }

    /// Empirical OOB outage `Pr(|h_q|^2 <= rho)` with the IRSs tuned to an
    /// independently drawn in-band target in every trial.
    pub fn run_outage(&self, cfg: &ScenarioConfig, rho: f64, trials: u64) -> Result<OutageReport> {
        if trials == 0 {
            return Err(Error::Domain("outage needs at least one trial".into()));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("threshold must be non-negative, got {rho}")));
        }
        let ctx = Context::new(cfg)?;
        let (kx, ky) = (ctx.inband.len() as u64, ctx.oob.len() as u64);
        let (outages, cf_sum, p0_sum) = self.reduce(
            trials,
            || (0u64, 0.0f64, 0.0f64),
            |i, acc| {
                let mut rng = stream(ctx.seed, StreamLabel::OutageTrial, i);
                let (_, h_q, _) = ctx.serve(&mut rng, (i % kx) as usize, (i % ky) as usize)?;
                acc.0 += u64::from(h_q.norm_sqr() <= rho);
                Ok(())
            },
            |a, b| {
                a.0 += b.0;
                a.1 += b.1;
                a.2 += b.2;
            },
        )?;
        debug_assert!(cf_sum == 0.0 && p0_sum == 0.0);
        // Closed form averaged over the OOB users in proportion to how often
        // each was drawn.
        let mut p_out_cf = 0.0;
        let mut p0 = 0.0;
        for (q, links) in ctx.oob.iter().enumerate() {
            let weight = (trials / ky + u64::from((q as u64) < trials % ky)) as f64 / trials as f64;
            let (s, m, l) = (cfg.num_irs, cfg.elements_per_irs, cfg.paths);
            p_out_cf += weight * analysis::outage_closed_form(rho, s, m, l, links.beta_d, links.beta_r())?;
            p0 += weight * analysis::outage_p0(rho, m, l, links.beta_d, links.beta_r())?;
        }
        let (ci_lo, ci_hi) = wilson_interval(outages, trials);
        let n = cfg.total_elements();
        Ok(OutageReport {
            s: cfg.num_irs,
            m: cfg.elements_per_irs,
            l: cfg.paths,
            delta: if n > 1 { (cfg.paths as f64).ln() / (n as f64).ln() } else { 0.0 },
            rho,
            trials,
            outages,
            p_out_mc: outages as f64 / trials as f64,
            ci_lo,
            ci_hi,
            p_out_cf,
            p0,
        })
    }

    /// Distribution of the number of IRSs whose beam hits the OOB user.
    pub fn run_alignment(&self, cfg: &ScenarioConfig, trials: u64) -> Result<AlignmentHistogram> {
        if trials == 0 {
            return Err(Error::Domain("alignment needs at least one trial".into()));
        }
        let ctx = Context::new(cfg)?;
        let s = cfg.num_irs;
        let counts = self.reduce(
            trials,
            || vec![0u64; s + 1],
            |i, acc| {
                let mut rng = stream(ctx.seed, StreamLabel::AlignmentTrial, i);
                let inband = ctx.inband_channel(&mut rng, 0);
                let oob = ctx.oob_channel(&mut rng, 0);
                let beams: Vec<_> = inband.dominant_paths().iter().map(|p| p.1).collect();
                acc[alignment_count(&beams, &oob.per_irs)] += 1;
                Ok(())
            },
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        )?;
        let (m, l) = (cfg.elements_per_irs, cfg.paths);
        let mean_b = counts.iter().enumerate().map(|(b, &c)| b as f64 * c as f64).sum::<f64>() / trials as f64;
        let mut hist = AlignmentHistogram {
            s,
            m,
            l,
            trials,
            counts,
            fitted_p: mean_b / s as f64,
            p_ratio: AlignmentModel::PathRatio.probability(m, l),
            p_exact: AlignmentModel::GridExact.probability(m, l),
            tv_ratio: 0.0,
            tv_exact: 0.0,
        };
        hist.tv_ratio = hist.tv_distance(hist.p_ratio);
        hist.tv_exact = hist.tv_distance(hist.p_exact);
        Ok(hist)
    }

    /// Monte Carlo moments of the three terms of `|h_k|^2` under optimal
    /// phases, using the config's in-band users in round-robin order.
    pub fn run_term_decomposition(&self, cfg: &ScenarioConfig, samples: u64) -> Result<TermDecomposition> {
        let ctx = Context::new(cfg)?;
        self.term_decomposition(&ctx.book, cfg.num_irs, &ctx.inband, ctx.seed, samples)
    }

    /// Term decomposition for explicit per-user large-scale gains.
    pub fn term_decomposition_for(
        &self,
        num_irs: usize,
        m: usize,
        links: &[LinkBetas],
        seed: u64,
        samples: u64,
    ) -> Result<TermDecomposition> {
        self.term_decomposition(&AngleBook::new(m)?, num_irs, links, seed, samples)
    }

    fn term_decomposition(
        &self,
        book: &AngleBook,
        num_irs: usize,
        links: &[LinkBetas],
        seed: u64,
        samples: u64,
    ) -> Result<TermDecomposition> {
        if samples == 0 || links.is_empty() {
            return Err(Error::Domain("term decomposition needs samples and users".into()));
        }
        let users = links.len() as u64;
        let m = book.m() as f64;
        let acc = self.reduce(
            samples,
            || [Moments::default(); 3],
            |i, acc| {
                let mut rng = stream(seed, StreamLabel::TermSample, i);
                let ch = ChannelRealization::sample(&mut rng, book, num_irs, 1, 1, &links[(i % users) as usize]);
                let hd = ch.direct.norm();
                let sum_gamma: f64 = ch.dominant_paths().iter().map(|p| p.0.norm()).sum();
                acc[0].push(hd * hd);
                acc[1].push(m * m * sum_gamma * sum_gamma);
                acc[2].push(2.0 * m * hd * sum_gamma);
                Ok(())
            },
            |a, b| a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y)),
        )?;
        let mut closed = [0.0; 3];
        for (k, l) in links.iter().enumerate() {
            let weight = (samples / users + u64::from((k as u64) < samples % users)) as f64 / samples as f64;
            let cf = analysis::inband_term_moments(num_irs, book.m(), l.beta_d, l.beta_r());
            for (c, v) in closed.iter_mut().zip(cf) {
                *c += weight * v;
            }
        }
        let terms = [0, 1, 2].map(|j| TermEstimate {
            mean: acc[j].mean(),
            std_error: acc[j].std_error(),
            closed_form: closed[j],
        });
        Ok(TermDecomposition { samples, terms })
    }

    /// Mean OOB gain grouped by the number of aligned IRSs.
    pub fn run_conditional_gain(&self, cfg: &ScenarioConfig, trials: u64) -> Result<Vec<ConditionalGain>> {
        let ctx = Context::new(cfg)?;
        let (kx, ky) = (ctx.inband.len() as u64, ctx.oob.len() as u64);
        let s = cfg.num_irs;
        let (m, l) = (cfg.elements_per_irs, cfg.paths);
        let bins = self.reduce(
            trials,
            || vec![(Moments::default(), 0.0f64); s + 1],
            |i, acc| {
                let mut rng = stream(ctx.seed, StreamLabel::OutageTrial, i);
                let q = (i % ky) as usize;
                let (_, h_q, b) = ctx.serve(&mut rng, (i % kx) as usize, q)?;
                let links = &ctx.oob[q];
                acc[b].0.push(h_q.norm_sqr());
                acc[b].1 += analysis::oob_conditional_gain(b, m, l, links.beta_r(), links.beta_d);
                Ok(())
            },
            |a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    x.0.merge(&y.0);
                    x.1 += y.1;
                }
            },
        )?;
        Ok(bins
            .into_iter()
            .enumerate()
            .filter(|(_, (mom, _))| mom.count > 0)
            .map(|(aligned, (mom, cf))| ConditionalGain {
                aligned,
                count: mom.count,
                mean_gain: mom.mean(),
                std_error: mom.std_error(),
                closed_form: cf / mom.count as f64,
            })
            .collect())
    }

    /// Checks the co-phasing identity slot by slot.
    pub fn run_inband_identity(&self, cfg: &ScenarioConfig, slots: u64) -> Result<IdentityReport> {
        let ctx = Context::new(cfg)?;
        let kx = ctx.inband.len() as u64;
        let m = cfg.elements_per_irs as f64;
        let (max_abs, max_rel) = self.reduce(
            slots,
            || (0.0f64, 0.0f64),
            |t, acc| {
                let mut rng = stream(ctx.seed, StreamLabel::Slot, t);
                let ch = ctx.inband_channel(&mut rng, (t % kx) as usize);
                let dominant = ch.dominant_paths();
                let phases = optimal_phase_config(&ctx.book, ch.direct, &dominant)?;
                let h = effective_channel_inband(&ctx.book, ch.direct, &dominant, &phases)?;
                let expected = ch.direct.norm() + m * dominant.iter().map(|p| p.0.norm()).sum::<f64>();
                let err = (h.value.norm() - expected).abs();
                acc.0 = acc.0.max(err);
                acc.1 = acc.1.max(err / expected);
                Ok(())
            },
            |a, b| {
                a.0 = a.0.max(b.0);
                a.1 = a.1.max(b.1);
            },
        )?;
        Ok(IdentityReport {
            slots,
            max_abs_error: max_abs,
            max_rel_error: max_rel,
        })
    }
}
