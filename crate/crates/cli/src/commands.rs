use std::fmt;
use std::path::Path;

use chrono::Utc;
use serde::Serialize;

use irs_core::analysis::design_rule;
use irs_core::checks::run_fast_checks;
use irs_core::montecarlo::Engine;
use irs_core::scenario::ScenarioConfig;

use crate::cli::{DesignArgs, Fraction, IrsCount, OutageArgs, PrelogArgs, SweepArgs, ValidateArgs};
use crate::report::{emit, num, timestamp, Manifest, Table};

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const CONFIG: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const NUMERICAL: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: Self::USAGE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<irs_core::Error> for Failure {
    fn from(e: irs_core::Error) -> Self {
        use irs_core::Error::*;
        let code = match e {
            Config { .. } => Self::CONFIG,
            Domain(_) => Self::USAGE,
            Contract(_) | Numerical(_) => Self::NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: Self::CONFIG, message: format!("i/o error: {e}") }
    }
}

pub type Outcome = Result<(), Failure>;

/// Settings shared by every experiment command.
pub struct Session<'a> {
    pub config: ScenarioConfig,
    pub engine: Engine,
    pub out_dir: &'a Path,
}

impl Session<'_> {
    fn manifest<'c, P: Serialize>(&'c self, command: &'c str, parameters: P) -> Manifest<'c, ScenarioConfig, P> {
        Manifest {
            command,
            args: std::env::args().skip(1).collect(),
            config: &self.config,
            parameters,
            seed: self.config.master_seed,
            workers: self.engine.workers(),
            tool_version: env!("CARGO_PKG_VERSION"),
            started_at: timestamp(Utc::now()),
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }
}

fn grid_config(base: &ScenarioConfig, n: usize, s: usize, l: usize) -> ScenarioConfig {
    ScenarioConfig {
        num_irs: s,
        elements_per_irs: n / s,
        paths: l,
        ..base.clone()
    }
}

/// Expands `star` to the design-rule count and rejects counts that do not
/// divide `n`. Zero is kept only when `allow_zero` is set.
fn resolve_counts(tokens: &[IrsCount], n: usize, l: usize, allow_zero: bool) -> Result<Vec<usize>, Failure> {
    if tokens.is_empty() {
        return Err(Failure::usage("S list is empty"));
    }
    let mut out = Vec::new();
    for t in tokens {
        let s = match *t {
            IrsCount::Star => design_rule(n, l)?.s_star,
            IrsCount::Count(0) if allow_zero => 0,
            IrsCount::Count(0) => return Err(Failure::usage("S = 0 is not allowed here")),
            IrsCount::Count(s) => s,
        };
        if s > 0 && n % s != 0 {
            return Err(Failure::usage(format!("N = {n} is not divisible by S = {s}")));
        }
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// `L = round(N^delta)`, at least one path.
fn paths_for(n: usize, delta: f64) -> usize {
    ((n as f64).powf(delta).round() as usize).max(1)
}

fn check_n(n: &[usize]) -> Outcome {
    if n.is_empty() {
        return Err(Failure::usage("N list is empty"));
    }
    if let Some(bad) = n.iter().find(|&&n| n == 0) {
        return Err(Failure::usage(format!("N must be positive, got {bad}")));
    }
    Ok(())
}

fn check_deltas(delta: &[Fraction]) -> Outcome {
    if delta.is_empty() {
        return Err(Failure::usage("delta list is empty"));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepParams<'a> {
    n: &'a [usize],
    grid: Vec<(usize, Vec<usize>)>,
    slots: u64,
}

pub fn sweep_se(session: &Session, args: &SweepArgs) -> Outcome {
    check_n(&args.n)?;
    let l = session.config.paths;
    let grid = args
        .n
        .iter()
        .map(|&n| Ok((n, resolve_counts(&args.s, n, l, false)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let slots = args.slots.unwrap_or(session.config.slots);
    let manifest = session.manifest("sweep-se", SweepParams { n: &args.n, grid: grid.clone(), slots });
    let mut table = Table::new(&[
        "N", "S", "M", "se_x_mc", "se_x_cf", "se_y_mc", "se_y_cf", "stderr_x", "stderr_y",
    ]);
    for (n, counts) in &grid {
        for &s in counts {
            let cfg = ScenarioConfig { slots, ..grid_config(&session.config, *n, s, l) };
            let r = session.engine.run_sum_se(&cfg)?;
            table.push(vec![
                n.to_string(),
                s.to_string(),
                r.m.to_string(),
                num(r.se_x_mc),
                num(r.se_x_cf),
                num(r.se_y_mc),
                num(r.se_y_cf),
                num(r.stderr_x),
                num(r.stderr_y),
            ]);
        }
    }
    let path = emit(session.out_dir, "sweep_se", &table, manifest)?;
    println!("wrote {} ({} rows)", path.display(), table.len());
    Ok(())
}

#[derive(Serialize)]
struct OutageParams<'a> {
    n: usize,
    delta: Vec<&'a str>,
    rho: f64,
    trials: u64,
    unit_gains: bool,
}

pub fn outage(session: &Session, args: &OutageArgs) -> Outcome {
    check_n(&[args.n])?;
    check_deltas(&args.delta)?;
    if !(args.rho >= 0.0 && args.rho.is_finite()) {
        return Err(Failure::usage(format!("rho must be non-negative, got {}", args.rho)));
    }
    if args.trials == 0 {
        return Err(Failure::usage("trials must be positive"));
    }
    let mut base = session.config.clone();
    base.normalize_pathloss |= !args.physical;
    let plan = args
        .delta
        .iter()
        .map(|d| {
            let l = paths_for(args.n, d.value);
            Ok((d, l, resolve_counts(&args.s, args.n, l, false)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let params = OutageParams {
        n: args.n,
        delta: args.delta.iter().map(|d| d.text.as_str()).collect(),
        rho: args.rho,
        trials: args.trials,
        unit_gains: base.normalize_pathloss,
    };
    let manifest = Manifest { config: &base, ..session.manifest("outage", params) };
    let mut table = Table::new(&["S", "delta", "L", "p_out_mc", "ci_lo", "ci_hi", "p_out_cf"]);
    for (delta, l, counts) in &plan {
        for &s in counts {
            let cfg = grid_config(&base, args.n, s, *l);
            let r = session.engine.run_outage(&cfg, args.rho, args.trials)?;
            table.push(vec![
                s.to_string(),
                num(delta.value),
                l.to_string(),
                num(r.p_out_mc),
                num(r.ci_lo),
                num(r.ci_hi),
                num(r.p_out_cf),
            ]);
        }
    }
    let path = emit(session.out_dir, "outage", &table, manifest)?;
    println!("wrote {} ({} rows)", path.display(), table.len());
    Ok(())
}

#[derive(Serialize)]
struct PrelogParams<'a> {
    n: usize,
    delta: Vec<&'a str>,
    slots: u64,
    unit_gains: bool,
}

pub fn prelog(session: &Session, args: &PrelogArgs) -> Outcome {
    check_n(&[args.n])?;
    check_deltas(&args.delta)?;
    if args.n < 2 {
        return Err(Failure::usage("pre-log factor needs N >= 2"));
    }
    let mut base = session.config.clone();
    if !args.physical {
        base.normalize_pathloss = true;
        base.link_budget_db = 0.0;
    }
    let slots = args.slots.unwrap_or(base.slots);
    base.slots = slots;
    let plan = args
        .delta
        .iter()
        .map(|d| {
            let l = paths_for(args.n, d.value);
            let star = design_rule(args.n, l)?.s_star;
            Ok((d, l, star, resolve_counts(&args.s, args.n, l, true)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let params = PrelogParams {
        n: args.n,
        delta: args.delta.iter().map(|d| d.text.as_str()).collect(),
        slots,
        unit_gains: !args.physical,
    };
    let manifest = Manifest { config: &base, ..session.manifest("prelog", params) };
    let log_n = (args.n as f64).log2();
    let mut table = Table::new(&["S", "delta", "tau_oob", "tau_inband", "s_star"]);
    for (delta, l, star, counts) in &plan {
        for &s in counts {
            // Without IRSs the rate stays bounded as N grows: zero pre-log.
            let (tau_oob, tau_inband) = if s == 0 {
                (0.0, 0.0)
            } else {
                let r = session.engine.run_sum_se(&grid_config(&base, args.n, s, *l))?;
                (r.se_y_mc / log_n, r.se_x_mc / log_n)
            };
            table.push(vec![
                s.to_string(),
                num(delta.value),
                num(tau_oob),
                num(tau_inband),
                u8::from(s == *star).to_string(),
            ]);
        }
    }
    let path = emit(session.out_dir, "prelog", &table, manifest)?;
    println!("wrote {} ({} rows)", path.display(), table.len());
    Ok(())
}

pub fn design(args: &DesignArgs) -> Outcome {
    let rule = design_rule(args.n, args.l)?;
    let json = serde_json::to_string(&rule).map_err(|e| Failure { code: Failure::NUMERICAL, message: e.to_string() })?;
    println!("{json}");
    Ok(())
}

pub fn validate(session: &Session, args: &ValidateArgs) -> Outcome {
    if !(args.tol_scale >= 0.0 && args.tol_scale.is_finite()) {
        return Err(Failure::usage("tolerance scale must be non-negative"));
    }
    let checks = run_fast_checks(&session.config, args.tol_scale, &session.engine)?;
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<22} measured {:.3e}  tolerance {:.3e}", c.name, c.measured, c.tolerance);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: Failure::VALIDATION,
            message: format!("{failed} of {} checks failed", checks.len()),
        });
    }
    Ok(())
}
