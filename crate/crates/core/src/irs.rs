//! IRS phase configurations and the effective scalar channels they produce.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{Angle, AngleBook, PathSet};
use crate::error::{Error, Result};

const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Per-IRS unit-modulus reflection coefficients (the diagonals of the
/// phase-shift matrices).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    per_irs: Vec<Vec<Complex64>>,
}

impl PhaseConfig {
    pub fn new(per_irs: Vec<Vec<Complex64>>) -> Result<Self> {
        if let Some(first) = per_irs.first() {
            let m = first.len();
            if per_irs.iter().any(|v| v.len() != m) {
                return Err(Error::Contract("IRSs with different element counts".into()));
            }
        }
        for (s, v) in per_irs.iter().enumerate() {
            if let Some(z) = v.iter().find(|z| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL) {
                return Err(Error::Domain(format!("IRS {s} has non-unit entry {z}")));
            }
        }
        Ok(PhaseConfig { per_irs })
    }

    pub fn num_irs(&self) -> usize {
        self.per_irs.len()
    }

    pub fn per_irs(&self) -> &[Vec<Complex64>] {
        &self.per_irs
    }
}

/// A scalar channel and its power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    pub value: Complex64,
    pub gain: f64,
}

impl From<Complex64> for EffectiveChannel {
    fn from(value: Complex64) -> Self {
        EffectiveChannel {
            value,
            gain: value.norm_sqr(),
        }
    }
}

/// `z / |z|`, or 1 when `z` vanishes.
fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 && r.is_finite() {
        z / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Closed-form solution of the in-band SNR maximization: each IRS beams at
/// its cascaded angle with a phase that co-phases its path with `direct`.
///
/// Entry `k` of IRS `s` is `e^{j(arg h_d - arg gamma_s - pi k omega_s)}`.
pub fn optimal_phase_config(
    book: &AngleBook,
    direct: Complex64,
    inband_paths: &[(Complex64, Angle)],
) -> Result<PhaseConfig> {
    let per_irs = inband_paths
        .iter()
        .map(|&(gain, angle)| book.beam(angle, unit_phase(direct * gain.conj())))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseConfig { per_irs })
}

/// I.i.d. uniform phases on `[0, 2pi)`.
pub fn random_phase_config<R: Rng + ?Sized>(rng: &mut R, num_irs: usize, m: usize) -> PhaseConfig {
    let per_irs = (0..num_irs)
        .map(|_| {
            (0..m)
                .map(|_| Complex64::cis(2.0 * PI * rng.random::<f64>()))
                .collect()
        })
        .collect();
    PhaseConfig { per_irs }
}

fn check_irs_count(paths: usize, phases: &PhaseConfig) -> Result<()> {
    if paths != phases.num_irs() {
        return Err(Error::Contract(format!(
            "{} path sets for {} configured IRSs",
            paths,
            phases.num_irs()
        )));
    }
    Ok(())
}

/// `h = h_d + M * sum_s gamma_s a_dot^H(omega_s) theta_s` for an in-band user
/// under the dominant-path model.
pub fn effective_channel_inband(
    book: &AngleBook,
    direct: Complex64,
    inband_paths: &[(Complex64, Angle)],
    phases: &PhaseConfig,
) -> Result<EffectiveChannel> {
    check_irs_count(inband_paths.len(), phases)?;
    let mut h = direct;
    for (&(gain, angle), theta) in inband_paths.iter().zip(&phases.per_irs) {
        h += gain * book.project(angle, theta)?;
    }
    Ok(h.into())
}

/// `h = h_d + (M / sqrt(L)) * sum_s sum_l gamma_{s,l} a_dot^H(omega_{s,l}) theta_s`
/// for an OOB user with `L` cascaded paths through every IRS.
pub fn effective_channel_oob(
    book: &AngleBook,
    direct: Complex64,
    oob_paths: &[PathSet],
    phases: &PhaseConfig,
) -> Result<EffectiveChannel> {
    check_irs_count(oob_paths.len(), phases)?;
    let Some(first) = oob_paths.first() else {
        return Ok(direct.into());
    };
    let l = first.len();
    if l == 0 || oob_paths.iter().any(|p| p.len() != l || p.angles.len() != l) {
        return Err(Error::Contract("OOB path sets must share the same non-zero L".into()));
    }
    let mut reflected = Complex64::new(0.0, 0.0);
    for (set, theta) in oob_paths.iter().zip(&phases.per_irs) {
        for (&gain, &angle) in set.gains.iter().zip(&set.angles) {
            reflected += gain * book.project(angle, theta)?;
        }
    }
    Ok((direct + reflected / (l as f64).sqrt()).into())
}

/// Number of IRSs whose beam angle coincides with at least one of the OOB
/// user's cascaded angles through that IRS.
pub fn alignment_count(beam_angles: &[Angle], oob_paths: &[PathSet]) -> usize {
    beam_angles
        .iter()
        .zip(oob_paths)
        .filter(|(beam, set)| set.angles.contains(beam))
        .count()
}
