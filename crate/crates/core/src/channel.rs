//! Saleh-Valenzuela mmWave channels on a discrete angle-book.
//!
//! "Angles" are spatial frequencies (sines of physical angles) in `[-1, 1)`.
//! An `M`-element array resolves the grid `{-1 + 2i/M}`; all angles are kept
//! as integer multiples of `1/M` so that cascading (wrapped addition) and beam
//! alignment are exact integer operations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scenario::LinkBetas;

/// A spatial frequency `units / m` with `units` in `[-m, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    units: i64,
    m: u32,
}

impl Angle {
    /// Exact angle from a sine value lying on the `1/m` lattice.
    pub fn from_sine(value: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("element count must be at least 1".into()));
        }
        if !(-1.0..1.0).contains(&value) {
            return Err(Error::Domain(format!("angle {value} outside [-1, 1)")));
        }
        let scaled = value * m as f64;
        let units = scaled.round();
        if (scaled - units).abs() > 1e-9 * m as f64 {
            return Err(Error::Domain(format!("angle {value} is not a multiple of 1/{m}")));
        }
        Ok(Angle::wrapped(units as i64, m as u32))
    }

    fn wrapped(units: i64, m: u32) -> Self {
        let m_i = i64::from(m);
        Angle {
            units: (units + m_i).rem_euclid(2 * m_i) - m_i,
            m,
        }
    }

    pub fn sine(&self) -> f64 {
        self.units as f64 / f64::from(self.m)
    }

    pub fn elements(&self) -> usize {
        self.m as usize
    }
}

/// Wrapped sum of two angles, `(phi + psi)` reduced into `[-1, 1)`.
///
/// For even `M` the result is again an angle-book entry. For odd `M` the sum
/// of two entries lands on the half-shifted lattice `{2k/M}`; spacing between
/// cascaded angles is still a multiple of `2/M`, so beams stay orthogonal.
pub fn cascaded_angle(phi: Angle, psi: Angle) -> Result<Angle> {
    if phi.m != psi.m {
        return Err(Error::Domain(format!(
            "angles on different lattices (M = {} vs {})",
            phi.m, psi.m
        )));
    }
    Ok(Angle::wrapped(phi.units + psi.units, phi.m))
}

/// ULA response `(1/sqrt(m)) [1, e^{-j pi phi}, ..., e^{-j (m-1) pi phi}]`.
pub fn array_response(m: usize, phi: f64) -> Vec<Complex64> {
    let scale = 1.0 / (m as f64).sqrt();
    (0..m)
        .map(|k| Complex64::from_polar(scale, -PI * k as f64 * phi))
        .collect()
}

/// Angle-book of an `M`-element IRS with a table of the `2M` roots of unity
/// used to evaluate steering vectors without accumulating phase error.
#[derive(Debug, Clone)]
pub struct AngleBook {
    m: usize,
    roots: Vec<Complex64>,
}

impl AngleBook {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("element count must be at least 1".into()));
        }
        let roots = (0..2 * m)
            .map(|r| Complex64::cis(PI * r as f64 / m as f64))
            .collect();
        Ok(AngleBook { m, roots })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Grid values `-1 + 2i/M`, increasing.
    pub fn entries(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.entry(i).sine()).collect()
    }

    pub fn entry(&self, i: usize) -> Angle {
        Angle::wrapped(2 * i as i64 - self.m as i64, self.m as u32)
    }

    pub fn contains(&self, angle: Angle) -> bool {
        angle.m as usize == self.m && (angle.units + self.m as i64) % 2 == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Angle {
        self.entry(rng.random_range(0..self.m))
    }

    /// `e^{j pi k units / M}`.
    fn phase(&self, k: usize, angle: Angle) -> Complex64 {
        let r = (k as i64 * angle.units).rem_euclid(2 * self.m as i64);
        self.roots[r as usize]
    }

    fn check(&self, angle: Angle) -> Result<()> {
        if angle.m as usize != self.m {
            return Err(Error::Contract(format!(
                "angle on M = {} lattice used with M = {} book",
                angle.m, self.m
            )));
        }
        Ok(())
    }

    /// Exact `a_M(omega)` for a lattice angle.
    pub fn response(&self, angle: Angle) -> Result<Vec<Complex64>> {
        self.check(angle)?;
        let scale = 1.0 / (self.m as f64).sqrt();
        Ok((0..self.m).map(|k| self.phase(k, angle).conj() * scale).collect())
    }

    /// `scale * M * a_dot_M(omega)`, i.e. entries `scale * e^{-j pi k omega}`.
    pub fn beam(&self, angle: Angle, scale: Complex64) -> Result<Vec<Complex64>> {
        self.check(angle)?;
        Ok((0..self.m).map(|k| self.phase(k, angle).conj() * scale).collect())
    }

    /// `M * a_dot_M(omega)^H * theta = sum_k e^{j pi k omega} theta_k`.
    ///
    /// Equals `theta`'s phase factor times `M` when `theta` is a beam on
    /// `omega` and vanishes for any other lattice angle.
    pub fn project(&self, angle: Angle, theta: &[Complex64]) -> Result<Complex64> {
        self.check(angle)?;
        if theta.len() != self.m {
            return Err(Error::Contract(format!(
                "phase vector has {} entries, expected {}",
                theta.len(),
                self.m
            )));
        }
        let step = angle.units.rem_euclid(2 * self.m as i64) as usize;
        let period = 2 * self.m;
        let mut r = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in theta {
            acc += self.roots[r] * t;
            r += step;
            if r >= period {
                r -= period;
            }
        }
        Ok(acc)
    }
}

/// Cascaded BS-IRS-UE paths through one IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub gains: Vec<Complex64>,
    pub angles: Vec<Angle>,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Circularly-symmetric complex normal with total variance `var`.
pub fn sample_direct<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let sd = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Draws `paths_1` BS-IRS and `paths_2` IRS-UE paths and returns all
/// `paths_1 * paths_2` cascaded pairs (first-hop index major). Gains are raw
/// products; the `sqrt(M/L)` array scaling is applied by the effective
/// channel operations.
pub fn sample_path_set<R: Rng + ?Sized>(
    rng: &mut R,
    book: &AngleBook,
    paths_1: usize,
    paths_2: usize,
    var_1: f64,
    var_2: f64,
) -> PathSet {
    let phis: Vec<Angle> = (0..paths_1).map(|_| book.sample(rng)).collect();
    let psis: Vec<Angle> = (0..paths_2).map(|_| book.sample(rng)).collect();
    let g1: Vec<Complex64> = (0..paths_1).map(|_| sample_direct(rng, var_1)).collect();
    let g2: Vec<Complex64> = (0..paths_2).map(|_| sample_direct(rng, var_2)).collect();
    let count = paths_1 * paths_2;
    let mut gains = Vec::with_capacity(count);
    let mut angles = Vec::with_capacity(count);
    for (phi, a) in phis.iter().zip(&g1) {
        for (psi, b) in psis.iter().zip(&g2) {
            gains.push(a * b);
            angles.push(Angle::wrapped(phi.units + psi.units, phi.m));
        }
    }
    PathSet { gains, angles }
}

/// One slot's channel for a single user: direct link plus one path set per IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub direct: Complex64,
    pub per_irs: Vec<PathSet>,
}

impl ChannelRealization {
    pub fn sample<R: Rng + ?Sized>(
        rng: &mut R,
        book: &AngleBook,
        num_irs: usize,
        paths_1: usize,
        paths_2: usize,
        links: &LinkBetas,
    ) -> Self {
        let direct = sample_direct(rng, links.beta_d);
        let per_irs = (0..num_irs)
            .map(|_| sample_path_set(rng, book, paths_1, paths_2, links.beta_f, links.beta_g))
            .collect();
        ChannelRealization { direct, per_irs }
    }

    /// Number of cascaded paths per IRS, if consistent across IRSs.
    pub fn paths_per_irs(&self) -> Option<usize> {
        let l = self.per_irs.first()?.len();
        self.per_irs.iter().all(|p| p.len() == l).then_some(l)
    }

    /// First cascaded path of every IRS; the whole channel under the
    /// dominant-path model.
    pub fn dominant_paths(&self) -> Vec<(Complex64, Angle)> {
        self.per_irs
            .iter()
            .filter_map(|p| Some((*p.gains.first()?, *p.angles.first()?)))
            .collect()
    }
}
