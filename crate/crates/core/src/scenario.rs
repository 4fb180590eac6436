//! Experiment configuration and physical topology.
//!
//! Two base stations serve their users inside a square region; the IRSs sit
//! on the half of the region's circumscribing circle that faces the base
//! stations. Path losses follow `C0 (d0 / d)^alpha`, with `C0` folded into the
//! link budget so that every `beta` here is the pure distance term.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, StreamLabel};

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn center(&self) -> [f64; 2] {
        [
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        ]
    }

    /// Radius of the circumscribing circle (half the diagonal).
    pub fn circumradius(&self) -> f64 {
        0.5 * (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }

    fn is_degenerate(&self) -> bool {
        !(self.x_min.is_finite()
            && self.x_max.is_finite()
            && self.y_min.is_finite()
            && self.y_max.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min)
    }
}

/// Full description of one experiment. Fields missing from a JSON document
/// take their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bs_x_pos: [f64; 2],
    pub bs_y_pos: [f64; 2],
    pub ue_region: Rect,
    /// In-band users K.
    pub num_ues_x: usize,
    /// OOB users Q.
    pub num_ues_y: usize,
    /// IRS count S.
    pub num_irs: usize,
    /// Elements per IRS M.
    pub elements_per_irs: usize,
    /// Cascaded OOB paths per IRS L.
    pub paths: usize,
    /// `C0 * P / sigma^2` in dB.
    pub link_budget_db: f64,
    pub alpha_bs_irs: f64,
    pub alpha_irs_ue: f64,
    pub alpha_bs_ue: f64,
    pub ref_distance_m: f64,
    pub slots: u64,
    pub master_seed: u64,
    /// Forces every path loss to 1.
    pub normalize_pathloss: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            bs_x_pos: [50.0, 0.0],
            bs_y_pos: [0.0, 50.0],
            ue_region: Rect {
                x_min: 900.0,
                x_max: 1100.0,
                y_min: 900.0,
                y_max: 1100.0,
            },
            num_ues_x: 10,
            num_ues_y: 10,
            num_irs: 4,
            elements_per_irs: 16,
            paths: 2,
            link_budget_db: 150.0,
            alpha_bs_irs: 2.0,
            alpha_irs_ue: 2.2,
            alpha_bs_ue: 4.5,
            ref_distance_m: 1.0,
            slots: 10_000,
            master_seed: 2024,
            normalize_pathloss: false,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            field: "<document>".into(),
            reason: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            field: "<file>".into(),
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("num_ues_x", self.num_ues_x),
            ("num_ues_y", self.num_ues_y),
            ("num_irs", self.num_irs),
            ("elements_per_irs", self.elements_per_irs),
            ("paths", self.paths),
        ];
        for (field, value) in positive {
            if value == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        if self.slots == 0 {
            return Err(Error::config("slots", "must be at least 1"));
        }
        if self.ue_region.is_degenerate() {
            return Err(Error::config("ue_region", "region must have positive width and height"));
        }
        let exponents = [
            ("alpha_bs_irs", self.alpha_bs_irs),
            ("alpha_irs_ue", self.alpha_irs_ue),
            ("alpha_bs_ue", self.alpha_bs_ue),
        ];
        for (field, value) in exponents {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::config(field, "path-loss exponent must be positive"));
            }
        }
        if !(self.ref_distance_m > 0.0 && self.ref_distance_m.is_finite()) {
            return Err(Error::config("ref_distance_m", "must be positive"));
        }
        if !self.link_budget_db.is_finite() {
            return Err(Error::config("link_budget_db", "must be finite"));
        }
        for (field, p) in [("bs_x_pos", self.bs_x_pos), ("bs_y_pos", self.bs_y_pos)] {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::config(field, "coordinates must be finite"));
            }
        }
        Ok(())
    }

    /// Total IRS elements N = S * M.
    pub fn total_elements(&self) -> usize {
        self.num_irs * self.elements_per_irs
    }

    /// Linear `P / sigma^2` (with `C0` folded in).
    pub fn snr(&self) -> f64 {
        10f64.powf(self.link_budget_db / 10.0)
    }
}

/// `C0 (d0 / d)^alpha` in linear scale, with `C0` given in dB.
pub fn path_loss(d: f64, alpha: f64, c0_db: f64, d0: f64) -> Result<f64> {
    if !(d > 0.0) || !(d0 > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs positive distances, got d = {d}, d0 = {d0}"
        )));
    }
    Ok(10f64.powf(c0_db / 10.0) * (d0 / d).powf(alpha))
}

/// `count` points evenly spaced in angle, endpoints included, on the half of
/// the circle circumscribing `region` that faces the origin.
pub fn place_irs_semicircle(count: usize, region: &Rect) -> Result<Vec<[f64; 2]>> {
    if count == 0 {
        return Err(Error::Domain("IRS count must be at least 1".into()));
    }
    if region.is_degenerate() {
        return Err(Error::Domain("degenerate UE region".into()));
    }
    let [cx, cy] = region.center();
    let radius = region.circumradius();
    // Direction from the center toward the origin; the arc is centered on it.
    let facing = (-cy).atan2(-cx);
    let start = facing - PI / 2.0;
    let points = (0..count)
        .map(|i| {
            let angle = if count == 1 {
                facing
            } else {
                start + PI * i as f64 / (count - 1) as f64
            };
            [cx + radius * angle.cos(), cy + radius * angle.sin()]
        })
        .collect();
    Ok(points)
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Per-user large-scale gains: `beta_d` on the direct link and the cascaded
/// `beta_r = beta_f * beta_g` through an IRS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBetas {
    pub beta_d: f64,
    pub beta_f: f64,
    pub beta_g: f64,
}

impl LinkBetas {
    pub const UNIT: LinkBetas = LinkBetas {
        beta_d: 1.0,
        beta_f: 1.0,
        beta_g: 1.0,
    };

    pub fn beta_r(&self) -> f64 {
        self.beta_f * self.beta_g
    }
}

/// Node placement and path losses for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub irs_positions: Vec<[f64; 2]>,
    pub ue_positions_x: Vec<[f64; 2]>,
    pub ue_positions_y: Vec<[f64; 2]>,
    /// Direct-link losses, one per in-band user.
    pub beta_direct_x: Vec<f64>,
    /// Direct-link losses, one per OOB user.
    pub beta_direct_y: Vec<f64>,
    /// BS-to-IRS losses for BS-X and BS-Y.
    pub beta_f: [f64; 2],
    pub beta_g_x: Vec<f64>,
    pub beta_g_y: Vec<f64>,
}

impl Topology {
    /// Builds the topology from the config's own topology stream.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let mut rng = stream(cfg.master_seed, StreamLabel::Topology, 0);
        build_topology(cfg, &mut rng)
    }

    pub fn inband_links(&self) -> Vec<LinkBetas> {
        self.beta_direct_x
            .iter()
            .zip(&self.beta_g_x)
            .map(|(&beta_d, &beta_g)| LinkBetas {
                beta_d,
                beta_f: self.beta_f[0],
                beta_g,
            })
            .collect()
    }

    pub fn oob_links(&self) -> Vec<LinkBetas> {
        self.beta_direct_y
            .iter()
            .zip(&self.beta_g_y)
            .map(|(&beta_d, &beta_g)| LinkBetas {
                beta_d,
                beta_f: self.beta_f[1],
                beta_g,
            })
            .collect()
    }
}

/// Places the IRSs and samples static user positions uniformly in the
/// region. IRS-dependent losses are averaged over the IRSs so that every
/// surface sees the same `beta_f` and `beta_g`.
pub fn build_topology<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Topology> {
    cfg.validate()?;
    let region = cfg.ue_region;
    let irs_positions = place_irs_semicircle(cfg.num_irs, &region)?;
    let mut sample_ue = |_| {
        [
            rng.random_range(region.x_min..region.x_max),
            rng.random_range(region.y_min..region.y_max),
        ]
    };
    let ue_positions_x: Vec<_> = (0..cfg.num_ues_x).map(&mut sample_ue).collect();
    let ue_positions_y: Vec<_> = (0..cfg.num_ues_y).map(&mut sample_ue).collect();

    if cfg.normalize_pathloss {
        return Ok(Topology {
            irs_positions,
            beta_direct_x: vec![1.0; cfg.num_ues_x],
            beta_direct_y: vec![1.0; cfg.num_ues_y],
            beta_f: [1.0, 1.0],
            beta_g_x: vec![1.0; cfg.num_ues_x],
            beta_g_y: vec![1.0; cfg.num_ues_y],
            ue_positions_x,
            ue_positions_y,
        });
    }

    let d0 = cfg.ref_distance_m;
    let mean_loss_to_irs = |from: [f64; 2], alpha: f64| -> Result<f64> {
        let mut total = 0.0;
        for &irs in &irs_positions {
            total += path_loss(distance(from, irs), alpha, 0.0, d0)?;
        }
        Ok(total / irs_positions.len() as f64)
    };
    let beta_f = [
        mean_loss_to_irs(cfg.bs_x_pos, cfg.alpha_bs_irs)?,
        mean_loss_to_irs(cfg.bs_y_pos, cfg.alpha_bs_irs)?,
    ];
    let direct = |bs: [f64; 2], ues: &[[f64; 2]]| -> Result<Vec<f64>> {
        ues.iter()
            .map(|&ue| path_loss(distance(bs, ue), cfg.alpha_bs_ue, 0.0, d0))
            .collect()
    };
    let reflected = |ues: &[[f64; 2]]| -> Result<Vec<f64>> {
        ues.iter()
            .map(|&ue| mean_loss_to_irs(ue, cfg.alpha_irs_ue))
            .collect()
    };
    Ok(Topology {
        beta_direct_x: direct(cfg.bs_x_pos, &ue_positions_x)?,
        beta_direct_y: direct(cfg.bs_y_pos, &ue_positions_y)?,
        beta_f,
        beta_g_x: reflected(&ue_positions_x)?,
        beta_g_y: reflected(&ue_positions_y)?,
        irs_positions,
        ue_positions_x,
        ue_positions_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_distance_gives_c0() {
        assert_relative_eq!(path_loss(1.0, 2.0, 0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(path_loss(5.0, 3.7, 20.0, 5.0).unwrap(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn decade_scaling() {
        assert_relative_eq!(path_loss(10.0, 2.0, 0.0, 1.0).unwrap(), 1e-2, max_relative = 1e-12);
    }

    #[test]
    fn nonpositive_distance_rejected() {
        assert!(matches!(path_loss(0.0, 2.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss(-3.0, 2.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss(3.0, 2.0, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn circumscribing_circle() {
        let r = ScenarioConfig::default().ue_region;
        assert_eq!(r.center(), [1000.0, 1000.0]);
        assert_relative_eq!(r.circumradius(), 200f64.hypot(200.0) / 2.0);
        assert_relative_eq!(r.circumradius(), 141.42135623730951, max_relative = 1e-12);
    }

    #[test]
    fn single_irs_sits_at_arc_midpoint() {
        let r = ScenarioConfig::default().ue_region;
        let p = place_irs_semicircle(1, &r).unwrap();
        assert_eq!(p.len(), 1);
        // Midpoint faces the origin: (1000 - 100, 1000 - 100).
        assert_relative_eq!(p[0][0], 900.0, epsilon = 1e-9);
        assert_relative_eq!(p[0][1], 900.0, epsilon = 1e-9);
    }

    #[test]
    fn four_irs_layout() {
        let r = ScenarioConfig::default().ue_region;
        let p = place_irs_semicircle(4, &r).unwrap();
        let radius = r.circumradius();
        // Endpoints lie on the diagonal x - y = const through the center.
        assert_relative_eq!(p[0][0], 1000.0 - radius / 2f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(p[0][1], 1000.0 + radius / 2f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(p[3][0], 1000.0 + radius / 2f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(p[3][1], 1000.0 - radius / 2f64.sqrt(), epsilon = 1e-9);
        // Symmetric about the line y = x, all on the near side of the center.
        assert_relative_eq!(p[1][0], p[2][1], epsilon = 1e-9);
        assert_relative_eq!(p[1][1], p[2][0], epsilon = 1e-9);
        for q in &p {
            assert!(q[0] + q[1] <= 2000.0 + 1e-9);
        }
    }

    #[test]
    fn degenerate_region_rejected() {
        let r = Rect { x_min: 1.0, x_max: 1.0, y_min: 0.0, y_max: 2.0 };
        assert!(place_irs_semicircle(3, &r).is_err());
        assert!(place_irs_semicircle(0, &ScenarioConfig::default().ue_region).is_err());
    }

    #[test]
    fn normalized_topology_is_all_ones() {
        let cfg = ScenarioConfig { normalize_pathloss: true, ..Default::default() };
        let t = Topology::from_config(&cfg).unwrap();
        for l in t.inband_links().iter().chain(&t.oob_links()) {
            assert_eq!(*l, LinkBetas::UNIT);
        }
    }

    #[test]
    fn default_topology_shape_and_determinism() {
        let cfg = ScenarioConfig::default();
        let a = Topology::from_config(&cfg).unwrap();
        let b = Topology::from_config(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ue_positions_x.len(), 10);
        assert_eq!(a.ue_positions_y.len(), 10);
        assert_eq!(a.irs_positions.len(), cfg.num_irs);
        let r = cfg.ue_region;
        for p in a.ue_positions_x.iter().chain(&a.ue_positions_y) {
            assert!(p[0] >= r.x_min && p[0] < r.x_max && p[1] >= r.y_min && p[1] < r.y_max);
        }
        for l in a.inband_links().iter().chain(&a.oob_links()) {
            assert!(l.beta_d > 0.0 && l.beta_f > 0.0 && l.beta_g > 0.0);
            // The 4.5 exponent on the long direct link makes it far weaker
            // than either single hop.
            assert!(l.beta_d < l.beta_f && l.beta_d < l.beta_g);
        }
        let other = Topology::from_config(&ScenarioConfig { master_seed: 99, ..cfg }).unwrap();
        assert_ne!(a.ue_positions_x, other.ue_positions_x);
    }

    #[test]
    fn exponents_follow_link_type() {
        let cfg = ScenarioConfig { num_irs: 1, ..Default::default() };
        let t = Topology::from_config(&cfg).unwrap();
        let irs = t.irs_positions[0];
        let ue = t.ue_positions_x[0];
        assert_relative_eq!(t.beta_f[0], distance(cfg.bs_x_pos, irs).powf(-2.0), max_relative = 1e-12);
        assert_relative_eq!(t.beta_g_x[0], distance(ue, irs).powf(-2.2), max_relative = 1e-12);
        assert_relative_eq!(t.beta_direct_x[0], distance(cfg.bs_x_pos, ue).powf(-4.5), max_relative = 1e-12);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_fields() {
        let mut v = serde_json::to_value(ScenarioConfig::default()).unwrap();
        assert!(ScenarioConfig::from_json_str(&v.to_string()).is_ok());
        v["extra"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json_str(&v.to_string()).is_err());

        let mut v = serde_json::to_value(ScenarioConfig::default()).unwrap();
        v["elements_per_irs"] = serde_json::json!(0);
        match ScenarioConfig::from_json_str(&v.to_string()) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "elements_per_irs"),
            other => panic!("expected config error, got {other:?}"),
        }
        let bad = ScenarioConfig { alpha_irs_ue: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn path_loss_decreasing_and_multiplicative(
            d1 in 1.0f64..1e3, d2 in 1.0f64..1e3, alpha in 0.5f64..5.0,
        ) {
            let pl = |d| path_loss(d, alpha, 0.0, 1.0).unwrap();
            prop_assert!(pl(d1) > pl(d1 * 1.01));
            let lhs = pl(d1 * d2);
            let rhs = pl(d1) * pl(d2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE) + 1e-300);
        }

        #[test]
        fn semicircle_points_equidistant(count in 1usize..64, w in 1.0f64..500.0, h in 1.0f64..500.0) {
            let r = Rect { x_min: 100.0, x_max: 100.0 + w, y_min: 200.0, y_max: 200.0 + h };
            let c = r.center();
            let radius = r.circumradius();
            for p in place_irs_semicircle(count, &r).unwrap() {
                prop_assert!((distance(p, c) - radius).abs() <= 1e-9 * radius);
            }
        }
    }
}
