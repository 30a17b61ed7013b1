//! Guided sampling of yarn parameter configurations.
//!
//! Fiber thickness, ply count and fiber count are drawn directly. Ply radii,
//! ply-helix radius and both pitches are derived from auxiliary variables
//! (ply squeeze ratio, fiber and ply packing densities, helix angles). A
//! configuration whose derived values leave the database label ranges is
//! redrawn as a whole.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::params::{FlyawayParams, RawYarnParams, YarnParams};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        rng.draw_in(self.lo, self.hi)
    }
}

pub const T_Y_SAMPLING: Interval = Interval::new(0.006, 0.01);
pub const N_SAMPLING: (u32, u32) = (2, 6);
pub const M_SAMPLING: (u32, u32) = (40, 200);
pub const AREA_FRAC_PLY: Interval = Interval::new(0.035, 0.215);
pub const AREA_FRAC_YARN: Interval = Interval::new(0.55, 0.82);
/// Helix angle range in degrees, shared by fiber and ply twist.
pub const HELIX_ANGLE_DEG: Interval = Interval::new(50.0, 80.0);
/// Tolerance on recomputed helix angles, radians.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

/// Ply squeeze ratio `r_y / r_x` range for `n` plies.
pub fn r_frac_interval(n: u32) -> Interval {
    match n {
        0..=2 => Interval::new(0.67, 0.9),
        3 => Interval::new(0.72, 0.91),
        _ => Interval::new(0.85, 0.95),
    }
}

/// Label ranges of the parameter database.
pub mod table {
    use super::Interval;

    pub const M: Interval = Interval::new(20.0, 200.0);
    // t_x and t_y rows are swapped relative to their printed labels; these
    // are the ranges consistent with t_y <= t_x <= 2.5 t_y.
    pub const T_X: Interval = Interval::new(0.006, 0.02);
    pub const T_Y: Interval = Interval::new(0.006, 0.01);
    pub const ALPHA: Interval = Interval::new(-25.778, -0.476);
    pub const N: Interval = Interval::new(2.0, 6.0);
    pub const R_X: Interval = Interval::new(0.029, 0.789);
    pub const R_Y: Interval = Interval::new(0.042, 0.830);
    pub const ALPHA_PLY: Interval = Interval::new(0.639, 31.655);
    pub const R_PLY: Interval = Interval::new(0.053, 1.486);
    pub const J: Interval = Interval::new(0.0, 0.3);
    pub const J_XY: Interval = Interval::new(0.0, 0.03);
    pub const G: Interval = Interval::new(30.0, 300.0);
    pub const P: Interval = Interval::new(0.35, 0.65);
    pub const BETA: Interval = Interval::new(0.050, 1.571);
    pub const L_HAIR: Interval = Interval::new(0.222, 14.5);
    pub const S: Interval = Interval::new(0.0, 1.0);
    pub const L_LOOP: Interval = Interval::new(0.407, 34.627);
    pub const D_MEAN: Interval = Interval::new(0.394, 30.469);
    pub const D_STD: Interval = Interval::new(0.007, 5.0);
}

/// Auxiliary variables behind a sampled raw yarn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxSample {
    pub r_frac: f64,
    pub area_frac_ply: f64,
    pub area_frac_yarn: f64,
    /// Fiber helix angle, radians.
    pub gamma: f64,
    /// Ply helix angle, radians.
    pub gamma_ply: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawYarnSample {
    pub params: RawYarnParams,
    pub aux: AuxSample,
    /// Configurations rejected before this one.
    pub rejected: u32,
}

/// Base-line vertex spacing used by sampled yarns.
pub const DEFAULT_VERTEX_SPACING: f64 = 0.02;

pub fn ply_radius_x(m: u32, t_x: f64, t_y: f64, area_frac_ply: f64, r_frac: f64) -> f64 {
    (m as f64 * t_x * t_y / (area_frac_ply * r_frac)).sqrt()
}

/// Ply-helix radius from the ply packing density in the yarn.
pub fn yarn_helix_radius(n: u32, r_x: f64, r_frac: f64, area_frac_yarn: f64, gamma_ply: f64) -> f64 {
    let k = r_x / gamma_ply.sin();
    (n as f64 * r_frac * k * k / area_frac_yarn).sqrt() - r_frac * k
}

pub fn ply_pitch(r_ply: f64, gamma_ply: f64) -> f64 {
    TAU * r_ply * gamma_ply.tan()
}

pub fn fiber_pitch(r_x: f64, gamma: f64) -> f64 {
    -TAU * r_x * gamma.tan()
}

/// Helix angle of the fiber twist recovered from `(alpha, r_x)`.
pub fn recover_gamma(alpha: f64, r_x: f64) -> f64 {
    (-alpha / (TAU * r_x)).atan()
}

/// Helix angle of the ply twist recovered from `(alpha_ply, R_ply)`.
pub fn recover_gamma_ply(alpha_ply: f64, r_ply: f64) -> f64 {
    (alpha_ply / (TAU * r_ply)).atan()
}

fn within_table(p: &RawYarnParams) -> bool {
    table::T_X.contains(p.t_x)
        && table::T_Y.contains(p.t_y)
        && table::ALPHA.contains(p.alpha)
        && table::R_X.contains(p.r_x)
        && table::R_Y.contains(p.r_y)
        && table::ALPHA_PLY.contains(p.alpha_ply)
        && table::R_PLY.contains(p.r_ply)
}

pub fn sample_raw_yarn(rng: &mut RngStream) -> RawYarnSample {
    let mut rejected = 0;
    // roughly nine in ten draws are accepted
    loop {
        let t_y = T_Y_SAMPLING.draw(rng);
        let t_x = rng.draw_in(t_y, 2.5 * t_y);
        let n = rng.draw_int(N_SAMPLING.0, N_SAMPLING.1);
        let m = rng.draw_int(M_SAMPLING.0, M_SAMPLING.1);
        let r_frac = r_frac_interval(n).draw(rng);
        let area_frac_ply = AREA_FRAC_PLY.draw(rng);
        let area_frac_yarn = AREA_FRAC_YARN.draw(rng);
        let gamma = HELIX_ANGLE_DEG.draw(rng).to_radians();
        let gamma_ply = HELIX_ANGLE_DEG.draw(rng).to_radians();
        let j = table::J.draw(rng);
        let j_xy = table::J_XY.draw(rng);

        let r_x = ply_radius_x(m, t_x, t_y, area_frac_ply, r_frac);
        let r_y = r_frac * r_x;
        let r_ply = yarn_helix_radius(n, r_x, r_frac, area_frac_yarn, gamma_ply);
        let params = RawYarnParams {
            m,
            t_x,
            t_y,
            alpha: fiber_pitch(r_x, gamma),
            n,
            r_x,
            r_y,
            alpha_ply: ply_pitch(r_ply, gamma_ply),
            r_ply,
            j_xy,
            j,
            j_z: 0.0,
            alpha_f: DEFAULT_VERTEX_SPACING,
        };
        if within_table(&params) {
            return RawYarnSample {
                params,
                aux: AuxSample {
                    r_frac,
                    area_frac_ply,
                    area_frac_yarn,
                    gamma,
                    gamma_ply,
                },
                rejected,
            };
        }
        rejected += 1;
    }
}

pub fn sample_flyaway(rng: &mut RngStream) -> FlyawayParams {
    let g = rng.draw_int(table::G.lo as u32, table::G.hi as u32);
    FlyawayParams {
        g,
        p: table::P.draw(rng),
        beta: table::BETA.draw(rng),
        l_hair: table::L_HAIR.draw(rng),
        s: table::S.draw(rng),
        l_loop: table::L_LOOP.draw(rng),
        d_mean: table::D_MEAN.draw(rng),
        d_std: table::D_STD.draw(rng),
    }
}

/// Raw yarn then flyaway parameters from one stream.
pub fn sample_yarn(rng: &mut RngStream) -> (YarnParams, AuxSample) {
    let raw = sample_raw_yarn(rng);
    let fly = sample_flyaway(rng);
    (YarnParams { raw: raw.params, fly }, raw.aux)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub parameter: String,
    pub value: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// Fiber helix angle recomputed from `alpha` and `r_x`, radians.
    pub gamma: f64,
    /// Ply helix angle recomputed from `alpha_ply` and `R_ply`, radians.
    pub gamma_ply: f64,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(params: &YarnParams) -> ValidityReport {
    let raw = &params.raw;
    let fly = &params.fly;
    let mut violations = Vec::new();
    let mut check = |name: &str, value: f64, range: Interval| {
        if !range.contains(value) {
            violations.push(Violation {
                parameter: name.to_string(),
                value,
                message: format!("outside [{}, {}]", range.lo, range.hi),
            });
        }
    };
    check("m", raw.m as f64, table::M);
    check("t_x", raw.t_x, table::T_X);
    check("t_y", raw.t_y, table::T_Y);
    check("alpha", raw.alpha, table::ALPHA);
    check("n", raw.n as f64, table::N);
    check("r_x", raw.r_x, table::R_X);
    check("r_y", raw.r_y, table::R_Y);
    check("alpha_ply", raw.alpha_ply, table::ALPHA_PLY);
    check("R_ply", raw.r_ply, table::R_PLY);
    check("j", raw.j, table::J);
    check("j_xy", raw.j_xy, table::J_XY);
    check("g", fly.g as f64, table::G);
    check("p", fly.p, table::P);
    check("beta", fly.beta, table::BETA);
    check("l_hair", fly.l_hair, table::L_HAIR);
    check("s", fly.s, table::S);
    check("l_loop", fly.l_loop, table::L_LOOP);
    check("d_mean", fly.d_mean, table::D_MEAN);
    check("d_std", fly.d_std, table::D_STD);

    let gamma = recover_gamma(raw.alpha, raw.r_x);
    let gamma_ply = recover_gamma_ply(raw.alpha_ply, raw.r_ply);
    let angles = Interval::new(
        HELIX_ANGLE_DEG.lo.to_radians() - ANGLE_TOLERANCE,
        HELIX_ANGLE_DEG.hi.to_radians() + ANGLE_TOLERANCE,
    );
    check("gamma", gamma, angles);
    check("gamma_ply", gamma_ply, angles);

    if !(raw.alpha < 0.0) {
        violations.push(Violation {
            parameter: "alpha".into(),
            value: raw.alpha,
            message: "fiber twist must be negative".into(),
        });
    }
    if !(raw.alpha_ply > 0.0) {
        violations.push(Violation {
            parameter: "alpha_ply".into(),
            value: raw.alpha_ply,
            message: "ply twist must be positive".into(),
        });
    }
    if !(raw.t_x >= raw.t_y && raw.t_y > 0.0) {
        violations.push(Violation {
            parameter: "t_x".into(),
            value: raw.t_x,
            message: "fiber radii must satisfy t_x >= t_y > 0".into(),
        });
    }
    ValidityReport {
        gamma,
        gamma_ply,
        violations,
    }
}
