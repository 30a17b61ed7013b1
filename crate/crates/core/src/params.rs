//! Yarn and flyaway parameter records.
//!
//! Serialized field names are the parameter symbols (`alpha_ply`, `R_ply`,
//! `l_hair`, ...) so annotation files read like the parameter table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{LevelSpec, PlacementMode};

/// Raw yarn parameters of the three-level fiber/ply/yarn model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawYarnParams {
    /// Fibers per ply.
    pub m: u32,
    pub t_x: f64,
    pub t_y: f64,
    /// Pitch of the fiber helix inside a ply (negative).
    pub alpha: f64,
    /// Plies per yarn.
    pub n: u32,
    pub r_x: f64,
    pub r_y: f64,
    /// Pitch of the ply helix inside the yarn (positive).
    pub alpha_ply: f64,
    #[serde(rename = "R_ply")]
    pub r_ply: f64,
    pub j_xy: f64,
    /// Radial migration jitter.
    pub j: f64,
    pub j_z: f64,
    /// Distance between consecutive base-line vertices.
    pub alpha_f: f64,
}

impl RawYarnParams {
    pub fn r_frac(&self) -> f64 {
        self.r_y / self.r_x
    }

    /// Fiber level then ply level.
    pub fn level_specs(&self, helix_resolution: u32) -> Result<Vec<LevelSpec>> {
        if self.m < 1 || self.n < 1 {
            return Err(Error::invalid("fiber and ply counts must be at least 1"));
        }
        if !(self.r_x > 0.0 && self.r_y > 0.0 && self.r_y <= self.r_x) {
            return Err(Error::invalid(format!(
                "ply radii must satisfy 0 < r_y <= r_x, got r_x={} r_y={}",
                self.r_x, self.r_y
            )));
        }
        let fibers = LevelSpec {
            instance_count: self.m as usize,
            placement_radius: self.r_x,
            jitter_xy: self.j_xy,
            jitter_z: self.j_z,
            pitch: self.alpha,
            helix_resolution,
            ellipse_scale: 1.0,
            migration: self.j,
            placement: PlacementMode::Disc,
        };
        let plies = LevelSpec {
            instance_count: self.n as usize,
            placement_radius: self.r_ply,
            jitter_xy: 0.0,
            jitter_z: 0.0,
            pitch: self.alpha_ply,
            helix_resolution,
            ellipse_scale: self.r_frac(),
            migration: 0.0,
            placement: PlacementMode::SmallCircle,
        };
        Ok(vec![fibers, plies])
    }

    /// Largest radial extent of the raw yarn without migration or jitter.
    pub fn outer_radius(&self) -> f64 {
        self.r_ply + self.r_x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlyawayParams {
    /// Number of flyaways.
    pub g: u32,
    /// Loop probability.
    pub p: f64,
    /// Hair tilt angle, radians.
    pub beta: f64,
    pub l_hair: f64,
    /// Squeeze.
    pub s: f64,
    pub l_loop: f64,
    pub d_mean: f64,
    pub d_std: f64,
}

impl FlyawayParams {
    pub fn none() -> Self {
        Self {
            g: 0,
            p: 0.5,
            beta: 0.0,
            l_hair: 1.0,
            s: 0.0,
            l_loop: 1.0,
            d_mean: 0.0,
            d_std: 0.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("loop probability {} outside [0, 1]", self.p)));
        }
        let lengths = [self.l_hair, self.l_loop, self.d_std];
        if lengths.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::invalid("flyaway lengths must be non-negative"));
        }
        if !self.s.is_finite() || self.s < 0.0 {
            return Err(Error::invalid("squeeze must be non-negative"));
        }
        Ok(())
    }
}

/// Geometry settings that are not learnable parameters but are needed to
/// rebuild a sample bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Hierarchy depth counting the straight fiber line: 3 is fiber/ply/yarn.
    pub levels: u32,
    pub helix_resolution: u32,
    pub total_length: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            helix_resolution: 64,
            total_length: 20.0,
        }
    }
}

/// Instances twisted together at every level beyond the yarn.
pub const OUTER_INSTANCE_COUNT: usize = 3;

/// Level specs for `config.levels`; levels beyond the sampled yarn twist
/// three copies of the level below in the opposite direction.
pub fn level_specs(raw: &RawYarnParams, config: &BuildConfig) -> Result<Vec<LevelSpec>> {
    if config.levels < 2 {
        return Err(Error::invalid("a yarn needs at least two levels"));
    }
    let mut specs = raw.level_specs(config.helix_resolution)?;
    if config.levels == 2 {
        specs.truncate(1);
    }
    let mut radius = raw.outer_radius();
    let mut pitch = raw.alpha_ply;
    while specs.len() + 1 < config.levels as usize {
        // three tangent circles of radius `radius` sit 2r/sqrt(3) from the center
        let placement = 2.0 * radius / 3f64.sqrt();
        pitch *= -2.0;
        specs.push(LevelSpec {
            instance_count: OUTER_INSTANCE_COUNT,
            placement_radius: placement,
            jitter_xy: 0.0,
            jitter_z: 0.0,
            pitch,
            helix_resolution: config.helix_resolution,
            ellipse_scale: 1.0,
            migration: 0.0,
            placement: PlacementMode::SmallCircle,
        });
        radius += placement;
    }
    Ok(specs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YarnParams {
    pub raw: RawYarnParams,
    pub fly: FlyawayParams,
}
