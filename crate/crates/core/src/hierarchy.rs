//! Raw yarn construction by recursive hierarchical twisting.
//!
//! Level 0 is a straight polygonal line along +z. Each further level places
//! `N` copies of the previous level's output on a 2D pattern, squashes them
//! into an elliptical cross-section, turns the squashed axis toward the
//! center, and lets every copy follow a helix through its placement point.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::polyline::{PolyLineSet, Strip, Vec3};
use crate::rng::RngStream;

pub type Vec2 = Vector2<f64>;

/// Angular increment of the disc placement pattern, in turns.
pub const DISC_ANGLE_STEP: f64 = 0.137;
/// Radial exponent of the disc placement pattern.
pub const DISC_RADIAL_EXPONENT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    /// Regular pattern on a circle, for a handful of instances.
    SmallCircle,
    /// Sunflower-like fill of a disc, sparser toward the center.
    Disc,
}

/// Twist geometry of one hierarchy level.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LevelSpec {
    pub instance_count: usize,
    pub placement_radius: f64,
    pub jitter_xy: f64,
    pub jitter_z: f64,
    /// Height of one helix turn; the sign selects the twist direction.
    pub pitch: f64,
    /// Helix vertices per turn.
    pub helix_resolution: u32,
    /// Scale applied to the template's x axis, in `(0, 1]`.
    pub ellipse_scale: f64,
    /// Radial migration jitter; 0 disables migration.
    pub migration: f64,
    pub placement: PlacementMode,
}

impl LevelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.instance_count < 1 {
            return Err(Error::invalid("instance count must be at least 1"));
        }
        if self.helix_resolution < 3 {
            return Err(Error::invalid("helix resolution must be at least 3"));
        }
        if !(self.placement_radius >= 0.0) {
            return Err(Error::invalid("placement radius must be non-negative"));
        }
        if !(self.ellipse_scale > 0.0 && self.ellipse_scale <= 1.0) {
            return Err(Error::invalid(format!(
                "ellipse scale {} outside (0, 1]",
                self.ellipse_scale
            )));
        }
        if !(self.pitch != 0.0 && self.pitch.is_finite()) {
            return Err(Error::invalid("pitch must be finite and non-zero"));
        }
        if !(self.jitter_xy >= 0.0 && self.jitter_z >= 0.0 && self.migration >= 0.0) {
            return Err(Error::invalid("jitter and migration must be non-negative"));
        }
        Ok(())
    }

    pub fn place(&self, rng: &mut RngStream) -> Result<Vec<Vec2>> {
        match self.placement {
            PlacementMode::SmallCircle => {
                place_instances_small(self.instance_count, self.placement_radius, self.jitter_xy, rng)
            }
            PlacementMode::Disc => {
                place_instances_large(self.instance_count, self.placement_radius, self.jitter_xy, rng)
            }
        }
    }
}

/// Straight line `v_i = (0, 0, i * spacing)` covering `total_length`.
pub fn build_level_zero(total_length: f64, spacing: f64) -> Result<PolyLineSet> {
    if !(total_length > 0.0) || !(spacing > 0.0) {
        return Err(Error::invalid(format!(
            "level zero needs positive length and spacing, got {total_length} and {spacing}"
        )));
    }
    let count = (total_length / spacing).floor() as usize + 1;
    if count < 2 {
        return Err(Error::invalid("vertex spacing exceeds total length"));
    }
    let vertices = (0..count)
        .map(|i| Vec3::new(0.0, 0.0, i as f64 * spacing))
        .collect();
    Ok(PolyLineSet::from_strips(vec![Strip::new(0, vertices)]))
}

pub fn place_instances_small(n: usize, radius: f64, jitter: f64, rng: &mut RngStream) -> Result<Vec<Vec2>> {
    if n == 0 {
        return Err(Error::invalid("instance count must be at least 1"));
    }
    Ok((0..n)
        .map(|i| {
            let theta = TAU * i as f64 / n as f64;
            let j = jitter * rng.draw_normal();
            Vec2::new(radius * theta.sin() + j, radius * theta.cos() + j)
        })
        .collect())
}

/// Disc pattern with `i` running over `1..=n`, so the last sample sits on the rim.
pub fn place_instances_large(n: usize, radius: f64, jitter: f64, rng: &mut RngStream) -> Result<Vec<Vec2>> {
    if n == 0 {
        return Err(Error::invalid("instance count must be at least 1"));
    }
    Ok((1..=n)
        .map(|i| {
            let (r, theta) = disc_polar(i, n, radius);
            let j = jitter * rng.draw_normal();
            Vec2::new(r * theta.sin() + j, r * theta.cos() + j)
        })
        .collect())
}

/// Polar coordinates of the `i`-th disc sample before jitter.
pub fn disc_polar(i: usize, n: usize, radius: f64) -> (f64, f64) {
    let r = radius * (i as f64 / n as f64).powf(DISC_RADIAL_EXPONENT);
    let theta = TAU * DISC_ANGLE_STEP * i as f64;
    (r, theta)
}

/// Per-helix random draws driving the radial migration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Migration {
    pub amplitude: f64,
    pub offset: f64,
    pub frequency: f64,
}

impl Migration {
    /// Draws amplitude, offset and frequency in that order; `jitter` scales the amplitude.
    pub fn draw(jitter: f64, rng: &mut RngStream) -> Self {
        let amplitude = jitter * rng.draw_normal();
        let offset = rng.draw_normal();
        let frequency = rng.draw_normal();
        Self {
            amplitude,
            offset,
            frequency,
        }
    }

    pub fn scale(&self, i: f64, resolution: u32) -> f64 {
        migration_scale(i, resolution, self.amplitude, self.offset, self.frequency)
    }
}

/// Radius modulation `1 + max(0, amp) * cos(2 off + (i / H) 2 pi freq)`.
pub fn migration_scale(i: f64, resolution: u32, amplitude: f64, offset: f64, frequency: f64) -> f64 {
    let a = amplitude.max(0.0);
    if a == 0.0 {
        return 1.0;
    }
    1.0 + a * (2.0 * offset + i / resolution as f64 * TAU * frequency).cos()
}

/// Helix center line through a placement point.
///
/// Vertices are stored in ascending height. For a negative pitch the helix
/// formula is evaluated at index `-n` for stored vertex `n`, which reverses
/// the winding direction while keeping the curve on the `+z` side.
#[derive(Debug, Clone, PartialEq)]
pub struct Helix {
    pub vertices: Vec<Vec3>,
    pub pitch: f64,
    pub resolution: u32,
    pub migration: Migration,
}

impl Helix {
    /// Signed formula index of stored vertex `n`.
    pub fn formula_index(&self, n: usize) -> f64 {
        n as f64 * self.pitch.signum()
    }

    /// Fractional vertex index corresponding to height `z` on an unjittered helix.
    pub fn index_at_height(&self, z: f64) -> f64 {
        z * self.resolution as f64 / self.pitch.abs()
    }

    pub fn to_strip(&self, level: u32) -> Strip {
        Strip::new(level, self.vertices.clone())
    }

    fn tangents(&self) -> Result<Vec<Vec3>> {
        let v = &self.vertices;
        let last = v.len() - 1;
        (0..v.len())
            .map(|k| {
                let d = match k {
                    0 => v[1] - v[0],
                    k if k == last => v[last] - v[last - 1],
                    k => v[k + 1] - v[k - 1],
                };
                let len = d.norm();
                if len < 1e-14 || !len.is_finite() {
                    Err(Error::DegenerateTangent(k))
                } else {
                    Ok(d / len)
                }
            })
            .collect()
    }
}

/// Moving frame `(normal, binormal)` for a unit tangent.
///
/// The normal is the global x axis with its tangential component removed,
/// falling back to the global y axis when x is (nearly) parallel to the tangent.
pub fn frame(tangent: &Vec3) -> (Vec3, Vec3) {
    let mut normal = Vec3::x() - tangent * tangent.x;
    if normal.norm() < 1e-9 {
        normal = Vec3::y() - tangent * tangent.y;
    }
    let normal = normal.normalize();
    (normal, tangent.cross(&normal))
}

pub fn build_helix(p: Vec2, spec: &LevelSpec, turns: f64, rng: &mut RngStream) -> Result<Helix> {
    if !(turns > 0.0) {
        return Err(Error::invalid(format!("helix turns must be positive, got {turns}")));
    }
    if spec.pitch == 0.0 || spec.helix_resolution == 0 {
        return Err(Error::invalid("helix needs non-zero pitch and resolution"));
    }
    let h = spec.helix_resolution;
    let radius = p.norm();
    let theta0 = p.x.atan2(p.y);
    let migration = Migration::draw(spec.migration, rng);
    let count = (turns * h as f64).ceil() as usize + 1;
    let sign = spec.pitch.signum();
    let vertices = (0..count)
        .map(|n| {
            let i = n as f64 * sign;
            let phase = i / h as f64;
            let theta = phase * TAU + theta0;
            let rs = radius * migration.scale(i, h);
            let z = phase * spec.pitch + spec.jitter_z * rng.draw_normal();
            Vec3::new(rs * theta.sin(), rs * theta.cos(), z)
        })
        .collect();
    Ok(Helix {
        vertices,
        pitch: spec.pitch,
        resolution: h,
        migration,
    })
}

/// Squash the template's x axis by `e`, then turn it so the squashed axis
/// lies along the radial line through `p`.
pub fn apply_ellipse_and_rotate(template: &PolyLineSet, e: f64, p: Vec2) -> PolyLineSet {
    let angle = if p.norm() > 0.0 { p.y.atan2(p.x) } else { 0.0 };
    let (s, c) = angle.sin_cos();
    let strips = template
        .strips
        .iter()
        .map(|strip| {
            let vertices = strip
                .vertices
                .iter()
                .map(|v| {
                    let x = v.x * e;
                    Vec3::new(c * x - s * v.y, s * x + c * v.y, v.z)
                })
                .collect();
            Strip::new(strip.level, vertices)
        })
        .collect();
    PolyLineSet::from_strips(strips)
}

/// Carry every template vertex into the helix's moving frame at the vertex's
/// height: the vertex z selects the point along the helix, and the vertex xy
/// becomes an offset along the frame's normal and binormal.
pub fn map_to_helix(template: &PolyLineSet, helix: &Helix) -> Result<PolyLineSet> {
    if helix.vertices.len() < 2 {
        return Err(Error::invalid("helix needs at least two vertices"));
    }
    let tangents = helix.tangents()?;
    let last = helix.vertices.len() - 2;
    let strips = template
        .strips
        .iter()
        .map(|strip| {
            let vertices = strip
                .vertices
                .iter()
                .map(|v| {
                    let t = helix.index_at_height(v.z);
                    let k = (t.floor().max(0.0) as usize).min(last);
                    let f = t - k as f64;
                    let a = helix.vertices[k];
                    let b = helix.vertices[k + 1];
                    let origin = a + (b - a) * f;
                    let fc = f.clamp(0.0, 1.0);
                    let tangent = (tangents[k] * (1.0 - fc) + tangents[k + 1] * fc).normalize();
                    let (normal, binormal) = frame(&tangent);
                    origin + normal * v.x + binormal * v.y
                })
                .collect();
            Strip::new(strip.level, vertices)
        })
        .collect();
    Ok(PolyLineSet::from_strips(strips))
}

/// Raw yarn plus the center lines of its outermost level.
#[derive(Debug, Clone)]
pub struct RawYarn {
    pub strips: PolyLineSet,
    pub center_lines: Vec<Helix>,
}

/// Build the raw yarn for `specs` ordered from the fiber level outward.
pub fn build_raw_yarn(
    specs: &[LevelSpec],
    total_length: f64,
    spacing: f64,
    rng: &mut RngStream,
) -> Result<PolyLineSet> {
    Ok(build_raw_yarn_traced(specs, total_length, spacing, rng)?.strips)
}

pub fn build_raw_yarn_traced(
    specs: &[LevelSpec],
    total_length: f64,
    spacing: f64,
    rng: &mut RngStream,
) -> Result<RawYarn> {
    if specs.is_empty() {
        return Err(Error::invalid("at least one level spec is required"));
    }
    for spec in specs {
        spec.validate()?;
    }
    let mut center_lines = Vec::new();
    let mut strips = build_level(specs, specs.len(), total_length, spacing, rng, &mut center_lines)?;
    trim_to_length(&mut strips, total_length);
    Ok(RawYarn {
        strips,
        center_lines,
    })
}

fn build_level(
    specs: &[LevelSpec],
    level: usize,
    total_length: f64,
    spacing: f64,
    rng: &mut RngStream,
    center_lines: &mut Vec<Helix>,
) -> Result<PolyLineSet> {
    if level == 0 {
        return build_level_zero(total_length, spacing);
    }
    let template = build_level(specs, level - 1, total_length, spacing, rng, center_lines)?;
    let spec = &specs[level - 1];
    let top_z = template
        .bounds()
        .map_or(total_length, |(_, hi)| hi.z.max(total_length));
    let turns = (top_z / spec.pitch.abs()).ceil().max(1.0);

    let points = spec.place(rng)?;
    let mut output = PolyLineSet::new();
    let outermost = level == specs.len();
    for p in points {
        let instance = apply_ellipse_and_rotate(&template, spec.ellipse_scale, p);
        let helix = build_helix(p, spec, turns, rng)?;
        let mapped = map_to_helix(&instance, &helix)?;
        output.strips.extend(mapped.strips.into_iter().map(|mut s| {
            s.level = level as u32;
            s
        }));
        if outermost {
            center_lines.push(helix);
        }
    }
    Ok(output)
}

/// Drop leading and trailing vertices outside `[0, total_length]` in z.
/// Strips that would keep fewer than two vertices are left untouched.
fn trim_to_length(set: &mut PolyLineSet, total_length: f64) {
    for strip in &mut set.strips {
        let v = &strip.vertices;
        let Some(first) = v.iter().position(|p| p.z >= 0.0) else {
            continue;
        };
        let Some(last) = v.iter().rposition(|p| p.z <= total_length) else {
            continue;
        };
        if last > first {
            strip.vertices.truncate(last + 1);
            strip.vertices.drain(..first);
        }
    }
}

/// Angle (radians) wound by a center line's xy projection, unwrapped.
pub fn winding_angle(vertices: &[Vec3]) -> f64 {
    vertices
        .windows(2)
        .map(|w| {
            let a = w[0].x.atan2(w[0].y);
            let b = w[1].x.atan2(w[1].y);
            let mut d = b - a;
            while d > PI {
                d -= TAU;
            }
            while d < -PI {
                d += TAU;
            }
            d
        })
        .sum()
}
