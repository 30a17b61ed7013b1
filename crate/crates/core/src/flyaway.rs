//! Hair and loop flyaways copied out of the raw yarn.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit};

use crate::error::{Error, Result};
use crate::params::FlyawayParams;
use crate::polyline::{PolyLineSet, Strip, Vec3, TAG_HAIR, TAG_LOOP};
use crate::rng::RngStream;

/// Rejection-sampling budget per flyaway before it is skipped.
pub const MAX_SEGMENT_ATTEMPTS: usize = 64;
/// Standard deviation of loop lengths.
pub const LOOP_LENGTH_STD: f64 = 0.01;
/// Standard deviation of hair lengths.
pub const HAIR_LENGTH_STD: f64 = 0.05;
const MAX_LENGTH_REDRAWS: usize = 64;

/// A contiguous vertex chain copied from a raw strip, in walk order.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub strip: usize,
    /// Index of the first copied vertex in the source strip.
    pub start: usize,
    pub forward: bool,
    pub vertices: Vec<Vec3>,
}

impl Segment {
    /// Smallest source index covered by the segment.
    pub fn low_index(&self) -> usize {
        if self.forward {
            self.start
        } else {
            self.start + 1 - self.vertices.len()
        }
    }
}

/// Pick a uniformly random vertex of a non-flyaway strip, walk in a random
/// direction until `target_length` of arc is covered, and retry from a new
/// vertex when the strip ends first.
pub fn select_segment(
    yarn: &PolyLineSet,
    target_length: f64,
    rng: &mut RngStream,
    max_attempts: usize,
) -> Result<Segment> {
    if !(target_length > 0.0) {
        return Err(Error::invalid("segment length must be positive"));
    }
    let sources: Vec<(usize, &Strip)> = yarn
        .strips
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_flyaway() && s.len() >= 2)
        .collect();
    let total: usize = sources.iter().map(|(_, s)| s.len()).sum();
    if total == 0 {
        return Err(Error::invalid("yarn has no strips to copy flyaways from"));
    }
    for _ in 0..max_attempts {
        let mut pick = rng.draw_index(total);
        let forward = rng.draw_uniform() < 0.5;
        let (strip_idx, strip) = sources
            .iter()
            .find(|(_, s)| {
                if pick < s.len() {
                    true
                } else {
                    pick -= s.len();
                    false
                }
            })
            .copied()
            .expect("pick is below the vertex total");
        if let Some(vertices) = walk(&strip.vertices, pick, forward, target_length) {
            return Ok(Segment {
                strip: strip_idx,
                start: pick,
                forward,
                vertices,
            });
        }
    }
    Err(Error::SegmentNotFound {
        target: target_length,
        attempts: max_attempts,
    })
}

fn walk(vertices: &[Vec3], start: usize, forward: bool, target: f64) -> Option<Vec<Vec3>> {
    let mut out = vec![vertices[start]];
    let mut covered = 0.0;
    let mut k = start;
    while covered < target {
        let next = if forward {
            (k + 1 < vertices.len()).then_some(k + 1)?
        } else {
            k.checked_sub(1)?
        };
        covered += (vertices[next] - vertices[k]).norm();
        out.push(vertices[next]);
        k = next;
    }
    Some(out)
}

/// Push the segment outward along half a sine period; `d` is drawn once.
pub fn make_loop(segment: &[Vec3], d_mean: f64, d_std: f64, rng: &mut RngStream) -> Result<Vec<Vec3>> {
    if segment.len() < 3 {
        return Err(Error::invalid("a loop needs at least three vertices"));
    }
    let d = d_mean + d_std * rng.draw_normal();
    Ok(loop_offset(segment, d))
}

/// Loop offset with a fixed amplitude.
pub fn loop_offset(segment: &[Vec3], d: f64) -> Vec<Vec3> {
    let j = (segment.len() - 1) as f64;
    let last = segment.len() - 1;
    segment
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i == 0 || i == last {
                return *v;
            }
            let w = d * (i as f64 * PI / j).sin();
            Vec3::new(v.x + w * v.x, v.y + w * v.y, v.z)
        })
        .collect()
}

/// Vertical squeeze factor for squeeze `s`.
pub fn squeeze_factor(s: f64) -> f64 {
    1.0 / (1.0 + s)
}

/// Squeeze the segment vertically about its lowest vertex, then tilt it by
/// `beta` outward from the yarn axis around that vertex.
pub fn make_hair(segment: &[Vec3], beta: f64, s: f64) -> Vec<Vec3> {
    let Some(low_idx) = lowest_vertex(segment) else {
        return Vec::new();
    };
    let low = segment[low_idx];
    let k = squeeze_factor(s);
    let radial = Vec3::new(low.x, low.y, 0.0);
    let radial = if radial.norm() > 1e-12 {
        radial.normalize()
    } else {
        Vec3::x()
    };
    let axis = Unit::new_normalize(Vec3::z().cross(&radial));
    let rot = Rotation3::from_axis_angle(&axis, beta);
    segment
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i == low_idx {
                return low;
            }
            let local = Vec3::new(v.x - low.x, v.y - low.y, (v.z - low.z) * k);
            low + rot * local
        })
        .collect()
}

fn lowest_vertex(segment: &[Vec3]) -> Option<usize> {
    segment
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.z.total_cmp(&b.1.z))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FlyawayReport {
    pub loops: usize,
    pub hairs: usize,
    /// Flyaways dropped because no long-enough segment was found.
    pub skipped: usize,
}

fn draw_length(mean: f64, std: f64, rng: &mut RngStream) -> f64 {
    for _ in 0..MAX_LENGTH_REDRAWS {
        let l = mean + std * rng.draw_normal();
        if l > 0.0 {
            return l;
        }
    }
    mean.max(std).max(f64::MIN_POSITIVE)
}

/// Append `g` flyaway strips to `yarn`; source strips are left unchanged.
pub fn add_flyaways(
    yarn: &PolyLineSet,
    params: &FlyawayParams,
    rng: &mut RngStream,
) -> Result<(PolyLineSet, FlyawayReport)> {
    params.check()?;
    let mut out = yarn.clone();
    let mut report = FlyawayReport::default();
    for _ in 0..params.g {
        let is_loop = rng.draw_uniform() < params.p;
        let length = if is_loop {
            draw_length(params.l_loop, LOOP_LENGTH_STD, rng)
        } else {
            draw_length(params.l_hair, HAIR_LENGTH_STD, rng)
        };
        let segment = match select_segment(yarn, length, rng, MAX_SEGMENT_ATTEMPTS) {
            Ok(seg) => seg,
            Err(Error::SegmentNotFound { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if is_loop {
            match make_loop(&segment.vertices, params.d_mean, params.d_std, rng) {
                Ok(v) => {
                    out.push(Strip::new(TAG_LOOP, v));
                    report.loops += 1;
                }
                Err(_) => report.skipped += 1,
            }
        } else {
            out.push(Strip::new(TAG_HAIR, make_hair(&segment.vertices, params.beta, params.s)));
            report.hairs += 1;
        }
    }
    Ok((out, report))
}
