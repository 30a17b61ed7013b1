//! Summary statistics of a curve set.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::polyline::PolyLineSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub strips: usize,
    pub vertices: usize,
    /// Strip count per level tag.
    pub per_level: BTreeMap<u32, usize>,
    pub length_min: f64,
    pub length_mean: f64,
    pub length_max: f64,
    pub bbox_min: [f64; 3],
    pub bbox_max: [f64; 3],
    /// Largest distance from the z axis over non-flyaway strips.
    pub raw_radius: f64,
}

pub fn summarize(set: &PolyLineSet) -> CurveSummary {
    let mut per_level = BTreeMap::new();
    for s in &set.strips {
        *per_level.entry(s.level).or_insert(0) += 1;
    }
    let lengths: Vec<f64> = set.strips.iter().map(|s| s.arc_length()).collect();
    let (length_min, length_mean, length_max) = if lengths.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (
            lengths.iter().copied().fold(f64::INFINITY, f64::min),
            lengths.iter().sum::<f64>() / lengths.len() as f64,
            lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let (bbox_min, bbox_max) = set
        .bounds()
        .map(|(lo, hi)| ([lo.x, lo.y, lo.z], [hi.x, hi.y, hi.z]))
        .unwrap_or(([0.0; 3], [0.0; 3]));
    let raw_radius = set
        .strips
        .iter()
        .filter(|s| !s.is_flyaway())
        .flat_map(|s| s.vertices.iter())
        .map(|v| v.xy().norm())
        .fold(0.0, f64::max);
    CurveSummary {
        strips: set.len(),
        vertices: set.vertex_count(),
        per_level,
        length_min,
        length_mean,
        length_max,
        bbox_min,
        bbox_max,
        raw_radius,
    }
}
