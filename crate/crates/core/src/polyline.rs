//! Vertex strips shared by every hierarchy level.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Level tag carried by hair flyaway strips.
pub const TAG_HAIR: u32 = 254;
/// Level tag carried by loop flyaway strips.
pub const TAG_LOOP: u32 = 255;

#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    /// Hierarchy level the strip was produced at, or a flyaway tag.
    pub level: u32,
    pub vertices: Vec<Vec3>,
}

impl Strip {
    pub fn new(level: u32, vertices: Vec<Vec3>) -> Self {
        Self { level, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arc_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum()
    }

    pub fn is_flyaway(&self) -> bool {
        self.level == TAG_HAIR || self.level == TAG_LOOP
    }
}

/// Ordered collection of strips.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolyLineSet {
    pub strips: Vec<Strip>,
}

impl PolyLineSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_strips(strips: Vec<Strip>) -> Self {
        Self { strips }
    }

    pub fn len(&self) -> usize {
        self.strips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strips.is_empty()
    }

    pub fn push(&mut self, strip: Strip) {
        self.strips.push(strip);
    }

    pub fn vertex_count(&self) -> usize {
        self.strips.iter().map(Strip::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vec3> {
        self.strips.iter().flat_map(|s| s.vertices.iter())
    }

    pub fn count_level(&self, level: u32) -> usize {
        self.strips.iter().filter(|s| s.level == level).count()
    }

    pub fn translate(&mut self, offset: Vec3) {
        for s in &mut self.strips {
            for v in &mut s.vertices {
                *v += offset;
            }
        }
    }

    /// Axis-aligned bounds `(min, max)`, or `None` for an empty set.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.vertices();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.inf(v), hi.sup(v))))
    }

    /// Bit-level equality, treating every coordinate by its IEEE representation.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.strips.len() == other.strips.len()
            && self.strips.iter().zip(&other.strips).all(|(a, b)| {
                a.level == b.level
                    && a.vertices.len() == b.vertices.len()
                    && a.vertices.iter().zip(&b.vertices).all(|(u, v)| {
                        u.iter().zip(v.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
                    })
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_length_and_bounds() {
        let s = Strip::new(
            0,
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 4.0, 0.0), Vec3::new(3.0, 4.0, 2.0)],
        );
        assert_eq!(s.arc_length(), 7.0);
        let set = PolyLineSet::from_strips(vec![s]);
        let (lo, hi) = set.bounds().unwrap();
        assert_eq!(lo, Vec3::new(0.0, 0.0, 0.0));
        assert_eq!(hi, Vec3::new(3.0, 4.0, 2.0));
        assert!(PolyLineSet::new().bounds().is_none());
    }
}
