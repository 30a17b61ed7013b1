//! Curve files.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! "YFC1"                      magic
//! u32                         strip count
//! per strip:
//!   u32                       level tag
//!   u32                       vertex count
//!   vertex count x 3 x f64    x, y, z
//! ```
//!
//! The text form writes one `v x y z` line per vertex, strips separated by a
//! blank line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::polyline::{PolyLineSet, Strip, Vec3};

pub const CURVE_MAGIC: &[u8; 4] = b"YFC1";

pub fn encode_curves(set: &PolyLineSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + set.len() * 8 + set.vertex_count() * 24);
    out.extend_from_slice(CURVE_MAGIC);
    out.extend_from_slice(&(set.len() as u32).to_le_bytes());
    for strip in &set.strips {
        out.extend_from_slice(&strip.level.to_le_bytes());
        out.extend_from_slice(&(strip.len() as u32).to_le_bytes());
        for v in &strip.vertices {
            for c in v.iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated curve data at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_curves(buf: &[u8]) -> Result<PolyLineSet> {
    let mut cur = Cursor { buf, pos: 0 };
    let magic = cur.take(4).map_err(|_| Error::Format("missing curve magic".into()))?;
    if magic != CURVE_MAGIC {
        return Err(Error::Format(format!("bad curve magic {magic:?}")));
    }
    let count = cur.u32()? as usize;
    let mut strips = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let level = cur.u32()?;
        let n = cur.u32()? as usize;
        if n.saturating_mul(24) > buf.len() - cur.pos {
            return Err(Error::Format(format!("truncated strip of {n} vertices")));
        }
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            vertices.push(Vec3::new(cur.f64()?, cur.f64()?, cur.f64()?));
        }
        strips.push(Strip::new(level, vertices));
    }
    if cur.pos != buf.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after curve data",
            buf.len() - cur.pos
        )));
    }
    Ok(PolyLineSet::from_strips(strips))
}

pub fn write_curves(path: &Path, set: &PolyLineSet) -> Result<()> {
    fs::write(path, encode_curves(set)).map_err(|e| Error::io(path, e))
}

pub fn read_curves(path: &Path) -> Result<PolyLineSet> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_curves(&buf)
}

/// Plain-text debug dump. Uses shortest round-trip float formatting.
pub fn curves_to_text(set: &PolyLineSet) -> String {
    let mut out = String::new();
    for (k, strip) in set.strips.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for v in &strip.vertices {
            let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
        }
    }
    out
}

/// Parse the text form; level tags are not stored there and come back as 0.
pub fn curves_from_text(text: &str) -> Result<PolyLineSet> {
    let mut set = PolyLineSet::new();
    let mut current: Vec<Vec3> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                set.push(Strip::new(0, std::mem::take(&mut current)));
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("v") {
            return Err(Error::Format(format!("line {}: expected 'v x y z'", lineno + 1)));
        }
        let mut coord = || -> Result<f64> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("line {}: bad coordinate", lineno + 1)))
        };
        current.push(Vec3::new(coord()?, coord()?, coord()?));
    }
    if !current.is_empty() {
        set.push(Strip::new(0, current));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PolyLineSet {
        PolyLineSet::from_strips(vec![
            Strip::new(2, vec![Vec3::new(0.1, -0.2, 0.0), Vec3::new(1e-300, 3.5, 1.0 / 3.0)]),
            Strip::new(255, vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0)]),
        ])
    }

    #[test]
    fn binary_layout() {
        let set = PolyLineSet::from_strips(vec![Strip::new(
            7,
            vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0)],
        )]);
        let buf = encode_curves(&set);
        assert_eq!(&buf[..4], b"YFC1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 7);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 1.0);
        assert_eq!(buf.len(), 16 + 6 * 8);
    }

    #[test]
    fn binary_round_trip() {
        let set = sample();
        assert!(decode_curves(&encode_curves(&set)).unwrap().bit_eq(&set));
        let empty = decode_curves(&encode_curves(&PolyLineSet::new())).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn corrupted_input() {
        let mut buf = encode_curves(&sample());
        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(decode_curves(truncated), Err(Error::Format(_))));
        buf[0] = b'X';
        assert!(matches!(decode_curves(&buf), Err(Error::Format(_))));
        assert!(matches!(decode_curves(b""), Err(Error::Format(_))));
    }

    #[test]
    fn text_round_trip() {
        let set = sample();
        let text = curves_to_text(&set);
        assert!(text.starts_with("v 0.1 -0.2 0.0\n"));
        let back = curves_from_text(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in set.strips.iter().zip(&back.strips) {
            assert_eq!(a.vertices, b.vertices);
        }
        assert!(curves_from_text("x 1 2 3").is_err());
    }
}
