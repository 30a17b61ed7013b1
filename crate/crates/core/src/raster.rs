//! Orthographic, depth-shaded rasterization of curve sets.
//!
//! The yarn axis (z) runs horizontally through the vertical center of the
//! image and x points up; the camera looks down the y axis, so strips with
//! larger y are drawn brighter. Strokes are anti-aliased by exact 1D box
//! coverage across the stroke and combined with `max`, which makes the
//! result independent of drawing order.

use image::{GrayImage, Luma};

use crate::error::{Error, Result};
use crate::polyline::{PolyLineSet, Vec3};
use crate::rng::RngStream;

/// Largest yarn diameter the sampler can produce, in model units.
pub const MAX_YARN_DIAMETER: f64 = 4.55;
/// Fraction of the image height the largest yarn may cover.
pub const MAX_HEIGHT_FILL: f64 = 0.9;
const MIN_SHADE: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RasterConfig {
    pub width: u32,
    pub height: u32,
    /// Pixels per model unit.
    pub scale: f64,
}

impl RasterConfig {
    /// Default scale for a given image size.
    pub fn for_size(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            scale: MAX_HEIGHT_FILL * height as f64 / MAX_YARN_DIAMETER,
        }
    }

    /// Yarn length visible across the image width.
    pub fn view_length(&self) -> f64 {
        self.width as f64 / self.scale
    }

    fn check(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid("raster scale must be positive"));
        }
        Ok(())
    }
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self::for_size(2000, 600)
    }
}

/// Draw `curves` with stroke width `2 * t_x * scale`.
pub fn rasterize(curves: &PolyLineSet, t_x: f64, config: &RasterConfig) -> Result<GrayImage> {
    config.check()?;
    if !(t_x > 0.0) {
        return Err(Error::invalid("fiber radius must be positive"));
    }
    let mut img = GrayImage::new(config.width, config.height);
    let raw = curves.strips.iter().filter(|s| !s.is_flyaway());
    let (mut z_lo, mut z_hi, mut depth) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for v in raw.flat_map(|s| s.vertices.iter()) {
        z_lo = z_lo.min(v.z);
        z_hi = z_hi.max(v.z);
        depth = depth.max(v.xy().norm());
    }
    if !z_lo.is_finite() {
        // flyaways only, or nothing at all
        if let Some((lo, hi)) = curves.bounds() {
            z_lo = lo.z;
            z_hi = hi.z;
        } else {
            return Ok(img);
        }
    }
    let depth = if depth > 0.0 { depth } else { 1.0 };
    let view = View {
        z_center: 0.5 * (z_lo + z_hi),
        depth,
        config,
    };
    let half_width = t_x * config.scale;
    let mut acc = vec![0.0f32; (config.width * config.height) as usize];
    for strip in &curves.strips {
        for w in strip.vertices.windows(2) {
            draw_segment(&mut acc, &view, w[0], w[1], half_width);
        }
    }
    for (px, a) in img.pixels_mut().zip(&acc) {
        *px = Luma([(a * 255.0).round().clamp(0.0, 255.0) as u8]);
    }
    Ok(img)
}

struct View<'a> {
    z_center: f64,
    depth: f64,
    config: &'a RasterConfig,
}

impl View<'_> {
    /// Pixel-space position (column, row) and shade in `[MIN_SHADE, 1]`.
    fn project(&self, v: Vec3) -> (f64, f64, f64) {
        let c = self.config;
        let col = (v.z - self.z_center) * c.scale + c.width as f64 / 2.0;
        let row = c.height as f64 / 2.0 - v.x * c.scale;
        let t = ((v.y / self.depth + 1.0) / 2.0).clamp(0.0, 1.0);
        (col, row, MIN_SHADE + (1.0 - MIN_SHADE) * t)
    }
}

/// Fraction of a unit pixel covered by a band of half-width `hw` whose
/// center line passes at distance `d` from the pixel center.
fn band_coverage(d: f64, hw: f64) -> f64 {
    ((d + hw).min(0.5) - (d - hw).max(-0.5)).max(0.0)
}

fn draw_segment(acc: &mut [f32], view: &View, a: Vec3, b: Vec3, hw: f64) {
    let (ax, ay, sa) = view.project(a);
    let (bx, by, sb) = view.project(b);
    let w = view.config.width as i64;
    let h = view.config.height as i64;
    let reach = hw + 1.0;
    let x0 = (ax.min(bx) - reach).floor().max(0.0) as i64;
    let x1 = ((ax.max(bx) + reach).ceil() as i64).min(w - 1);
    let y0 = (ay.min(by) - reach).floor().max(0.0) as i64;
    let y1 = ((ay.max(by) + reach).ceil() as i64).min(h - 1);
    if x0 > x1 || y0 > y1 {
        return;
    }
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    for y in y0..=y1 {
        let cy = y as f64 + 0.5;
        for x in x0..=x1 {
            let cx = x as f64 + 0.5;
            let u = if len2 > 0.0 {
                (((cx - ax) * dx + (cy - ay) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (px, py) = (ax + u * dx, ay + u * dy);
            let d = ((cx - px).powi(2) + (cy - py).powi(2)).sqrt();
            let cov = band_coverage(d, hw);
            if cov > 0.0 {
                let v = (cov * (sa + u * (sb - sa))) as f32;
                let slot = &mut acc[(y * w + x) as usize];
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
}

/// Axis-aligned crop at a uniformly random offset.
pub fn random_crop(image: &GrayImage, crop_w: u32, crop_h: u32, rng: &mut RngStream) -> Result<GrayImage> {
    let (w, h) = image.dimensions();
    if crop_w == 0 || crop_h == 0 || crop_w > w || crop_h > h {
        return Err(Error::invalid(format!(
            "crop {crop_w}x{crop_h} does not fit in {w}x{h}"
        )));
    }
    let ox = rng.draw_index((w - crop_w + 1) as usize) as u32;
    let oy = rng.draw_index((h - crop_h + 1) as usize) as u32;
    Ok(image::imageops::crop_imm(image, ox, oy, crop_w, crop_h).to_image())
}

/// Fraction of pixels with a non-zero value.
pub fn coverage_fraction(image: &GrayImage) -> f64 {
    let lit = image.pixels().filter(|p| p.0[0] > 0).count();
    lit as f64 / (image.width() as f64 * image.height() as f64)
}
