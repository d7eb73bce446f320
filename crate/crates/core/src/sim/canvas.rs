use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coverage::Pigment;
use crate::geometry::Vec2;

/// RGB raster in `[0, 1]`, initialised white. Row 0 is the top of the image
/// while canvas `y` grows upwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    width: u32,
    height: u32,
    pixels_per_unit: f64,
    data: Vec<[f64; 3]>,
}

/// One deposited disc. Applying the same stamps in the same order to a white
/// canvas reproduces the raster exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub robot: usize,
    pub center: Vec2,
    /// Diameter in canvas units.
    pub width: f64,
    /// Multiplier applied to the R, G and B channels of every covered pixel.
    pub factors: [f64; 3],
}

impl Stamp {
    /// Factors for pigment proportions `alpha` (indexed by pigment) restricted
    /// to the carried pigments: channel `j` gets `1 − strength·α_j`.
    pub fn new(robot: usize, center: Vec2, width: f64, strength: f64, carried: &[Pigment], alpha: &[f64]) -> Self {
        let mut factors = [1.0; 3];
        for (p, a) in carried.iter().zip(alpha) {
            factors[p.absorbed_channel()] = 1.0 - strength * a;
        }
        Self { robot, center, width, factors }
    }
}

impl Canvas {
    pub fn new(width: u32, height: u32, pixels_per_unit: f64) -> Self {
        Self { width, height, pixels_per_unit, data: vec![[1.0; 3]; width as usize * height as usize] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [f64; 3] {
        self.data[(y * self.width + x) as usize]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [f64; 3]) {
        self.data[(y * self.width + x) as usize] = rgb.map(|c| c.clamp(0.0, 1.0));
    }

    /// Canvas-unit coordinates of a pixel centre.
    pub fn pixel_center(&self, x: u32, y: u32) -> Vec2 {
        let s = self.pixels_per_unit;
        Vec2::new((x as f64 + 0.5) / s, (self.height as f64 - (y as f64 + 0.5)) / s)
    }

    /// Multiplies every pixel whose centre lies within `width/2` of the stamp
    /// centre by the stamp factors, then clamps to `[0, 1]`.
    pub fn apply(&mut self, stamp: &Stamp) {
        let s = self.pixels_per_unit;
        let r = stamp.width / 2.0;
        let cx = stamp.center.x * s;
        let cy = self.height as f64 - stamp.center.y * s;
        let rp = r * s;
        let x0 = ((cx - rp).floor().max(0.0)) as u32;
        let x1 = ((cx + rp).ceil().min(self.width as f64)) as u32;
        let y0 = ((cy - rp).floor().max(0.0)) as u32;
        let y1 = ((cy + rp).ceil().min(self.height as f64)) as u32;
        let r2 = r * r;
        for y in y0..y1 {
            for x in x0..x1 {
                if self.pixel_center(x, y).distance_squared(stamp.center) <= r2 {
                    let px = &mut self.data[(y * self.width + x) as usize];
                    for (c, f) in px.iter_mut().zip(stamp.factors) {
                        *c = (*c * f).clamp(0.0, 1.0);
                    }
                }
            }
        }
    }

    /// 8-bit RGB, row-major from the top.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().flat_map(|px| px.map(|c| (c * 255.0).round() as u8)).collect()
    }

    pub fn is_white(&self) -> bool {
        self.data.iter().all(|px| *px == [1.0; 3])
    }
}

/// Encodes the canvas as an 8-bit RGB PNG with a fixed filter and
/// compression level so equal canvases give equal bytes.
pub fn render_png(canvas: &Canvas) -> Result<Vec<u8>, png::EncodingError> {
    let mut out = Vec::new();
    write_png(canvas, &mut out)?;
    Ok(out)
}

pub fn write_png<W: Write>(canvas: &Canvas, sink: W) -> Result<(), png::EncodingError> {
    let mut encoder = png::Encoder::new(sink, canvas.width, canvas.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Balanced);
    encoder.set_filter(png::Filter::Sub);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&canvas.to_rgb8())?;
    writer.finish()
}
