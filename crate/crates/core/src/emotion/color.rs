use serde::{Deserialize, Serialize};

/// Additive colour, channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColorRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// Subtractive colour, channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColorCmy {
    pub c: f64,
    pub m: f64,
    pub y: f64,
}

impl ColorRgb {
    pub const WHITE: ColorRgb = ColorRgb { r: 1.0, g: 1.0, b: 1.0 };
    pub const BLACK: ColorRgb = ColorRgb { r: 0.0, g: 0.0, b: 0.0 };

    /// Builds a colour with every channel clamped to `[0, 1]`.
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r: clamp01(r), g: clamp01(g), b: clamp01(b) }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }
}

impl ColorCmy {
    pub fn new(c: f64, m: f64, y: f64) -> Self {
        Self { c: clamp01(c), m: clamp01(m), y: clamp01(y) }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c, self.m, self.y]
    }

    pub fn to_rgb(self) -> ColorRgb {
        ColorRgb::new(1.0 - self.c, 1.0 - self.m, 1.0 - self.y)
    }
}

fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Channel-wise complement.
pub fn rgb_to_cmy(c: ColorRgb) -> ColorCmy {
    ColorCmy::new(1.0 - c.r, 1.0 - c.g, 1.0 - c.b)
}
