use serde::{Deserialize, Serialize};

use super::CoverageError;
use crate::geometry::Vec2;

/// Uniform midpoint-quadrature grid over `[0, width] × [0, height]`.
/// Cells are indexed row-major from the bottom-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridDomain {
    pub fn new(width: f64, height: f64, nx: usize, ny: usize) -> Result<Self, CoverageError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(CoverageError::InvalidGrid(format!("extent {width}×{height} must be positive")));
        }
        if nx < 2 || ny < 2 {
            return Err(CoverageError::InvalidGrid(format!("resolution {nx}×{ny} below 2 per axis")));
        }
        Ok(Self { width, height, nx, ny })
    }

    pub fn square(side: f64, resolution: usize) -> Result<Self, CoverageError> {
        Self::new(side, side, resolution, resolution)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_width(&self) -> f64 {
        self.width / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.height / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width() * self.cell_height()
    }

    pub fn column_center(&self, ix: usize) -> f64 {
        (ix as f64 + 0.5) * self.cell_width()
    }

    pub fn row_center(&self, iy: usize) -> f64 {
        (iy as f64 + 0.5) * self.cell_height()
    }

    pub fn cell_center(&self, cell: usize) -> Vec2 {
        Vec2::new(self.column_center(cell % self.nx), self.row_center(cell / self.nx))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn clamp(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }
}
