use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CoverageError, GridDomain, Pigment};
use crate::geometry::Vec2;

/// Axis-aligned Gaussian importance density for one pigment:
/// `K / (2π σx σy) · exp(−½((qx−μx)²/σx² + (qy−μy)²/σy²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDensity {
    pub pigment: Pigment,
    pub center: Vec2,
    pub sigma: Vec2,
    pub intensity: f64,
}

impl GaussianDensity {
    pub fn new(pigment: Pigment, center: Vec2, sigma: Vec2, intensity: f64) -> Result<Self, CoverageError> {
        let d = Self { pigment, center, sigma, intensity };
        d.validate()?;
        Ok(d)
    }

    pub fn isotropic(pigment: Pigment, center: Vec2, sigma: f64, intensity: f64) -> Result<Self, CoverageError> {
        Self::new(pigment, center, Vec2::new(sigma, sigma), intensity)
    }

    pub fn validate(&self) -> Result<(), CoverageError> {
        if !self.center.is_finite() {
            return Err(CoverageError::InvalidDensity(format!("center {:?} not finite", self.center)));
        }
        if !(self.sigma.x > 0.0 && self.sigma.y > 0.0 && self.sigma.is_finite()) {
            return Err(CoverageError::InvalidDensity(format!("spread {:?} must be positive", self.sigma)));
        }
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(CoverageError::InvalidDensity(format!("intensity {} must be positive", self.intensity)));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        self.intensity / (2.0 * PI * self.sigma.x * self.sigma.y)
    }

    pub fn eval(&self, q: Vec2) -> f64 {
        let zx = (q.x - self.center.x) / self.sigma.x;
        let zy = (q.y - self.center.y) / self.sigma.y;
        self.peak() * (-0.5 * (zx * zx + zy * zy)).exp()
    }
}

/// A density sampled at every grid cell centre and multiplied by the cell
/// area, i.e. the midpoint-quadrature weight of each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub pigment: Pigment,
    pub weights: Vec<f64>,
}

impl DensityField {
    /// Samples the density using its separable form: one exponential per
    /// column and per row instead of per cell.
    pub fn sample(density: &GaussianDensity, grid: &GridDomain) -> Self {
        let gx: Vec<f64> = (0..grid.nx)
            .map(|ix| {
                let z = (grid.column_center(ix) - density.center.x) / density.sigma.x;
                (-0.5 * z * z).exp()
            })
            .collect();
        let scale = density.peak() * grid.cell_area();
        let mut weights = Vec::with_capacity(grid.cell_count());
        for iy in 0..grid.ny {
            let z = (grid.row_center(iy) - density.center.y) / density.sigma.y;
            let row = scale * (-0.5 * z * z).exp();
            weights.extend(gx.iter().map(|g| row * g));
        }
        Self { pigment: density.pigment, weights }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}
