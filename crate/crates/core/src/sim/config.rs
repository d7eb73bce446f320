use serde::{Deserialize, Serialize};

use super::SimError;
use crate::coverage::{Equipment, GridDomain, Pigment};
use crate::emotion::MotionParams;

/// How robots are placed before the first step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Evenly spaced on a circle of radius 0.35·min(width, height) around the
    /// canvas centre, headings tangent (counter-clockwise).
    #[default]
    Circle,
    /// Uniform over the canvas, headings uniform, drawn from `seed`.
    Scatter,
}

/// Every tunable of a simulation run. Missing keys take defaults; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub robots: usize,
    pub canvas_width: f64,
    pub canvas_height: f64,
    /// Quadrature cells per axis.
    pub grid_resolution: usize,
    pub dt: f64,
    /// Trail disc diameter in canvas units.
    pub trail_width: f64,
    /// Upper bound accepted for live trail-width changes.
    pub trail_width_max: f64,
    pub motion: MotionParams,
    /// When set, `L` is pinned to this value and tempo events are ignored.
    pub fixed_l: Option<f64>,
    pub sigma: f64,
    /// Scale of each pigment density; a chord's CMY channel multiplies it.
    pub intensity: f64,
    /// Saturation of the single-integrator command, canvas units per second.
    pub u_max: f64,
    /// Per-robot pigments; `None` means every robot carries CMY.
    pub equipment: Option<Vec<Equipment>>,
    /// Time constant of the density transition after a chord change. Zero
    /// makes densities jump.
    pub tau: f64,
    pub seed: u64,
    /// Fraction of a channel absorbed per stamp at full pigment proportion.
    pub trail_strength: f64,
    pub pixels_per_unit: f64,
    pub layout: Layout,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            robots: 6,
            canvas_width: 500.0,
            canvas_height: 500.0,
            grid_resolution: 256,
            dt: 0.05,
            trail_width: 15.0,
            trail_width_max: 50.0,
            motion: MotionParams::default(),
            fixed_l: None,
            sigma: 60.0,
            intensity: 1.0,
            u_max: 50.0,
            equipment: None,
            tau: 0.5,
            seed: 0,
            trail_strength: 0.08,
            pixels_per_unit: 2.0,
            layout: Layout::Circle,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let config: SimConfig = serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn equipment_of(&self, robot: usize) -> Equipment {
        self.equipment.as_ref().map_or(Equipment::CMY, |e| e[robot])
    }

    pub fn grid(&self) -> GridDomain {
        GridDomain::new(self.canvas_width, self.canvas_height, self.grid_resolution, self.grid_resolution)
            .expect("validated grid")
    }

    /// Raster size in pixels.
    pub fn raster_size(&self) -> (u32, u32) {
        (
            (self.canvas_width * self.pixels_per_unit).round() as u32,
            (self.canvas_height * self.pixels_per_unit).round() as u32,
        )
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let mut problems = Vec::new();
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.robots == 0 {
            problems.push("robots must be at least 1".to_string());
        }
        if !positive(self.canvas_width) || !positive(self.canvas_height) {
            problems.push(format!("canvas {}×{} must be positive", self.canvas_width, self.canvas_height));
        }
        if self.grid_resolution < 2 {
            problems.push(format!("grid_resolution {} must be at least 2", self.grid_resolution));
        }
        if !positive(self.dt) {
            problems.push(format!("dt {} must be positive", self.dt));
        }
        if !positive(self.trail_width) {
            problems.push(format!("trail_width {} must be positive", self.trail_width));
        }
        if !(self.trail_width_max >= self.trail_width && self.trail_width_max.is_finite()) {
            problems.push(format!("trail_width_max {} must be at least trail_width", self.trail_width_max));
        }
        if let Err(e) = self.motion.validate() {
            problems.push(e.to_string());
        }
        if let Some(l) = self.fixed_l {
            if !self.motion.contains(l) {
                problems.push(format!(
                    "fixed_l {l} outside [{}, {}]",
                    self.motion.l_min, self.motion.l_max
                ));
            }
        }
        if !positive(self.sigma) {
            problems.push(format!("sigma {} must be positive", self.sigma));
        }
        if !positive(self.intensity) {
            problems.push(format!("intensity {} must be positive", self.intensity));
        }
        if !positive(self.u_max) {
            problems.push(format!("u_max {} must be positive", self.u_max));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            problems.push(format!("tau {} must be non-negative", self.tau));
        }
        if !(self.trail_strength.is_finite() && (0.0..=1.0).contains(&self.trail_strength)) {
            problems.push(format!("trail_strength {} must lie in [0, 1]", self.trail_strength));
        }
        if !positive(self.pixels_per_unit) {
            problems.push(format!("pixels_per_unit {} must be positive", self.pixels_per_unit));
        } else if positive(self.canvas_width) && positive(self.canvas_height) {
            let (w, h) = self.raster_size();
            if w == 0 || h == 0 {
                problems.push("raster would be empty".to_string());
            }
        }
        if let Some(eq) = &self.equipment {
            if eq.len() != self.robots {
                problems.push(format!("equipment lists {} robots but robots is {}", eq.len(), self.robots));
            }
        }
        if self.robots > 0 {
            for p in Pigment::ALL {
                let carried = (0..self.robots).any(|i| match &self.equipment {
                    Some(eq) => eq.get(i).is_some_and(|e| e.carries(p)),
                    None => true,
                });
                if !carried {
                    problems.push(format!("no robot carries {p}"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::Config(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
        assert_eq!(SimConfig::default().raster_size(), (1000, 1000));
    }

    #[test]
    fn partial_json_uses_defaults() {
        let c = SimConfig::from_json(r#"{"robots": 9, "trail_width": 20, "equipment": null}"#).unwrap();
        assert_eq!(c.robots, 9);
        assert_eq!(c.trail_width, 20.0);
        assert_eq!(c.dt, 0.05);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(SimConfig::from_json(r#"{"robotz": 3}"#).is_err());
        let err = SimConfig::from_json(r#"{"robots": 0, "dt": -1}"#).unwrap_err().to_string();
        assert!(err.contains("robots") && err.contains("dt"), "{err}");
    }

    #[test]
    fn every_pigment_must_be_carried() {
        let c = SimConfig::from_json(r#"{"robots": 2, "equipment": ["C", "M"]}"#);
        assert!(c.unwrap_err().to_string().contains("yellow"));
        let c = SimConfig::from_json(r#"{"robots": 3, "equipment": ["C", "M"]}"#);
        assert!(c.unwrap_err().to_string().contains("equipment lists 2"));
        SimConfig::from_json(r#"{"robots": 2, "equipment": ["CM", "Y"]}"#).unwrap();
    }
}
