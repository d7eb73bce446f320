use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bounds of the tempo-controlled turning parameter `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionParams {
    pub l_min: f64,
    pub l_max: f64,
    /// Tempo (bpm) at and above which `L` saturates at `l_min`.
    pub t_max: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("motion parameters need 0 < l_min < l_max and t_max > 0 (got l_min={l_min}, l_max={l_max}, t_max={t_max})")]
pub struct MotionParamsError {
    pub l_min: f64,
    pub l_max: f64,
    pub t_max: f64,
}

impl Default for MotionParams {
    fn default() -> Self {
        Self { l_min: 1.0, l_max: 5.0, t_max: 180.0 }
    }
}

impl MotionParams {
    pub fn new(l_min: f64, l_max: f64, t_max: f64) -> Result<Self, MotionParamsError> {
        let p = Self { l_min, l_max, t_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MotionParamsError> {
        let ok = self.l_min.is_finite()
            && self.l_max.is_finite()
            && self.t_max.is_finite()
            && 0.0 < self.l_min
            && self.l_min < self.l_max
            && self.t_max > 0.0;
        if ok {
            Ok(())
        } else {
            Err(MotionParamsError { l_min: self.l_min, l_max: self.l_max, t_max: self.t_max })
        }
    }

    pub fn contains(&self, l: f64) -> bool {
        (self.l_min..=self.l_max).contains(&l)
    }
}

/// `L = L_max − (L_max − L_min)·min(t, t_max)/t_max`. Negative tempi count as zero.
pub fn tempo_to_l(tempo: f64, p: &MotionParams) -> f64 {
    let t = tempo.max(0.0).min(p.t_max);
    if t == p.t_max {
        return p.l_min;
    }
    p.l_max - (p.l_max - p.l_min) * t / p.t_max
}
