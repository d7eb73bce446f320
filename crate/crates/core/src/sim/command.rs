use serde::{Deserialize, Serialize};

use super::SimConfig;
use crate::coverage::Pigment;
use crate::geometry::Vec2;

/// Live steering of a running simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum UserCommand {
    /// Moves the density centre of every pigment, or only `pigment`, until
    /// the next chord.
    SetCenter {
        x: f64,
        y: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pigment: Option<Pigment>,
    },
    /// Pins `L` until the next tempo event.
    #[serde(rename = "set_L", alias = "set_l")]
    SetL { value: f64 },
    SetTrailWidth { value: f64 },
    Pause,
    Resume,
}

impl UserCommand {
    /// Checks the command against the configured bounds; the error is a
    /// human-readable reason.
    pub fn validate(&self, config: &SimConfig) -> Result<(), String> {
        match *self {
            UserCommand::SetCenter { x, y, .. } => {
                let inside = (0.0..=config.canvas_width).contains(&x) && (0.0..=config.canvas_height).contains(&y);
                if inside {
                    Ok(())
                } else {
                    Err(format!(
                        "center ({x}, {y}) outside canvas [0, {}]×[0, {}]",
                        config.canvas_width, config.canvas_height
                    ))
                }
            }
            UserCommand::SetL { value } => {
                if config.motion.contains(value) {
                    Ok(())
                } else {
                    Err(format!("L {value} outside [{}, {}]", config.motion.l_min, config.motion.l_max))
                }
            }
            UserCommand::SetTrailWidth { value } => {
                if value > 0.0 && value <= config.trail_width_max {
                    Ok(())
                } else {
                    Err(format!("trail width {value} outside (0, {}]", config.trail_width_max))
                }
            }
            UserCommand::Pause | UserCommand::Resume => Ok(()),
        }
    }

    pub fn center(&self) -> Option<Vec2> {
        match *self {
            UserCommand::SetCenter { x, y, .. } => Some(Vec2::new(x, y)),
            _ => None,
        }
    }
}
