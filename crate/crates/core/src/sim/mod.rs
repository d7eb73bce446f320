//! The painting loop: music events move the colour densities, the swarm
//! follows them through unicycle kinematics and leaves CMY trails.

mod canvas;
mod command;
mod config;
mod headless;
mod kinematics;
mod state;

pub use canvas::{render_png, write_png, Canvas, Stamp};
pub use command::UserCommand;
pub use config::{Layout, SimConfig};
pub use headless::{run_headless, step_count, HeadlessRun};
pub use kinematics::{integrate_unicycle, si_to_unicycle};
pub use state::{ChordInfo, DensityView, Metrics, RobotView, SimSnapshot, SimState, StepReport};

use thiserror::Error;

use crate::emotion::PaletteError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Palette(#[from] PaletteError),
}
