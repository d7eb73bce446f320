use super::{Canvas, Metrics, SimConfig, SimError, SimState};
use crate::emotion::Palette;
use crate::music::MusicTimeline;

#[derive(Debug, Clone)]
pub struct HeadlessRun {
    pub canvas: Canvas,
    pub metrics: Metrics,
    pub steps: u64,
}

/// Number of whole steps covering `duration`.
pub fn step_count(duration: f64, dt: f64) -> u64 {
    (duration / dt).round() as u64
}

/// Steps a fresh simulation for `duration` seconds (the timeline length when
/// `None`) as fast as possible.
pub fn run_headless(
    config: &SimConfig,
    timeline: &MusicTimeline,
    palette: &Palette,
    duration: Option<f64>,
) -> Result<HeadlessRun, SimError> {
    let duration = duration.unwrap_or(timeline.duration);
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(SimError::Config(format!("duration {duration} must be non-negative")));
    }
    let mut state = SimState::new(config.clone(), timeline.clone(), palette)?;
    let steps = step_count(duration, config.dt);
    for _ in 0..steps {
        state.step();
    }
    log::debug!("headless run finished after {steps} steps at t={}", state.clock());
    Ok(HeadlessRun { canvas: state.canvas().clone(), metrics: state.metrics().clone(), steps })
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}
