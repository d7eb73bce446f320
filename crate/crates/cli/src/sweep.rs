use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use musicswarm_core::coverage::Equipment;
use musicswarm_core::emotion::Palette;
use musicswarm_core::music::MusicTimeline;
use musicswarm_core::sim::{render_png, run_headless, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{write_file, CliError};

/// The bundled setup grid: swarm size, turning parameter, trail width and
/// per-robot pigments for each of the 13 setups.
pub const BUNDLED_SPEC: &str = include_str!("../data/sweep_setups.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Setup {
    pub id: u32,
    pub n: usize,
    pub l: f64,
    pub w: f64,
    /// One entry per robot.
    pub equipment: Vec<Equipment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub setups: Vec<Setup>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let spec: SweepSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_SPEC).expect("bundled sweep spec is valid")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.setups.is_empty() {
            return Err("sweep spec has no setups".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.setups {
            if !seen.insert(s.id) {
                return Err(format!("duplicate setup id {}", s.id));
            }
            if s.equipment.len() != s.n {
                return Err(format!("setup {}: equipment lists {} robots but n is {}", s.id, s.equipment.len(), s.n));
            }
        }
        Ok(())
    }
}

impl Setup {
    pub fn file_name(&self) -> String {
        format!("setup{:02}_N{}_L{}_w{}.png", self.id, self.n, self.l, self.w)
    }

    pub fn config(&self, base: &SimConfig) -> SimConfig {
        SimConfig {
            robots: self.n,
            fixed_l: Some(self.l),
            trail_width: self.w,
            trail_width_max: base.trail_width_max.max(self.w),
            equipment: Some(self.equipment.clone()),
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupOutcome {
    pub id: u32,
    pub n: usize,
    pub l: f64,
    pub w: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub png: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_path_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chords_consumed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub setups: Vec<SetupOutcome>,
}

impl SweepSummary {
    pub fn failures(&self) -> usize {
        self.setups.iter().filter(|s| s.status != "ok").count()
    }
}

fn run_setup(
    setup: &Setup,
    base: &SimConfig,
    timeline: &MusicTimeline,
    palette: &Palette,
    duration: Option<f64>,
    out_dir: &Path,
) -> SetupOutcome {
    let mut outcome = SetupOutcome {
        id: setup.id,
        n: setup.n,
        l: setup.l,
        w: setup.w,
        status: "ok".into(),
        png: None,
        error: None,
        steps: None,
        final_cost: None,
        mean_path_length: None,
        chords_consumed: None,
    };
    let result = run_headless(&setup.config(base), timeline, palette, duration)
        .map_err(|e| e.to_string())
        .and_then(|run| {
            let bytes = render_png(&run.canvas).map_err(|e| e.to_string())?;
            let path: PathBuf = out_dir.join(setup.file_name());
            write_file(&path, &bytes).map_err(|e| e.to_string())?;
            Ok(run)
        });
    match result {
        Ok(run) => {
            let paths = &run.metrics.path_lengths;
            outcome.png = Some(setup.file_name());
            outcome.steps = Some(run.steps);
            outcome.final_cost = run.metrics.cost.last().copied();
            outcome.mean_path_length = Some(paths.iter().sum::<f64>() / paths.len() as f64);
            outcome.chords_consumed = Some(run.metrics.chords_consumed);
        }
        Err(e) => {
            log::error!("setup {} failed: {e}", setup.id);
            outcome.status = "error".into();
            outcome.error = Some(e);
        }
    }
    outcome
}

/// Runs every setup in parallel, writes one PNG per setup plus
/// `summary.json`. A failing setup is recorded and the rest still run.
pub fn run_sweep(
    spec: &SweepSpec,
    base: &SimConfig,
    timeline: &MusicTimeline,
    palette: &Palette,
    duration: Option<f64>,
    out_dir: &Path,
) -> Result<SweepSummary, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Write { path: out_dir.to_path_buf(), source })?;
    let setups: Vec<SetupOutcome> = spec
        .setups
        .par_iter()
        .map(|s| run_setup(s, base, timeline, palette, duration, out_dir))
        .collect();
    let summary = SweepSummary { setups };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&out_dir.join("summary.json"), json.as_bytes())?;
    Ok(summary)
}
