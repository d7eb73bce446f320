//! Command-line front end: `analyze`, `paint` and `sweep`.

pub mod error;
pub mod inputs;
pub mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use musicswarm_core::music::Key;
use musicswarm_core::sim::{render_png, run_headless};

pub use error::CliError;
use error::{read_text, write_file};
use inputs::{load_config, load_music, load_palette};
use sweep::SweepSpec;

/// Environment variable holding the log filter, e.g. `debug`.
pub const LOG_ENV: &str = "MUSICSWARM_LOG";

#[derive(Debug, Parser)]
#[command(name = "musicswarm", version, about = "Paint music with a simulated robot swarm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the chord/tempo timeline of a MIDI file or timeline JSON.
    Analyze(AnalyzeArgs),
    /// Run one painting and write `<out>.png` and `<out>.metrics.json`.
    Paint(PaintArgs),
    /// Run every setup of a sweep spec into a directory.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Key to use instead of the estimate, e.g. `C:major` or `F#:minor`.
    #[arg(long)]
    pub key: Option<Key>,
    /// Chord window in seconds; one beat of the opening tempo by default.
    #[arg(long)]
    pub window: Option<f64>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Simulation config JSON; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seconds to simulate; the whole piece by default.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emotion palette JSON mapping labels to `[r, g, b]` in `[0, 1]`.
    #[arg(long)]
    pub palette: Option<PathBuf>,
    #[arg(long)]
    pub key: Option<Key>,
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PaintArgs {
    pub input: PathBuf,
    /// Output prefix; a trailing `.png` is dropped.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Sweep spec JSON; the bundled 13-setup grid by default.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => analyze(&a),
        Command::Paint(p) => paint(&p),
        Command::Sweep(s) => sweep(&s),
    }
}

fn check_duration(duration: Option<f64>) -> Result<(), CliError> {
    match duration {
        Some(d) if !(d.is_finite() && d >= 0.0) => Err(CliError::Usage(format!("--duration {d} must be non-negative"))),
        _ => Ok(()),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let timeline = load_music(&args.input, args.key, args.window)?;
    let json = timeline.to_json() + "\n";
    match &args.out {
        Some(path) => write_file(path, json.as_bytes()),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

fn paint_prefix(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")) {
        out.with_extension("")
    } else {
        out.to_path_buf()
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn paint(args: &PaintArgs) -> Result<(), CliError> {
    check_duration(args.run.duration)?;
    let mut config = load_config(args.run.config.as_deref())?;
    if let Some(seed) = args.run.seed {
        config.seed = seed;
    }
    let palette = load_palette(args.run.palette.as_deref())?;
    let timeline = load_music(&args.input, args.run.key, args.run.window)?;
    let run = run_headless(&config, &timeline, &palette, args.run.duration)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let png = render_png(&run.canvas).map_err(|e| CliError::Runtime(format!("PNG encoding: {e}")))?;
    let prefix = paint_prefix(&args.out);
    write_file(&with_suffix(&prefix, ".png"), &png)?;
    write_file(&with_suffix(&prefix, ".metrics.json"), run.metrics.to_json().as_bytes())?;
    log::info!("painted {} steps into {}.png", run.steps, prefix.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    check_duration(args.run.duration)?;
    let spec = match &args.spec {
        None => SweepSpec::bundled(),
        Some(p) => SweepSpec::from_json(&read_text(p)?).map_err(|e| CliError::invalid(p, e))?,
    };
    let mut base = load_config(args.run.config.as_deref())?;
    if let Some(seed) = args.run.seed {
        base.seed = seed;
    }
    let palette = load_palette(args.run.palette.as_deref())?;
    let timeline = load_music(&args.input, args.run.key, args.run.window)?;
    let summary = sweep::run_sweep(&spec, &base, &timeline, &palette, args.run.duration, &args.out)?;
    match summary.failures() {
        0 => Ok(()),
        n => Err(CliError::Runtime(format!("{n} of {} setups failed; see summary.json", summary.setups.len()))),
    }
}
