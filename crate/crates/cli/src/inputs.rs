use std::path::Path;

use musicswarm_core::emotion::Palette;
use musicswarm_core::music::{analyze_midi, load_timeline, Key, MusicTimeline, TimelineDocument};
use musicswarm_core::sim::SimConfig;

use crate::error::{read_bytes, read_text, CliError};

fn is_midi(path: &Path, bytes: &[u8]) -> bool {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    matches!(ext.as_deref(), Some("mid" | "midi" | "smf")) || bytes.starts_with(b"MThd")
}

/// Reads a MIDI file or a timeline JSON. `key` replaces the estimated (or
/// stored) key and chord functions are re-derived against it.
pub fn load_music(path: &Path, key: Option<Key>, window: Option<f64>) -> Result<MusicTimeline, CliError> {
    let bytes = read_bytes(path)?;
    if is_midi(path, &bytes) {
        return analyze_midi(&bytes, key, window).map_err(|e| CliError::invalid(path, e));
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::invalid(path, "neither MIDI nor UTF-8 JSON"))?;
    let timeline = load_timeline(&text).map_err(|e| CliError::invalid(path, e))?;
    match key {
        None => Ok(timeline),
        Some(k) => {
            let mut doc: TimelineDocument = timeline.to_document();
            doc.key.tonic = i64::from(k.tonic);
            doc.key.mode = k.mode;
            doc.validate().map_err(|e| CliError::invalid(path, e))
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<SimConfig, CliError> {
    match path {
        None => Ok(SimConfig::default()),
        Some(p) => SimConfig::from_json(&read_text(p)?).map_err(|e| CliError::invalid(p, e)),
    }
}

pub fn load_palette(path: Option<&Path>) -> Result<Palette, CliError> {
    match path {
        None => Ok(Palette::default()),
        Some(p) => Palette::from_json(&read_text(p)?).map_err(|e| CliError::invalid(p, e)),
    }
}
