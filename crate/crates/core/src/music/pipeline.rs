use thiserror::Error;

use super::{detect_chords, estimate_key, extract_tempo, parse_midi, Key, KeyError, MidiError, MusicTimeline};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Midi(#[from] MidiError),
    #[error("cannot estimate key: {0}")]
    Key(#[from] KeyError),
    #[error("chord window {0} must be positive")]
    Window(f64),
}

/// MIDI bytes to a timeline: tempo, key (unless given), then chords over
/// windows of `window` seconds, one beat of the opening tempo by default.
pub fn analyze_midi(bytes: &[u8], key: Option<Key>, window: Option<f64>) -> Result<MusicTimeline, AnalysisError> {
    let parsed = parse_midi(bytes)?;
    if parsed.has_unterminated_notes() {
        log::warn!("{} notes had no note-off and were closed at track end", parsed.unterminated_notes);
    }
    let tempos = extract_tempo(&parsed.notes, &parsed.tempo_map);
    let window = window.unwrap_or(60.0 / tempos[0].bpm);
    if !(window.is_finite() && window > 0.0) {
        return Err(AnalysisError::Window(window));
    }
    let key = match key {
        Some(k) => k,
        None => estimate_key(&parsed.notes)?,
    };
    let chords = detect_chords(&parsed.notes, key, window);
    let duration = MusicTimeline::implied_duration(&chords, &tempos);
    Ok(MusicTimeline { key, chords, tempos, duration })
}
