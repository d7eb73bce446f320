//! Krumhansl-Schmuckler key finding.

use thiserror::Error;

use super::{Key, Mode, NoteEvent};

/// Krumhansl-Kessler probe-tone ratings for a major key, tonic first.
pub const MAJOR_PROFILE: [f64; 12] = [6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88];
/// Krumhansl-Kessler probe-tone ratings for a minor key, tonic first.
pub const MINOR_PROFILE: [f64; 12] = [6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("no notes")]
    NoNotes,
}

fn duration_histogram(notes: &[NoteEvent]) -> [f64; 12] {
    let mut hist = [0.0; 12];
    for n in notes {
        hist[n.pitch_class() as usize] += n.duration;
    }
    hist
}

/// Pearson correlation between the histogram read from `tonic` upwards and
/// `profile`. Every sum runs in scale-degree order so transposing the input
/// permutes results exactly.
fn correlation(hist: &[f64; 12], tonic: u8, profile: &[f64; 12]) -> f64 {
    let x = |d: usize| hist[(tonic as usize + d) % 12];
    let mean_x = (0..12).map(x).sum::<f64>() / 12.0;
    let mean_y = profile.iter().sum::<f64>() / 12.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (d, &p) in profile.iter().enumerate() {
        let dx = x(d) - mean_x;
        let dy = p - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let denom = (sxx * syy).sqrt();
    if denom > 0.0 {
        sxy / denom
    } else {
        0.0
    }
}

/// All 24 key correlations in tie-break order: tonic 0..11, major before minor.
pub fn key_correlations(notes: &[NoteEvent]) -> Vec<(Key, f64)> {
    let hist = duration_histogram(notes);
    let mut out = Vec::with_capacity(24);
    for tonic in 0..12u8 {
        out.push((Key::new(tonic, Mode::Major), correlation(&hist, tonic, &MAJOR_PROFILE)));
        out.push((Key::new(tonic, Mode::Minor), correlation(&hist, tonic, &MINOR_PROFILE)));
    }
    out
}

/// The key whose profile best correlates with the duration-weighted
/// pitch-class histogram. Ties go to the lowest tonic, then major.
pub fn estimate_key(notes: &[NoteEvent]) -> Result<Key, KeyError> {
    if notes.is_empty() {
        return Err(KeyError::NoNotes);
    }
    let mut best: Option<(Key, f64)> = None;
    for (key, r) in key_correlations(notes) {
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((key, r));
        }
    }
    Ok(best.expect("24 candidates").0)
}
