//! Windowed template-matching chord detection.

use super::{ChordEvent, ChordQuality, Key, NoteEvent, PitchClassSet};
use crate::emotion::classify_function;

/// Score deducted per sounding pitch class outside the template.
pub const NON_CHORD_TONE_PENALTY: f64 = 0.5;

/// Pitch classes weighing less than this fraction of the window's strongest
/// pitch class are treated as passing tones and ignored.
const MIN_WEIGHT_FRACTION: f64 = 0.2;

/// `|template ∩ set| − penalty·|set \ template|`
pub fn score_template(template: PitchClassSet, set: PitchClassSet, penalty: f64) -> f64 {
    set.intersection(template).len() as f64 - penalty * set.difference(template).len() as f64
}

#[derive(Debug, Clone, Copy)]
pub struct ChordDetector {
    pub window: f64,
    pub penalty: f64,
    pub min_weight_fraction: f64,
}

impl ChordDetector {
    pub fn new(window: f64) -> Self {
        Self { window, penalty: NON_CHORD_TONE_PENALTY, min_weight_fraction: MIN_WEIGHT_FRACTION }
    }

    /// Best `(root, quality)` for a pitch-class set.
    ///
    /// Ties go to fewer template notes, then the lower root, then the earlier
    /// quality in [`ChordQuality::TEMPLATED`]. Sets matching fewer than two
    /// template tones of any chord are labelled `Other`, rooted on `fallback_root`.
    pub fn best_match(&self, set: PitchClassSet, fallback_root: u8) -> (u8, ChordQuality) {
        let mut best: Option<(f64, usize, u8, ChordQuality, u32)> = None;
        for root in 0..12u8 {
            for quality in ChordQuality::TEMPLATED {
                let template = quality.template(root);
                let score = score_template(template, set, self.penalty);
                let size = quality.intervals().len();
                let better = match best {
                    None => true,
                    Some((s, n, ..)) => score > s || (score == s && size < n),
                };
                if better {
                    best = Some((score, size, root, quality, set.intersection(template).len()));
                }
            }
        }
        match best {
            Some((_, _, root, quality, hits)) if hits >= 2 => (root, quality),
            _ => (fallback_root % 12, ChordQuality::Other),
        }
    }

    pub fn detect(&self, notes: &[NoteEvent], key: Key) -> Vec<ChordEvent> {
        assert!(self.window > 0.0, "chord window must be positive");
        let end = notes.iter().map(NoteEvent::end).fold(0.0, f64::max);
        if notes.is_empty() || end <= 0.0 {
            return Vec::new();
        }
        let n_windows = (end / self.window).ceil() as usize;
        let eps = 1e-9 * self.window;

        // (first window, one past last window, root, quality, pitch classes)
        let mut runs: Vec<(usize, usize, u8, ChordQuality, PitchClassSet)> = Vec::new();
        let mut sorted: Vec<&NoteEvent> = notes.iter().collect();
        sorted.sort_by(|a, b| a.onset.total_cmp(&b.onset));
        let mut first_live = 0;
        for k in 0..n_windows {
            let w0 = k as f64 * self.window;
            let w1 = (k + 1) as f64 * self.window;
            let mut weights = [0.0f64; 12];
            while first_live < sorted.len() && sorted[first_live].end() <= w0 {
                first_live += 1;
            }
            for n in sorted[first_live..].iter().take_while(|n| n.onset < w1) {
                let overlap = n.end().min(w1) - n.onset.max(w0);
                if overlap > eps {
                    weights[n.pitch_class() as usize] += overlap;
                }
            }
            let max_w = weights.iter().copied().fold(0.0, f64::max);
            if max_w <= 0.0 {
                continue;
            }
            let set: PitchClassSet = (0..12u8)
                .filter(|&pc| weights[pc as usize] >= self.min_weight_fraction * max_w)
                .collect();
            let strongest = (0..12u8)
                .max_by(|&a, &b| weights[a as usize].total_cmp(&weights[b as usize]).then(b.cmp(&a)))
                .expect("twelve pitch classes");
            let (root, quality) = self.best_match(set, strongest);
            match runs.last_mut() {
                Some(last) if last.1 == k && last.2 == root && last.3 == quality => {
                    last.1 = k + 1;
                    last.4 = PitchClassSet::from_mask(last.4.mask() | set.mask());
                }
                _ => runs.push((k, k + 1, root, quality, set)),
            }
        }

        runs.into_iter()
            .map(|(k0, k1, root, quality, pitch_classes)| {
                let onset = k0 as f64 * self.window;
                let duration = k1 as f64 * self.window - onset;
                let mut chord = ChordEvent {
                    onset,
                    duration,
                    root,
                    quality,
                    function: crate::emotion::ChordFunction::MajorTonic,
                    pitch_classes,
                };
                chord.function = classify_function(&chord, key);
                chord
            })
            .collect()
    }
}

/// Detects chords with the default penalty over fixed `window`-second windows.
pub fn detect_chords(notes: &[NoteEvent], key: Key, window: f64) -> Vec<ChordEvent> {
    ChordDetector::new(window).detect(notes, key)
}
