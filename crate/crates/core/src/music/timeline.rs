//! JSON form of a [`MusicTimeline`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ChordEvent, ChordQuality, Key, MusicTimeline, TempoEvent};

/// Tolerance used when checking chord adjacency.
const OVERLAP_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TimelineError {
    #[error("timeline JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid timeline: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordDocument {
    pub onset: f64,
    pub duration: f64,
    pub root: i64,
    pub quality: ChordQuality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyDocument {
    pub tonic: i64,
    pub mode: super::Mode,
}

/// Serialized timeline: `{key, chords, tempos}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineDocument {
    pub key: KeyDocument,
    #[serde(default)]
    pub chords: Vec<ChordDocument>,
    #[serde(default)]
    pub tempos: Vec<TempoEvent>,
}

impl TimelineDocument {
    pub fn validate(&self) -> Result<MusicTimeline, TimelineError> {
        let mut problems = Vec::new();
        if !(0..12).contains(&self.key.tonic) {
            problems.push(format!("key tonic {} outside 0..11", self.key.tonic));
        }
        let key = Key::new(self.key.tonic.rem_euclid(12) as u8, self.key.mode);

        for (i, c) in self.chords.iter().enumerate() {
            if !(c.onset.is_finite() && c.onset >= 0.0) {
                problems.push(format!("chord {i}: onset {} must be finite and non-negative", c.onset));
            }
            if !(c.duration.is_finite() && c.duration > 0.0) {
                problems.push(format!("chord {i}: duration {} must be positive", c.duration));
            }
            if !(0..12).contains(&c.root) {
                problems.push(format!("chord {i}: root {} outside 0..11", c.root));
            }
        }
        for (i, pair) in self.chords.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if b.onset < a.onset {
                problems.push(format!("chords {i} and {} out of onset order", i + 1));
            } else if b.onset < a.onset + a.duration - OVERLAP_EPS {
                problems.push(format!(
                    "chords {i} [{}, {}) and {} [{}, {}) overlap",
                    a.onset,
                    a.onset + a.duration,
                    i + 1,
                    b.onset,
                    b.onset + b.duration
                ));
            }
        }

        if self.tempos.is_empty() {
            problems.push("at least one tempo event is required".into());
        }
        for (i, t) in self.tempos.iter().enumerate() {
            if !(t.bpm.is_finite() && t.bpm > 0.0) {
                problems.push(format!("tempo {i}: bpm {} must be finite and positive", t.bpm));
            }
            if !(t.onset.is_finite() && t.onset >= 0.0) {
                problems.push(format!("tempo {i}: onset {} must be finite and non-negative", t.onset));
            }
        }
        for (i, pair) in self.tempos.windows(2).enumerate() {
            if pair[1].onset < pair[0].onset {
                problems.push(format!("tempos {i} and {} out of onset order", i + 1));
            }
        }

        if !problems.is_empty() {
            return Err(TimelineError::Validation(problems));
        }

        let chords: Vec<ChordEvent> = self
            .chords
            .iter()
            .map(|c| ChordEvent::from_template(c.onset, c.duration, c.root as u8, c.quality, key))
            .collect();
        let duration = MusicTimeline::implied_duration(&chords, &self.tempos);
        Ok(MusicTimeline { key, chords, tempos: self.tempos.clone(), duration })
    }
}

impl MusicTimeline {
    pub fn to_document(&self) -> TimelineDocument {
        TimelineDocument {
            key: KeyDocument { tonic: i64::from(self.key.tonic), mode: self.key.mode },
            chords: self
                .chords
                .iter()
                .map(|c| ChordDocument {
                    onset: c.onset,
                    duration: c.duration,
                    root: i64::from(c.root),
                    quality: c.quality,
                })
                .collect(),
            tempos: self.tempos.clone(),
        }
    }

    /// Canonical pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("timeline serializes")
    }
}

/// Parses and validates a timeline document.
pub fn load_timeline(text: &str) -> Result<MusicTimeline, TimelineError> {
    let doc: TimelineDocument = serde_json::from_str(text)?;
    doc.validate()
}
