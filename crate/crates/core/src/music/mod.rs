//! Symbolic music analysis: MIDI and JSON timelines in, chords, key and tempo out.

mod chords;
mod key;
mod midi;
mod pipeline;
mod tempo;
mod timeline;

pub use chords::{detect_chords, score_template, ChordDetector, NON_CHORD_TONE_PENALTY};
pub use key::{estimate_key, key_correlations, KeyError, MAJOR_PROFILE, MINOR_PROFILE};
pub use midi::{parse_midi, MidiError, ParsedMidi, DEFAULT_BPM};
pub use pipeline::{analyze_midi, AnalysisError};
pub use tempo::{extract_tempo, TEMPO_CHANGE_THRESHOLD, TEMPO_WINDOW_SECONDS};
pub use timeline::{load_timeline, TimelineDocument, TimelineError};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::emotion::ChordFunction;

pub const PITCH_CLASS_NAMES: [&str; 12] =
    ["C", "C#", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B"];

/// A sounding note in absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteEvent {
    pub onset: f64,
    pub duration: f64,
    pub pitch: u8,
    pub velocity: u8,
}

impl NoteEvent {
    pub fn new(onset: f64, duration: f64, pitch: u8, velocity: u8) -> Self {
        Self { onset, duration, pitch, velocity }
    }

    pub fn end(&self) -> f64 {
        self.onset + self.duration
    }

    pub fn pitch_class(&self) -> u8 {
        self.pitch % 12
    }

    pub fn transposed(&self, semitones: i32) -> Self {
        let pitch = (self.pitch as i32 + semitones).clamp(0, 127) as u8;
        Self { pitch, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Major,
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Key {
    pub tonic: u8,
    pub mode: Mode,
}

impl Key {
    pub fn new(tonic: u8, mode: Mode) -> Self {
        Self { tonic: tonic % 12, mode }
    }

    pub fn major(tonic: u8) -> Self {
        Self::new(tonic, Mode::Major)
    }

    pub fn minor(tonic: u8) -> Self {
        Self::new(tonic, Mode::Minor)
    }

    /// Scale degree of `pitch_class` in semitones above the tonic.
    pub fn degree_of(&self, pitch_class: u8) -> u8 {
        (pitch_class % 12 + 12 - self.tonic) % 12
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Major => "major",
            Mode::Minor => "minor",
        };
        write!(f, "{}:{}", PITCH_CLASS_NAMES[self.tonic as usize], mode)
    }
}

impl FromStr for Key {
    type Err = String;

    /// Parses `"C:major"`, `"f#:minor"`, `"Bb:minor"` or `"9:minor"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tonic, mode) = s
            .split_once(':')
            .ok_or_else(|| format!("key `{s}` must look like TONIC:major|minor"))?;
        let mode = match mode.to_ascii_lowercase().as_str() {
            "major" | "maj" => Mode::Major,
            "minor" | "min" => Mode::Minor,
            other => return Err(format!("unknown mode `{other}`")),
        };
        let tonic = parse_pitch_class(tonic).ok_or_else(|| format!("unknown tonic `{tonic}`"))?;
        Ok(Key::new(tonic, mode))
    }
}

fn parse_pitch_class(s: &str) -> Option<u8> {
    if let Ok(n) = s.parse::<u8>() {
        return (n < 12).then_some(n);
    }
    let mut chars = s.chars();
    let letter = chars.next()?.to_ascii_uppercase();
    let base: i32 = match letter {
        'C' => 0,
        'D' => 2,
        'E' => 4,
        'F' => 5,
        'G' => 7,
        'A' => 9,
        'B' => 11,
        _ => return None,
    };
    let mut offset = 0;
    for c in chars {
        match c {
            '#' | 's' => offset += 1,
            'b' => offset -= 1,
            _ => return None,
        }
    }
    Some((base + offset).rem_euclid(12) as u8)
}

/// A set of pitch classes stored as a 12-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PitchClassSet(u16);

impl PitchClassSet {
    pub const EMPTY: PitchClassSet = PitchClassSet(0);

    pub fn from_mask(mask: u16) -> Self {
        Self(mask & 0x0fff)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, pc: u8) {
        self.0 |= 1 << (pc % 12);
    }

    pub fn contains(self, pc: u8) -> bool {
        self.0 & (1 << (pc % 12)) != 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: PitchClassSet) -> PitchClassSet {
        PitchClassSet(self.0 & other.0)
    }

    pub fn difference(self, other: PitchClassSet) -> PitchClassSet {
        PitchClassSet(self.0 & !other.0)
    }

    /// Rotates every member up by `semitones`.
    pub fn transposed(self, semitones: u8) -> PitchClassSet {
        let k = semitones % 12;
        let m = self.0 as u32;
        PitchClassSet((((m << k) | (m >> (12 - k))) & 0x0fff) as u16)
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0..12u8).filter(move |&pc| self.contains(pc))
    }
}

impl FromIterator<u8> for PitchClassSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut set = PitchClassSet::EMPTY;
        for pc in iter {
            set.insert(pc);
        }
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordQuality {
    Major,
    Minor,
    Dominant7,
    /// Major seventh chord, the diatonic seventh chord on the subdominant.
    Major7,
    Diminished7,
    Augmented,
    /// Minor triad with a minor sixth above the root.
    Minor6,
    Added6Major,
    Added6Minor,
    Other,
}

impl ChordQuality {
    /// Every quality that has a template, in tie-break order.
    pub const TEMPLATED: [ChordQuality; 9] = [
        ChordQuality::Major,
        ChordQuality::Minor,
        ChordQuality::Dominant7,
        ChordQuality::Major7,
        ChordQuality::Diminished7,
        ChordQuality::Augmented,
        ChordQuality::Minor6,
        ChordQuality::Added6Major,
        ChordQuality::Added6Minor,
    ];

    /// Intervals above the root. `Other` has none.
    pub fn intervals(self) -> &'static [u8] {
        match self {
            ChordQuality::Major => &[0, 4, 7],
            ChordQuality::Minor => &[0, 3, 7],
            ChordQuality::Dominant7 => &[0, 4, 7, 10],
            ChordQuality::Major7 => &[0, 4, 7, 11],
            ChordQuality::Diminished7 => &[0, 3, 6, 9],
            ChordQuality::Augmented => &[0, 4, 8],
            ChordQuality::Minor6 => &[0, 3, 7, 8],
            ChordQuality::Added6Major => &[0, 4, 7, 9],
            ChordQuality::Added6Minor => &[0, 3, 7, 9],
            ChordQuality::Other => &[],
        }
    }

    pub fn template(self, root: u8) -> PitchClassSet {
        self.intervals().iter().map(|i| (root + i) % 12).collect()
    }

    /// Minor-family chords sit on the inner ring of the chord wheel.
    pub fn is_minor_family(self) -> bool {
        matches!(
            self,
            ChordQuality::Minor
                | ChordQuality::Minor6
                | ChordQuality::Added6Minor
                | ChordQuality::Diminished7
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ChordQuality::Major => "major",
            ChordQuality::Minor => "minor",
            ChordQuality::Dominant7 => "dominant7",
            ChordQuality::Major7 => "major7",
            ChordQuality::Diminished7 => "diminished7",
            ChordQuality::Augmented => "augmented",
            ChordQuality::Minor6 => "minor6",
            ChordQuality::Added6Major => "added6major",
            ChordQuality::Added6Minor => "added6minor",
            ChordQuality::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordEvent {
    pub onset: f64,
    pub duration: f64,
    pub root: u8,
    pub quality: ChordQuality,
    pub function: ChordFunction,
    pub pitch_classes: PitchClassSet,
}

impl ChordEvent {
    /// Builds a chord whose pitch-class set is its quality template and whose
    /// function is classified against `key`.
    pub fn from_template(onset: f64, duration: f64, root: u8, quality: ChordQuality, key: Key) -> Self {
        let root = root % 12;
        let mut pitch_classes = quality.template(root);
        if pitch_classes.is_empty() {
            pitch_classes.insert(root);
        }
        let mut chord = ChordEvent {
            onset,
            duration,
            root,
            quality,
            function: ChordFunction::MajorTonic,
            pitch_classes,
        };
        chord.function = crate::emotion::classify_function(&chord, key);
        chord
    }

    pub fn end(&self) -> f64 {
        self.onset + self.duration
    }

    pub fn label(&self) -> String {
        format!("{} {}", PITCH_CLASS_NAMES[self.root as usize], self.quality.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TempoEvent {
    pub onset: f64,
    pub bpm: f64,
}

impl TempoEvent {
    pub fn new(onset: f64, bpm: f64) -> Self {
        Self { onset, bpm }
    }
}

/// Time-ordered chords and tempi of a piece against one global key.
#[derive(Debug, Clone, PartialEq)]
pub struct MusicTimeline {
    pub key: Key,
    pub chords: Vec<ChordEvent>,
    pub tempos: Vec<TempoEvent>,
    pub duration: f64,
}

impl MusicTimeline {
    /// Total duration implied by the events: the latest chord end or tempo onset.
    pub fn implied_duration(chords: &[ChordEvent], tempos: &[TempoEvent]) -> f64 {
        chords
            .iter()
            .map(ChordEvent::end)
            .chain(tempos.iter().map(|t| t.onset))
            .fold(0.0, f64::max)
    }

    /// A timeline with no chords and a single default tempo.
    pub fn silent(key: Key, bpm: f64) -> Self {
        Self { key, chords: Vec::new(), tempos: vec![TempoEvent::new(0.0, bpm)], duration: 0.0 }
    }
}
