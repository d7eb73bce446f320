use std::fmt;

use serde::{Deserialize, Serialize};

use super::Emotion;
use crate::music::{ChordEvent, ChordQuality, Key, Mode};

/// Harmonic role of a chord relative to the key; one row of the chord/emotion table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChordFunction {
    MajorTonic,
    MinorTonic,
    NaturalMinor,
    Dominant,
    Seventh,
    SecondaryDominant,
    MajorSubdominant,
    MajorSubdominant7,
    AddedSixthMajor,
    AddedSixthMinor,
    NeapolitanSixth,
    DiminishedSeventh,
    Augmented,
    MinorSixth,
}

impl ChordFunction {
    /// All functions in table order.
    pub const ALL: [ChordFunction; 14] = [
        ChordFunction::MajorTonic,
        ChordFunction::MinorTonic,
        ChordFunction::NaturalMinor,
        ChordFunction::Dominant,
        ChordFunction::Seventh,
        ChordFunction::SecondaryDominant,
        ChordFunction::MajorSubdominant,
        ChordFunction::MajorSubdominant7,
        ChordFunction::AddedSixthMajor,
        ChordFunction::AddedSixthMinor,
        ChordFunction::NeapolitanSixth,
        ChordFunction::DiminishedSeventh,
        ChordFunction::Augmented,
        ChordFunction::MinorSixth,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ChordFunction::MajorTonic => "Major tonic",
            ChordFunction::MinorTonic => "Minor tonic",
            ChordFunction::NaturalMinor => "Natural minor",
            ChordFunction::Dominant => "Dominant",
            ChordFunction::Seventh => "Seventh",
            ChordFunction::SecondaryDominant => "Secondary dominant",
            ChordFunction::MajorSubdominant => "Major subdominant",
            ChordFunction::MajorSubdominant7 => "Major subdominant 7th",
            ChordFunction::AddedSixthMajor => "Added sixth in a major",
            ChordFunction::AddedSixthMinor => "Added sixth in a minor",
            ChordFunction::NeapolitanSixth => "Neapolitan sixth",
            ChordFunction::DiminishedSeventh => "Diminished seventh",
            ChordFunction::Augmented => "Augmented",
            ChordFunction::MinorSixth => "Minor sixth",
        }
    }

    /// The quality a chord typically has in this role.
    pub fn canonical_quality(self) -> ChordQuality {
        match self {
            ChordFunction::MajorTonic
            | ChordFunction::Dominant
            | ChordFunction::MajorSubdominant
            | ChordFunction::NeapolitanSixth => ChordQuality::Major,
            ChordFunction::MinorTonic | ChordFunction::NaturalMinor => ChordQuality::Minor,
            ChordFunction::Seventh | ChordFunction::SecondaryDominant => ChordQuality::Dominant7,
            ChordFunction::MajorSubdominant7 => ChordQuality::Major7,
            ChordFunction::AddedSixthMajor => ChordQuality::Added6Major,
            ChordFunction::AddedSixthMinor => ChordQuality::Added6Minor,
            ChordFunction::DiminishedSeventh => ChordQuality::Diminished7,
            ChordFunction::Augmented => ChordQuality::Augmented,
            ChordFunction::MinorSixth => ChordQuality::Minor6,
        }
    }

    /// Emotions evoked by this chord function, in table order.
    pub fn emotions(self) -> &'static [Emotion] {
        use Emotion::*;
        match self {
            ChordFunction::MajorTonic => &[Serenity, Acceptance, Trust],
            ChordFunction::MinorTonic => &[Grief, Sadness, Anger],
            ChordFunction::NaturalMinor => &[Vigilance, Aggressiveness],
            ChordFunction::Dominant => &[Joy, Ecstasy, Amazement],
            ChordFunction::Seventh => &[Rage, Grief, Disgust],
            ChordFunction::SecondaryDominant => &[Surprise, BittersweetJoy],
            ChordFunction::MajorSubdominant => &[Joy, Admiration, Serenity],
            ChordFunction::MajorSubdominant7 => &[Pensiveness, Sadness, Yearning],
            ChordFunction::AddedSixthMajor => &[Love, Trust, Acceptance],
            ChordFunction::AddedSixthMinor => &[Grief, Sadness, Remorse],
            ChordFunction::NeapolitanSixth => &[Grief, Sadness, Pensiveness],
            ChordFunction::DiminishedSeventh => &[Fear, Despair, Terror],
            ChordFunction::Augmented => &[Amazement, Surprise, Ecstasy],
            ChordFunction::MinorSixth => &[Fear, Anxiety, Apprehension],
        }
    }
}

impl fmt::Display for ChordFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Emotion list for a chord function.
pub fn chord_to_emotions(function: ChordFunction) -> Vec<Emotion> {
    function.emotions().to_vec()
}

/// Size of the symmetric difference between two quality templates.
fn quality_distance(a: ChordQuality, b: ChordQuality) -> u32 {
    let ta = a.template(0);
    let tb = b.template(0);
    ta.difference(tb).len() + tb.difference(ta).len()
}

/// Assigns a chord its table row against the global key.
pub fn classify_function(chord: &ChordEvent, key: Key) -> ChordFunction {
    use ChordQuality as Q;
    let degree = key.degree_of(chord.root);
    match (chord.quality, degree) {
        (Q::Diminished7, _) => ChordFunction::DiminishedSeventh,
        (Q::Augmented, _) => ChordFunction::Augmented,
        (Q::Minor6, _) => ChordFunction::MinorSixth,
        (Q::Added6Major, _) => ChordFunction::AddedSixthMajor,
        (Q::Added6Minor, _) => ChordFunction::AddedSixthMinor,
        (Q::Major, 0) => ChordFunction::MajorTonic,
        (Q::Minor, 0) => ChordFunction::MinorTonic,
        (Q::Major, 7) => ChordFunction::Dominant,
        (Q::Dominant7, 7) => ChordFunction::Seventh,
        (Q::Major, 5) => ChordFunction::MajorSubdominant,
        (Q::Dominant7 | Q::Major7, 5) => ChordFunction::MajorSubdominant7,
        (Q::Major, 1) => ChordFunction::NeapolitanSixth,
        (Q::Dominant7, _) => ChordFunction::SecondaryDominant,
        (Q::Minor, 2 | 4 | 9) if key.mode == Mode::Major => ChordFunction::NaturalMinor,
        (quality, _) => nearest_by_quality(quality),
    }
}

/// First row (in table order) whose canonical quality is closest to `quality`.
fn nearest_by_quality(quality: ChordQuality) -> ChordFunction {
    ChordFunction::ALL
        .into_iter()
        .min_by_key(|f| quality_distance(quality, f.canonical_quality()))
        .expect("non-empty table")
}
