//! Chords to emotions, colours and canvas positions; tempo to the motion parameter.

mod color;
mod function;
mod motion;
mod palette;
mod wheel;

pub use color::{rgb_to_cmy, ColorCmy, ColorRgb};
pub use function::{chord_to_emotions, classify_function, ChordFunction};
pub use motion::{tempo_to_l, MotionParams, MotionParamsError};
pub use palette::{emotions_to_color, Palette, PaletteError, DEFAULT_PALETTE_JSON};
pub use wheel::{chord_to_canvas_position, ChordWheel};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intensity {
    Mild,
    Basic,
    Intense,
}

/// The closed emotion vocabulary used by the chord table, named after
/// Plutchik's wheel and its dyads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Emotion {
    Serenity,
    Acceptance,
    Trust,
    Grief,
    Sadness,
    Anger,
    Vigilance,
    Aggressiveness,
    Joy,
    Ecstasy,
    Amazement,
    Rage,
    Disgust,
    Surprise,
    BittersweetJoy,
    Admiration,
    Pensiveness,
    Yearning,
    Love,
    Remorse,
    Fear,
    Despair,
    Terror,
    Anxiety,
    Apprehension,
}

impl Emotion {
    pub const ALL: [Emotion; 25] = [
        Emotion::Serenity,
        Emotion::Acceptance,
        Emotion::Trust,
        Emotion::Grief,
        Emotion::Sadness,
        Emotion::Anger,
        Emotion::Vigilance,
        Emotion::Aggressiveness,
        Emotion::Joy,
        Emotion::Ecstasy,
        Emotion::Amazement,
        Emotion::Rage,
        Emotion::Disgust,
        Emotion::Surprise,
        Emotion::BittersweetJoy,
        Emotion::Admiration,
        Emotion::Pensiveness,
        Emotion::Yearning,
        Emotion::Love,
        Emotion::Remorse,
        Emotion::Fear,
        Emotion::Despair,
        Emotion::Terror,
        Emotion::Anxiety,
        Emotion::Apprehension,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Emotion::Serenity => "Serenity",
            Emotion::Acceptance => "Acceptance",
            Emotion::Trust => "Trust",
            Emotion::Grief => "Grief",
            Emotion::Sadness => "Sadness",
            Emotion::Anger => "Anger",
            Emotion::Vigilance => "Vigilance",
            Emotion::Aggressiveness => "Aggressiveness",
            Emotion::Joy => "Joy",
            Emotion::Ecstasy => "Ecstasy",
            Emotion::Amazement => "Amazement",
            Emotion::Rage => "Rage",
            Emotion::Disgust => "Disgust",
            Emotion::Surprise => "Surprise",
            Emotion::BittersweetJoy => "Bittersweet joy",
            Emotion::Admiration => "Admiration",
            Emotion::Pensiveness => "Pensiveness",
            Emotion::Yearning => "Yearning",
            Emotion::Love => "Love",
            Emotion::Remorse => "Remorse",
            Emotion::Fear => "Fear",
            Emotion::Despair => "Despair",
            Emotion::Terror => "Terror",
            Emotion::Anxiety => "Anxiety",
            Emotion::Apprehension => "Apprehension",
        }
    }

    /// Position on the petal: outer (mild), middle (basic) or inner (intense).
    /// Dyads between petals count as basic.
    pub fn intensity(self) -> Intensity {
        match self {
            Emotion::Serenity | Emotion::Acceptance | Emotion::Pensiveness | Emotion::Apprehension => {
                Intensity::Mild
            }
            Emotion::Ecstasy
            | Emotion::Admiration
            | Emotion::Terror
            | Emotion::Amazement
            | Emotion::Grief
            | Emotion::Rage
            | Emotion::Vigilance => Intensity::Intense,
            _ => Intensity::Basic,
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown emotion label `{s}`"))
    }
}

impl Serialize for Emotion {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Emotion {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
