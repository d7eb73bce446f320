//! Emotion label → RGB lookup table.
//!
//! The bundled table follows the usual rendering of Plutchik's wheel: the joy
//! petal is yellow, trust green, fear dark green, surprise light blue, sadness
//! blue, disgust purple, anger red and anticipation orange. Mild tiers are
//! lighter, intense tiers darker, dyads sit between their parent petals.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::{ColorRgb, Emotion};

pub const DEFAULT_PALETTE_JSON: &str = include_str!("../../data/plutchik_palette.json");

#[derive(Debug, Error)]
pub enum PaletteError {
    #[error("palette JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("palette file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("palette: unknown emotion label `{0}`")]
    UnknownLabel(String),
    #[error("palette: no colour for emotion `{0}`")]
    MissingLabel(String),
    #[error("palette: colour for `{label}` has channel {value} outside [0, 1]")]
    ChannelRange { label: String, value: f64 },
    #[error("cannot mix an empty emotion list")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    colors: BTreeMap<Emotion, ColorRgb>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette::from_json(DEFAULT_PALETTE_JSON).expect("bundled palette is valid")
    }
}

impl Palette {
    /// Parses `{label: [r, g, b]}` with channels in `[0, 1]`. Every label must
    /// belong to the emotion vocabulary; labels may be missing.
    pub fn from_json(text: &str) -> Result<Self, PaletteError> {
        let raw: BTreeMap<String, [f64; 3]> = serde_json::from_str(text)?;
        let mut colors = BTreeMap::new();
        for (label, [r, g, b]) in raw {
            let emotion: Emotion = label.parse().map_err(|_| PaletteError::UnknownLabel(label.clone()))?;
            for v in [r, g, b] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(PaletteError::ChannelRange { label, value: v });
                }
            }
            colors.insert(emotion, ColorRgb::new(r, g, b));
        }
        Ok(Self { colors })
    }

    pub fn load(path: &Path) -> Result<Self, PaletteError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PaletteError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn get(&self, emotion: Emotion) -> Result<ColorRgb, PaletteError> {
        self.colors
            .get(&emotion)
            .copied()
            .ok_or_else(|| PaletteError::MissingLabel(emotion.label().to_string()))
    }

    pub fn insert(&mut self, emotion: Emotion, color: ColorRgb) {
        self.colors.insert(emotion, color);
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Arithmetic mean of the palette colours of `emotions`.
    pub fn mix(&self, emotions: &[Emotion]) -> Result<ColorRgb, PaletteError> {
        if emotions.is_empty() {
            return Err(PaletteError::Empty);
        }
        let mut sum = [0.0; 3];
        for &e in emotions {
            let c = self.get(e)?;
            sum[0] += c.r;
            sum[1] += c.g;
            sum[2] += c.b;
        }
        let n = emotions.len() as f64;
        Ok(ColorRgb::new(sum[0] / n, sum[1] / n, sum[2] / n))
    }
}

pub fn emotions_to_color(emotions: &[Emotion], palette: &Palette) -> Result<ColorRgb, PaletteError> {
    palette.mix(emotions)
}
