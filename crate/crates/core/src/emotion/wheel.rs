use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::music::{ChordEvent, ChordQuality};

/// Circle-of-fifths layout: major-family chords on the outer ring, minor
/// family on the inner ring aligned with their relative major. C sits at
/// twelve o'clock and each fifth upward steps 30° clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordWheel {
    pub center: Vec2,
    pub r_out: f64,
    pub r_in: f64,
}

impl ChordWheel {
    pub const SLOT_DEGREES: f64 = 30.0;

    /// Wheel centred on the canvas with radii 0.4 and 0.25 of its smaller side.
    pub fn for_canvas(width: f64, height: f64) -> Self {
        let side = width.min(height);
        Self { center: Vec2::new(width / 2.0, height / 2.0), r_out: 0.4 * side, r_in: 0.25 * side }
    }

    /// Steps clockwise from C on the circle of fifths.
    pub fn fifths_index(pitch_class: u8) -> u8 {
        (pitch_class % 12 * 7) % 12
    }

    /// Slot index and radius for a chord; minor-family chords use their
    /// relative major's slot.
    pub fn slot(&self, root: u8, quality: ChordQuality) -> (u8, f64) {
        if quality.is_minor_family() {
            (Self::fifths_index((root + 3) % 12), self.r_in)
        } else {
            (Self::fifths_index(root), self.r_out)
        }
    }

    pub fn slot_angle(slot: u8) -> f64 {
        (90.0 - Self::SLOT_DEGREES * f64::from(slot)).to_radians()
    }

    pub fn position(&self, root: u8, quality: ChordQuality) -> Vec2 {
        let (slot, radius) = self.slot(root, quality);
        self.center + Vec2::from_angle(Self::slot_angle(slot)) * radius
    }
}

pub fn chord_to_canvas_position(chord: &ChordEvent, wheel: &ChordWheel) -> Vec2 {
    wheel.position(chord.root, chord.quality)
}
