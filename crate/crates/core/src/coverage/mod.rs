//! Heterogeneous coverage control on a discretised canvas.
//!
//! Each pigment has its own Gaussian importance density and its own Voronoi
//! partition restricted to the robots carrying that pigment. Integrals are
//! midpoint sums over a [`GridDomain`], so partitions, masses and centroids are
//! mutually consistent and can be checked by exhaustive summation.

mod control;
mod density;
mod grid;
mod partition;

pub use control::{control_input, evaluate_coverage, locational_cost, lloyd_step, pigment_proportions, CoverageEval};
pub use density::{DensityField, GaussianDensity};
pub use grid::GridDomain;
pub use partition::{compute_partition, mass_centroid, mass_centroids, MassCentroid, VoronoiPartition};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{wrap_angle, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum CoverageError {
    #[error("color unassigned: no robot carries {0}")]
    ColorUnassigned(Pigment),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pigment {
    #[serde(rename = "C")]
    Cyan,
    #[serde(rename = "M")]
    Magenta,
    #[serde(rename = "Y")]
    Yellow,
}

impl Pigment {
    pub const ALL: [Pigment; 3] = [Pigment::Cyan, Pigment::Magenta, Pigment::Yellow];

    pub fn index(self) -> usize {
        self as usize
    }

    /// RGB channel absorbed by this pigment: cyan absorbs red, magenta green,
    /// yellow blue.
    pub fn absorbed_channel(self) -> usize {
        self.index()
    }

    pub fn letter(self) -> char {
        match self {
            Pigment::Cyan => 'C',
            Pigment::Magenta => 'M',
            Pigment::Yellow => 'Y',
        }
    }
}

impl fmt::Display for Pigment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pigment::Cyan => "cyan",
            Pigment::Magenta => "magenta",
            Pigment::Yellow => "yellow",
        };
        f.write_str(name)
    }
}

/// The non-empty set of pigments a robot carries. Serialized as a string of
/// letters, e.g. `"CMY"` or `"MY"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Equipment(u8);

impl Equipment {
    pub const CMY: Equipment = Equipment(0b111);

    pub fn new(pigments: &[Pigment]) -> Option<Self> {
        let mask = pigments.iter().fold(0u8, |m, p| m | 1 << p.index());
        (mask != 0).then_some(Equipment(mask))
    }

    pub fn only(p: Pigment) -> Self {
        Equipment(1 << p.index())
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn carries(self, p: Pigment) -> bool {
        self.0 & (1 << p.index()) != 0
    }

    pub fn pigments(self) -> impl Iterator<Item = Pigment> {
        Pigment::ALL.into_iter().filter(move |&p| self.carries(p))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Equipment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.pigments() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Equipment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pigments = Vec::new();
        for c in s.chars() {
            let p = match c.to_ascii_uppercase() {
                'C' => Pigment::Cyan,
                'M' => Pigment::Magenta,
                'Y' => Pigment::Yellow,
                other => return Err(format!("unknown pigment `{other}` in equipment `{s}`")),
            };
            if pigments.contains(&p) {
                return Err(format!("pigment `{}` repeated in equipment `{s}`", p.letter()));
            }
            pigments.push(p);
        }
        Equipment::new(&pigments).ok_or_else(|| "equipment must carry at least one pigment".to_string())
    }
}

impl Serialize for Equipment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Equipment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pose, equipment and last control input of one swarm member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub index: usize,
    pub position: Vec2,
    /// Heading in `(-pi, pi]`.
    pub heading: f64,
    pub equipment: Equipment,
    /// Last single-integrator control, canvas units per second.
    pub control: Vec2,
}

impl RobotState {
    pub fn new(index: usize, position: Vec2, heading: f64, equipment: Equipment) -> Self {
        Self { index, position, heading: wrap_angle(heading), equipment, control: Vec2::ZERO }
    }
}
