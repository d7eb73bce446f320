use serde::{Deserialize, Serialize};

use super::{CoverageError, DensityField, GaussianDensity, GridDomain, Pigment, RobotState};
use crate::geometry::Vec2;

/// Per-pigment nearest-robot assignment of grid cells. Only robots carrying
/// the pigment take part.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiPartition {
    pub pigment: Pigment,
    /// Owning robot (position in the robot slice) for each cell.
    pub owners: Vec<usize>,
    /// Squared distance from each cell centre to its owner.
    pub distance_sq: Vec<f64>,
}

impl VoronoiPartition {
    pub fn owner(&self, cell: usize) -> usize {
        self.owners[cell]
    }

    pub fn cells_of(&self, robot: usize) -> impl Iterator<Item = usize> + '_ {
        self.owners.iter().enumerate().filter(move |(_, &o)| o == robot).map(|(c, _)| c)
    }
}

/// Density mass and centroid of one robot's cell for one pigment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MassCentroid {
    pub mass: f64,
    /// `None` when the mass is zero.
    pub centroid: Option<Vec2>,
}

impl MassCentroid {
    fn from_moments(mass: f64, first: Vec2) -> Self {
        let centroid = (mass > 0.0).then(|| first / mass);
        Self { mass, centroid }
    }
}

/// Assigns each cell centre to the nearest robot carrying `pigment`; ties go
/// to the lower robot index.
pub fn compute_partition(
    robots: &[RobotState],
    pigment: Pigment,
    grid: &GridDomain,
) -> Result<VoronoiPartition, CoverageError> {
    let equipped: Vec<(usize, Vec2)> = robots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.equipment.carries(pigment))
        .map(|(i, r)| (i, r.position))
        .collect();
    if equipped.is_empty() {
        return Err(CoverageError::ColorUnassigned(pigment));
    }

    let n = grid.cell_count();
    let mut owners = Vec::with_capacity(n);
    let mut distance_sq = Vec::with_capacity(n);
    let xs: Vec<f64> = (0..grid.nx).map(|ix| grid.column_center(ix)).collect();
    let mut dy2 = vec![0.0; equipped.len()];
    for iy in 0..grid.ny {
        let y = grid.row_center(iy);
        for (slot, (_, p)) in dy2.iter_mut().zip(&equipped) {
            *slot = (y - p.y) * (y - p.y);
        }
        for &x in &xs {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (k, (_, p)) in equipped.iter().enumerate() {
                let d = (x - p.x) * (x - p.x) + dy2[k];
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            owners.push(equipped[best].0);
            distance_sq.push(best_d);
        }
    }
    Ok(VoronoiPartition { pigment, owners, distance_sq })
}

/// Mass and centroid of robot `robot`'s cell under `density`, by direct
/// evaluation at each owned cell centre.
pub fn mass_centroid(
    partition: &VoronoiPartition,
    robot: usize,
    density: &GaussianDensity,
    grid: &GridDomain,
) -> MassCentroid {
    debug_assert_eq!(partition.pigment, density.pigment);
    let area = grid.cell_area();
    let mut mass = 0.0;
    let mut first = Vec2::ZERO;
    for cell in partition.cells_of(robot) {
        let q = grid.cell_center(cell);
        let w = density.eval(q) * area;
        mass += w;
        first += q * w;
    }
    MassCentroid::from_moments(mass, first)
}

/// Masses and centroids of every robot in one pass over a sampled field. The
/// partition may come from another pigment carried by the same robots.
pub fn mass_centroids(
    partition: &VoronoiPartition,
    field: &DensityField,
    grid: &GridDomain,
    robot_count: usize,
) -> Vec<MassCentroid> {
    let mut mass = vec![0.0; robot_count];
    let mut first = vec![Vec2::ZERO; robot_count];
    let xs: Vec<f64> = (0..grid.nx).map(|ix| grid.column_center(ix)).collect();
    for iy in 0..grid.ny {
        let y = grid.row_center(iy);
        let row = iy * grid.nx;
        for (ix, &x) in xs.iter().enumerate() {
            let cell = row + ix;
            let w = field.weights[cell];
            let o = partition.owners[cell];
            mass[o] += w;
            first[o].x += x * w;
            first[o].y += y * w;
        }
    }
    mass.into_iter().zip(first).map(|(m, f)| MassCentroid::from_moments(m, f)).collect()
}
