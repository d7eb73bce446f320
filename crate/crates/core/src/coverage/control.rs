use std::collections::HashMap;

use super::{
    compute_partition, mass_centroids, CoverageError, DensityField, GaussianDensity, GridDomain, MassCentroid,
    Pigment, RobotState, VoronoiPartition,
};
use crate::geometry::Vec2;

/// `u = Σ_j M_j (C_j − x)` over the pigments a robot carries. Zero-mass
/// pigments contribute nothing.
pub fn control_input<'a>(per_pigment: impl IntoIterator<Item = &'a MassCentroid>, position: Vec2) -> Vec2 {
    per_pigment
        .into_iter()
        .filter_map(|mc| mc.centroid.map(|c| (c - position) * mc.mass))
        .fold(Vec2::ZERO, |acc, v| acc + v)
}

/// `α_j = M_j / Σ_k M_k`, uniform when every mass is zero.
pub fn pigment_proportions(masses: &[f64]) -> Vec<f64> {
    let total: f64 = masses.iter().sum();
    if total > 0.0 {
        masses.iter().map(|m| m / total).collect()
    } else {
        vec![1.0 / masses.len() as f64; masses.len()]
    }
}

/// Per-robot masses/centroids for each pigment plus the locational cost, from
/// one partition per distinct set of equipped robots.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEval {
    /// Indexed `[robot][pigment index]`; zero for pigments without a density
    /// or not carried.
    pub moments: Vec<[MassCentroid; 3]>,
    pub cost: f64,
}

impl CoverageEval {
    pub fn masses(&self, robot: usize) -> [f64; 3] {
        self.moments[robot].map(|m| m.mass)
    }
}

pub fn evaluate_coverage(
    robots: &[RobotState],
    fields: &[DensityField],
    grid: &GridDomain,
) -> Result<CoverageEval, CoverageError> {
    let mut moments = vec![[MassCentroid::default(); 3]; robots.len()];
    let mut cost = 0.0;
    let mut partitions: HashMap<Vec<bool>, VoronoiPartition> = HashMap::new();
    for field in fields {
        let membership: Vec<bool> = robots.iter().map(|r| r.equipment.carries(field.pigment)).collect();
        if !partitions.contains_key(&membership) {
            partitions.insert(membership.clone(), compute_partition(robots, field.pigment, grid)?);
        }
        let partition = &partitions[&membership];
        for (i, mc) in mass_centroids(partition, field, grid, robots.len()).into_iter().enumerate() {
            moments[i][field.pigment.index()] = mc;
        }
        cost += partition.distance_sq.iter().zip(&field.weights).map(|(d, w)| d * w).sum::<f64>();
    }
    Ok(CoverageEval { moments, cost })
}

/// `H = Σ_j Σ_i Σ_{q ∈ V_i^j} ‖q − x_i‖² φ_j(q) ΔA`.
pub fn locational_cost(
    robots: &[RobotState],
    densities: &[GaussianDensity],
    grid: &GridDomain,
) -> Result<f64, CoverageError> {
    let fields: Vec<DensityField> = densities.iter().map(|d| DensityField::sample(d, grid)).collect();
    Ok(evaluate_coverage(robots, &fields, grid)?.cost)
}

/// One explicit-Euler step of single-integrator coverage, `x ← x + dt·u`,
/// with optional speed saturation. Returns the cost before the step.
pub fn lloyd_step(
    robots: &mut [RobotState],
    densities: &[GaussianDensity],
    grid: &GridDomain,
    dt: f64,
    u_max: Option<f64>,
) -> Result<f64, CoverageError> {
    let fields: Vec<DensityField> = densities.iter().map(|d| DensityField::sample(d, grid)).collect();
    let eval = evaluate_coverage(robots, &fields, grid)?;
    for (robot, moments) in robots.iter_mut().zip(&eval.moments) {
        let carried = Pigment::ALL.iter().filter(|p| robot.equipment.carries(**p)).map(|p| &moments[p.index()]);
        let mut u = control_input(carried, robot.position);
        if let Some(limit) = u_max {
            let n = u.norm();
            if n > limit {
                u = u * (limit / n);
            }
        }
        robot.control = u;
        robot.position = grid.clamp(robot.position + u * dt);
    }
    Ok(eval.cost)
}
