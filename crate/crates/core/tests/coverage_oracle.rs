//! Coverage quantities against exhaustive per-cell evaluation.

use musicswarm_core::coverage::{
    compute_partition, control_input, evaluate_coverage, locational_cost, lloyd_step, mass_centroid, DensityField,
    Equipment, GaussianDensity, GridDomain, Pigment, RobotState,
};
use musicswarm_core::Vec2;
use proptest::prelude::*;

fn brute_owner(robots: &[RobotState], pigment: Pigment, q: Vec2) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for r in robots.iter().filter(|r| r.equipment.carries(pigment)) {
        let d = (q.x - r.position.x).powi(2) + (q.y - r.position.y).powi(2);
        if d < best_d {
            best_d = d;
            best = r.index;
        }
    }
    best
}

fn brute_cost(robots: &[RobotState], densities: &[GaussianDensity], grid: &GridDomain) -> f64 {
    let mut h = 0.0;
    for d in densities {
        for cell in 0..grid.cell_count() {
            let q = grid.cell_center(cell);
            let o = brute_owner(robots, d.pigment, q);
            h += q.distance_squared(robots[o].position) * d.eval(q) * grid.cell_area();
        }
    }
    h
}

fn equipment() -> impl Strategy<Value = Equipment> {
    (1u8..8).prop_map(|m| {
        let ps: Vec<Pigment> = Pigment::ALL.into_iter().filter(|p| m & (1 << p.index()) != 0).collect();
        Equipment::new(&ps).unwrap()
    })
}

fn scenario() -> impl Strategy<Value = (GridDomain, Vec<RobotState>, Vec<GaussianDensity>)> {
    (8usize..=32, 8usize..=32, 2usize..=5).prop_flat_map(|(nx, ny, n)| {
        let robots = proptest::collection::vec((0.0..40.0f64, 0.0..30.0f64, equipment()), n);
        let dens = proptest::collection::vec((0.0..40.0f64, 0.0..30.0f64, 1.0..15.0f64, 1.0..15.0f64, 0.1..5.0f64), 3);
        (Just(GridDomain::new(40.0, 30.0, nx, ny).unwrap()), robots, dens).prop_map(|(g, rs, ds)| {
            let mut robots: Vec<RobotState> = rs
                .into_iter()
                .enumerate()
                .map(|(i, (x, y, e))| RobotState::new(i, Vec2::new(x, y), 0.0, e))
                .collect();
            robots[0].equipment = Equipment::CMY;
            let densities = ds
                .into_iter()
                .zip(Pigment::ALL)
                .map(|((x, y, sx, sy, k), p)| GaussianDensity::new(p, Vec2::new(x, y), Vec2::new(sx, sy), k).unwrap())
                .collect();
            (g, robots, densities)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_is_nearest_equipped_robot((grid, robots, densities) in scenario()) {
        for d in &densities {
            let p = compute_partition(&robots, d.pigment, &grid).unwrap();
            for cell in 0..grid.cell_count() {
                prop_assert_eq!(p.owner(cell), brute_owner(&robots, d.pigment, grid.cell_center(cell)));
            }
        }
    }

    #[test]
    fn masses_sum_to_total((grid, robots, densities) in scenario()) {
        for d in &densities {
            let p = compute_partition(&robots, d.pigment, &grid).unwrap();
            let total = DensityField::sample(d, &grid).total();
            let sum: f64 = (0..robots.len()).map(|i| mass_centroid(&p, i, d, &grid).mass).sum();
            prop_assert!((sum - total).abs() <= 1e-12 * total, "{} vs {}", sum, total);
        }
    }

    #[test]
    fn cost_matches_brute_force((grid, robots, densities) in scenario()) {
        let fast = locational_cost(&robots, &densities, &grid).unwrap();
        let slow = brute_cost(&robots, &densities, &grid);
        prop_assert!((fast - slow).abs() <= 1e-9 * slow.max(1e-300));
    }

    #[test]
    fn control_is_sum_over_carried((grid, robots, densities) in scenario()) {
        let fields: Vec<DensityField> = densities.iter().map(|d| DensityField::sample(d, &grid)).collect();
        let eval = evaluate_coverage(&robots, &fields, &grid).unwrap();
        for r in &robots {
            let mut expect = Vec2::ZERO;
            for d in densities.iter().filter(|d| r.equipment.carries(d.pigment)) {
                let mut m = 0.0;
                let mut mx = Vec2::ZERO;
                for cell in 0..grid.cell_count() {
                    let q = grid.cell_center(cell);
                    if brute_owner(&robots, d.pigment, q) == r.index {
                        let w = d.eval(q) * grid.cell_area();
                        m += w;
                        mx += q * w;
                    }
                }
                if m > 0.0 {
                    expect += (mx / m - r.position) * m;
                }
            }
            let carried = r.equipment.pigments().map(|p| &eval.moments[r.index][p.index()]);
            let got = control_input(carried, r.position);
            prop_assert!(got.distance(expect) <= 1e-9 * (1.0 + expect.norm()), "{:?} vs {:?}", got, expect);
        }
    }
}

#[test]
fn lloyd_descent_is_monotone() {
    let grid = GridDomain::square(500.0, 96).unwrap();
    let densities: Vec<GaussianDensity> = Pigment::ALL
        .iter()
        .map(|&p| GaussianDensity::isotropic(p, Vec2::new(300.0, 280.0), 40.0, 10.0).unwrap())
        .collect();
    let mut robots: Vec<RobotState> = (0..4)
        .map(|i| RobotState::new(i, Vec2::new(60.0 + 30.0 * i as f64, 440.0 - 20.0 * i as f64), 0.0, Equipment::CMY))
        .collect();
    let mut costs = Vec::new();
    for _ in 0..200 {
        costs.push(lloyd_step(&mut robots, &densities, &grid, 0.02, None).unwrap());
    }
    for w in costs.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
    }
    assert!(costs[199] < 0.1 * costs[0]);
}
