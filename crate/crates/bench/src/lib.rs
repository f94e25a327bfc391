//! Fixtures shared by the criterion benchmarks.

use catchup_core::proxgeom::{seeded, BallUnionComplement, Crescent, FixedFamily, InteriorParams, ParamFamily, ProxSet, TwoBalls};
use catchup_core::vector::point;
use catchup_core::{Point, StepFn};
use std::sync::Arc;

/// Ball complement with the interior parameters used across the catalog.
pub fn ball_complement() -> BallUnionComplement {
    BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0).with_interior(InteriorParams { rho: 0.1, big_r: 3.0 })
}

pub fn fixed_family(set: impl ProxSet + 'static) -> Arc<dyn ParamFamily> {
    Arc::new(FixedFamily { set: Arc::new(set) })
}

/// Sets whose projections are benchmarked, labelled.
pub fn projection_sets() -> Vec<(&'static str, Box<dyn ProxSet>)> {
    vec![
        ("ball_complement", Box::new(ball_complement())),
        ("cusp", Box::new(BallUnionComplement::cusp(1.0))),
        ("two_balls", Box::new(TwoBalls::new(point(&[-2.0, 0.0]), point(&[2.0, 0.0]), 1.0).unwrap())),
        ("crescent", Box::new(Crescent::new(point(&[0.0, 0.0]), 1.0, point(&[1.2, 0.0]), 0.8).unwrap())),
    ]
}

/// Query points scattered around the unit disc.
pub fn queries(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = seeded(seed);
    (0..count).map(|_| catchup_core::proxgeom::random_in_ball(2, 1.8, &mut rng)).collect()
}

/// `u` oscillating along two directions with `steps` plateaus, and a zero `w`.
pub fn oscillating_input(steps: usize) -> (StepFn<Point>, StepFn<Point>) {
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let dirs = [point(&[-1.0, 1.0]), point(&[-1.0, -1.0])];
    let u = (0..=steps)
        .map(|k| match k % 4 {
            1 => &dirs[0] * (0.045 / 2f64.sqrt()),
            3 => &dirs[1] * (0.045 / 2f64.sqrt()),
            _ => point(&[0.0, 0.0]),
        })
        .collect();
    let w = vec![point(&[0.0]); steps + 1];
    (StepFn::new(times.clone(), u).unwrap(), StepFn::new(times, w).unwrap())
}

/// A pair of random vector step functions on `[0, 1]` with `n` breakpoints each.
pub fn step_pair(n: usize, seed: u64) -> (StepFn<Point>, StepFn<Point>) {
    let mut rng = seeded(seed);
    let mut make = || {
        let mut t: Vec<f64> = (1..n - 1).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        t.push(0.0);
        t.push(1.0);
        t.sort_by(f64::total_cmp);
        t.dedup();
        let v = t.iter().map(|_| catchup_core::proxgeom::random_in_ball(3, 1.0, &mut rng)).collect();
        StepFn::new(t, v).unwrap()
    };
    (make(), make())
}
