//! Nearest points against brute-force minimization over densely sampled
//! boundaries, described independently of the set implementations.

use catchup_core::proxgeom::{
    prox_regularity_sampler, project, seeded, Ball, BallUnionComplement, Crescent, HalfSpace, Intersection, ProxSet,
    TwoBalls,
};
use catchup_core::vector::point;
use catchup_core::Point;
use rand::Rng;
use std::f64::consts::TAU;
use std::sync::Arc;

const ARC_SAMPLES: usize = 20_000;
const EDGE: f64 = 1e-12;

fn circle(c: [f64; 2], r: f64) -> impl Iterator<Item = [f64; 2]> {
    (0..ARC_SAMPLES).map(move |k| {
        let a = TAU * k as f64 / ARC_SAMPLES as f64;
        [c[0] + r * a.cos(), c[1] + r * a.sin()]
    })
}

fn norm(p: [f64; 2], c: [f64; 2]) -> f64 {
    (p[0] - c[0]).hypot(p[1] - c[1])
}

/// Corner points where two circles with centres on the first axis meet.
fn corners(a: f64, ra: f64, b: f64, rb: f64) -> [[f64; 2]; 2] {
    let x = (ra * ra - rb * rb + b * b - a * a) / (2.0 * (b - a));
    let y = (ra * ra - (x - a) * (x - a)).sqrt();
    [[x, y], [x, -y]]
}

/// A set given by a membership test and a finite boundary cloud.
struct Oracle {
    member: Box<dyn Fn([f64; 2]) -> bool>,
    boundary: Vec<[f64; 2]>,
}

impl Oracle {
    fn distance(&self, y: [f64; 2]) -> f64 {
        if (self.member)(y) {
            return 0.0;
        }
        self.boundary.iter().map(|&b| norm(b, y)).fold(f64::INFINITY, f64::min)
    }
}

/// Bound on the excess of the sampled distance over the true one for a
/// query at distance `d` from arcs of radius at most `r`, whose centres lie
/// within `far` of the query.
fn arc_gap(r: f64, far: f64, d: f64) -> f64 {
    let h = TAU / ARC_SAMPLES as f64;
    far * r * h * h / (8.0 * d.max(1e-3)) + 1e-12
}

fn check(set: &dyn ProxSet, oracle: &Oracle, r: f64, window: f64, seed: u64) -> usize {
    let mut rng = seeded(seed);
    let reach = set.prox_radius();
    let mut tested = 0;
    while tested < 400 {
        let y = [rng.random_range(-window..window), rng.random_range(-window..window)];
        let brute = oracle.distance(y);
        if brute >= 0.95 * reach {
            continue;
        }
        let yp = point(&y);
        let x = project(set, &yp).unwrap();
        let xa = [x[0], x[1]];
        let d = norm(xa, y);
        assert!((oracle.member)(xa) || oracle.distance(xa) <= 1e-9, "{}: P({y:?}) = {xa:?} not in the set", set.label());
        assert!(d <= brute + 1e-10, "{}: |y - P(y)| = {d} exceeds sampled distance {brute} at {y:?}", set.label());
        let gap = arc_gap(r, 4.0 * window, brute);
        assert!(d >= brute - gap, "{}: |y - P(y)| = {d} below sampled distance {brute} at {y:?}", set.label());
        tested += 1;
    }
    tested
}

#[test]
fn ball_complement() {
    let set = BallUnionComplement::ball_complement(point(&[0.5, -0.2]), 1.0);
    let oracle = Oracle { member: Box::new(|p| norm(p, [0.5, -0.2]) >= 1.0 - EDGE), boundary: circle([0.5, -0.2], 1.0).collect() };
    check(&set, &oracle, 1.0, 2.0, 1);
}

#[test]
fn cusp() {
    let set = BallUnionComplement::cusp(1.0);
    let member = |p: [f64; 2]| norm(p, [-1.0, 0.0]) >= 1.0 - EDGE && norm(p, [1.0, 0.0]) >= 1.0 - EDGE;
    let boundary = circle([-1.0, 0.0], 1.0).chain(circle([1.0, 0.0], 1.0)).filter(|&p| member(p)).collect();
    check(&set, &Oracle { member: Box::new(member), boundary }, 1.0, 2.5, 2);
}

#[test]
fn two_balls() {
    let set = TwoBalls::new(point(&[-2.0, 0.0]), point(&[2.0, 0.0]), 1.0).unwrap();
    let member = |p: [f64; 2]| norm(p, [-2.0, 0.0]) <= 1.0 + EDGE || norm(p, [2.0, 0.0]) <= 1.0 + EDGE;
    let boundary = circle([-2.0, 0.0], 1.0).chain(circle([2.0, 0.0], 1.0)).collect();
    check(&set, &Oracle { member: Box::new(member), boundary }, 1.0, 3.5, 3);
}

#[test]
fn crescent() {
    let set = Crescent::new(point(&[0.0, 0.0]), 1.0, point(&[1.2, 0.0]), 0.8).unwrap();
    let member = |p: [f64; 2]| norm(p, [0.0, 0.0]) <= 1.0 + EDGE && norm(p, [1.2, 0.0]) >= 0.8 - EDGE;
    let boundary = circle([0.0, 0.0], 1.0)
        .filter(|&p| norm(p, [1.2, 0.0]) >= 0.8 - EDGE)
        .chain(circle([1.2, 0.0], 0.8).filter(|&p| norm(p, [0.0, 0.0]) <= 1.0 + EDGE))
        .chain(corners(0.0, 1.0, 1.2, 0.8))
        .collect();
    check(&set, &Oracle { member: Box::new(member), boundary }, 1.0, 1.6, 4);
}

#[test]
fn ball_and_halfspace() {
    let ball = Ball::new(point(&[0.3, 0.1]), 0.7);
    let oracle = Oracle { member: Box::new(|p| norm(p, [0.3, 0.1]) <= 0.7 + EDGE), boundary: circle([0.3, 0.1], 0.7).collect() };
    check(&ball, &oracle, 0.7, 2.0, 5);

    let hs = HalfSpace::new(point(&[1.0, 1.0]), 0.5).unwrap();
    let mut rng = seeded(6);
    let n = [std::f64::consts::FRAC_1_SQRT_2; 2];
    for _ in 0..400 {
        let y = point(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
        let x = hs.nearest_point(&y);
        let excess = ((y[0] + y[1]) - 0.5).max(0.0) / 2f64.sqrt();
        let expect = [y[0] - excess * n[0], y[1] - excess * n[1]];
        assert!((x[0] - expect[0]).abs() < 1e-12 && (x[1] - expect[1]).abs() < 1e-12, "{y:?} -> {x:?}");
    }
}

#[test]
fn lens_intersection() {
    let a: Arc<dyn ProxSet> = Arc::new(Ball::new(point(&[-0.5, 0.0]), 1.0));
    let b: Arc<dyn ProxSet> = Arc::new(Ball::new(point(&[0.5, 0.0]), 1.0));
    let set = Intersection::new(vec![a, b]).unwrap();
    let member = |p: [f64; 2]| norm(p, [-0.5, 0.0]) <= 1.0 + EDGE && norm(p, [0.5, 0.0]) <= 1.0 + EDGE;
    let boundary = circle([-0.5, 0.0], 1.0)
        .filter(|&p| norm(p, [0.5, 0.0]) <= 1.0 + EDGE)
        .chain(circle([0.5, 0.0], 1.0).filter(|&p| norm(p, [-0.5, 0.0]) <= 1.0 + EDGE))
        .chain(corners(-0.5, 1.0, 0.5, 1.0))
        .collect();
    check(&set, &Oracle { member: Box::new(member), boundary }, 1.0, 2.0, 7);
}

#[test]
fn sampler_accepts_true_radius_and_rejects_a_larger_one() {
    let set = BallUnionComplement::ball_complement(Point::zeros(2), 1.0);
    let mut rng = seeded(8);
    assert!(prox_regularity_sampler(&set, 1.0, 2000, 20, &mut rng).is_none());
    let v = prox_regularity_sampler(&set, 1.5, 2000, 20, &mut rng).expect("violation at r = 1.5");
    assert!(v.defect > 0.0);
}
