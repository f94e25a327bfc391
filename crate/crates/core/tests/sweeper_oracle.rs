use catchup_core::proxgeom::{seeded, Ball, BallUnionComplement, BoxSet, FixedFamily, InteriorParams, ParamFamily, ProxSet};
use catchup_core::sweeper::{ac_residual, catching_up, residuals, AcParams, MeshPolicy, ResidualBudget};
use catchup_core::vector::point;
use catchup_core::{default_jump_constant, Point, RegulatedInput, StepFn, SweepProblem};
use proptest::prelude::*;
use rand::Rng;
use std::sync::Arc;

fn fixed(set: impl ProxSet + 'static) -> Arc<dyn ParamFamily> {
    Arc::new(FixedFamily { set: Arc::new(set) })
}

fn zero_w(times: &[f64]) -> StepFn<Point> {
    StepFn::new(times.to_vec(), vec![point(&[0.0]); times.len()]).unwrap()
}

/// Play operator with threshold `h`: `p_j = min(u_j + h, max(u_j - h, p_{j-1}))`.
fn play(u: &[f64], p0: f64, h: f64) -> Vec<f64> {
    let mut p = vec![p0];
    for &v in &u[1..] {
        let prev = p[p.len() - 1];
        p.push(prev.clamp(v - h, v + h));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn interval_reduces_to_play(incs in prop::collection::vec(-0.3f64..0.3, 1..300), x0 in -1.0f64..1.0) {
        let n = incs.len();
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let mut u = vec![0.0];
        for d in &incs {
            u.push(u[u.len() - 1] + d);
        }
        let us = StepFn::new(times.clone(), u.iter().map(|v| point(&[*v])).collect()).unwrap();
        let fam = fixed(BoxSet::new(point(&[-1.0]), point(&[1.0])).unwrap());
        let sol = catching_up(&us, &zero_w(&times), fam.as_ref(), &point(&[x0]), f64::INFINITY, default_jump_constant()).unwrap();
        let oracle = play(&u, u[0] - x0, 1.0);
        for (xi, p) in sol.xi.values().iter().zip(&oracle) {
            prop_assert!((xi[0] - p).abs() <= 1e-12, "{} vs {}", xi[0], p);
        }
    }
}

fn drag_problem() -> (StepFn<Point>, Arc<dyn ParamFamily>) {
    let n = 400;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let u = times.iter().map(|t| point(&[-2.5 * t, 0.8 * t])).collect();
    let set = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0)
        .with_interior(InteriorParams { rho: 0.1, big_r: 3.0 });
    (StepFn::new(times, u).unwrap(), fixed(set))
}

#[test]
fn residual_detects_a_perturbed_solution() {
    let (u, fam) = drag_problem();
    let w = zero_w(u.times());
    let x0 = point(&[2.0, 0.0]);
    let sol = catching_up(&u, &w, fam.as_ref(), &x0, 1.0, default_jump_constant()).unwrap();
    let problem = SweepProblem::from_steps(u.clone(), w, fam, x0).with_r(1.0);
    let budget = ResidualBudget { points_per_step: 8, test_functions: 4, seed: 5, radius: 1.0 };
    let clean = residuals(&sol, &problem, &budget).unwrap();
    assert!(clean.discrete_vi_min >= -1e-10, "clean residual {}", clean.discrete_vi_min);
    assert!(sol.variation() > 0.1, "the input must push against the disc");

    let mut bad = sol.clone();
    let pushed: Vec<Point> = sol.x.values().iter().map(|x| if (x.norm() - 1.0).abs() < 1e-9 { x * 1.01 } else { x.clone() }).collect();
    let xi: Vec<Point> = u.values().iter().zip(&pushed).map(|(a, b)| a - b).collect();
    bad.x = StepFn::new(u.times().to_vec(), pushed).unwrap();
    bad.xi = StepFn::new(u.times().to_vec(), xi).unwrap();
    let report = residuals(&bad, &problem, &budget).unwrap();
    assert!(report.discrete_vi_min < -1e-4, "perturbed residual {}", report.discrete_vi_min);
}

#[test]
fn step_estimates_hold_on_random_inputs() {
    let m = default_jump_constant();
    let cap = 1.0 / m;
    let mut rng = seeded(21);
    let fam = fixed(
        BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0).with_interior(InteriorParams { rho: 0.1, big_r: 3.0 }),
    );
    for _ in 0..50 {
        let n = rng.random_range(5..200);
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let mut u = vec![point(&[0.0, 0.0])];
        for _ in 0..n {
            let step = point(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let step = &step * (rng.random_range(0.0..0.95 * cap) / step.norm());
            u.push(&u[u.len() - 1] + step);
        }
        let us = StepFn::new(times.clone(), u).unwrap();
        let x0 = point(&[1.0, 0.0]);
        let sol = catching_up(&us, &zero_w(&times), fam.as_ref(), &x0, 1.0, m).unwrap();
        assert!(sol.min_bound_slack() >= -1e-12, "slack {}", sol.min_bound_slack());
        assert!(sol.max_identity_defect() <= 1e-10);
        assert!(sol.decomposition_defect() <= 1e-12 * (1.0 + sol.variation()));
    }
}

#[test]
fn rotating_input_keeps_the_pointwise_inequality() {
    let set = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0)
        .with_interior(InteriorParams { rho: 0.1, big_r: 3.0 });
    let fam = fixed(set);
    let u = RegulatedInput::lipschitz(0.0, 1.0, 2.0 * std::f64::consts::PI * 0.5, |t| {
        let a = 2.0 * std::f64::consts::PI * t;
        point(&[0.5 * (a.cos() - 1.0), 0.5 * a.sin()])
    });
    let w = RegulatedInput::lipschitz(0.0, 1.0, 0.0, |_| point(&[0.0]));
    let problem = SweepProblem::new(u, w, fam, point(&[1.0, 0.0]))
        .with_r(1.0)
        .with_mesh(MeshPolicy { eps0: 1e-3, ratio: 0.5, levels: 1 });
    let sol = problem.run_at(1e-3).unwrap();
    assert!(sol.variation() > 0.1);
    let report = ac_residual(&sol, &problem, &AcParams { seed: 9, ..AcParams::default() }).unwrap();
    assert!(report.passed(), "vi_min {} tolerance {}", report.vi_min, report.tolerance);
    assert!(report.c_hat <= 1.5, "fitted constant {}", report.c_hat);
}

#[test]
fn convex_ball_has_infinite_reach() {
    let fam = fixed(Ball::new(point(&[0.0, 0.0]), 1.0));
    let times = vec![0.0, 0.5, 1.0];
    let u = StepFn::new(times.clone(), vec![point(&[0.0, 0.0]), point(&[5.0, 0.0]), point(&[5.0, 5.0])]).unwrap();
    let sol = catching_up(&u, &zero_w(&times), fam.as_ref(), &point(&[0.0, 0.0]), f64::INFINITY, 4.0).unwrap();
    let x = sol.x.values();
    assert!((&x[1] - point(&[1.0, 0.0])).norm() < 1e-15);
    assert!((&x[2] - point(&[1.0, 5.0]) / 26f64.sqrt()).norm() < 1e-15);
}
