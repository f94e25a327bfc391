use super::{catching_up, SweepProblem, SweepSolution};
use crate::error::{Error, Result};
use crate::proxgeom::{seeded, ParamFamily};
use crate::regulated::{merge_times, StepFn};
use crate::vector::Point;
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRow {
    pub level: usize,
    pub eps: f64,
    pub steps: usize,
    pub variation: f64,
    /// `‖ξ^(k) - ξ^(k+1)‖`; absent on the finest level.
    pub diff_to_next: Option<f64>,
    /// `sup_t |u^(k) - u^(k+1)| + d_H(Z(w^(k)), Z(w^(k+1)))`.
    pub delta: Option<f64>,
    /// `diff² / (Δ + Δ²)`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementTable {
    pub rows: Vec<RefinementRow>,
    /// `C* = max_k diff_k² / (Δ_k + Δ_k²)`.
    pub fitted_c: f64,
    pub decreasing: bool,
    pub max_variation: f64,
}

/// Sup over merged breakpoints of `|u1 - u2| + d_H(Z(w1), Z(w2))`.
pub(crate) fn input_discrepancy(
    u1: &StepFn<Point>,
    w1: &StepFn<Point>,
    u2: &StepFn<Point>,
    w2: &StepFn<Point>,
    family: &dyn ParamFamily,
) -> Result<f64> {
    let times = merge_times(&u1.merged_times(w1)?, &u2.merged_times(w2)?);
    let mut sup = 0.0f64;
    for t in times {
        let (a, b) = (w1.eval(t)?, w2.eval(t)?);
        let dh = if a == b { 0.0 } else { family.hausdorff_upper(&a, &b)? };
        sup = sup.max((u1.eval(t)? - u2.eval(t)?).norm() + dh);
    }
    Ok(sup)
}

fn check_case(problem: &SweepProblem) -> Result<()> {
    let interior = problem.family.interior().is_some();
    let bv = problem.family.lipschitz().is_some()
        && problem.u.variation_bound().is_some()
        && problem.w.variation_bound().is_some();
    if interior || bv {
        Ok(())
    } else {
        Err(Error::Precondition(
            "need uniform interior parameters, or bounded-variation inputs with a Lipschitz family".into(),
        ))
    }
}

/// Catching-up on every level of the mesh schedule with the Cauchy table.
pub fn refinement_study(problem: &SweepProblem) -> Result<(SweepSolution, RefinementTable)> {
    problem.validate()?;
    check_case(problem)?;
    let levels = if problem.is_step() { 1 } else { problem.mesh.levels.max(1) };
    let mut sols = Vec::with_capacity(levels);
    for k in 0..levels {
        let eps = problem.mesh.eps(k);
        sols.push((eps, problem.run_at(eps)?));
    }
    let mut rows = Vec::with_capacity(levels);
    let mut fitted = 0.0f64;
    let mut decreasing = true;
    let mut prev: Option<f64> = None;
    for k in 0..levels {
        let (eps, s) = &sols[k];
        let (mut diff, mut delta, mut ratio) = (None, None, None);
        if let Some((_, next)) = sols.get(k + 1) {
            let d = s.xi.sup_distance(&next.xi)?;
            let dl = input_discrepancy(&s.u, &s.w, &next.u, &next.w, problem.family.as_ref())?;
            let q = if dl > 0.0 { d * d / (dl + dl * dl) } else if d == 0.0 { 0.0 } else { f64::INFINITY };
            fitted = fitted.max(q);
            if let Some(p) = prev {
                decreasing &= d <= p * (1.0 + 1e-12) + 1e-15;
            }
            prev = Some(d);
            (diff, delta, ratio) = (Some(d), Some(dl), Some(q));
        }
        rows.push(RefinementRow {
            level: k,
            eps: *eps,
            steps: s.times().len() - 1,
            variation: s.variation(),
            diff_to_next: diff,
            delta,
            ratio,
        });
    }
    let max_variation = rows.iter().map(|r| r.variation).fold(0.0, f64::max);
    let (_, finest) = sols.pop().expect("at least one level");
    Ok((finest, RefinementTable { rows, fitted_c: fitted, decreasing, max_variation }))
}

/// Finest solution plus the refinement table; fails when the successive
/// differences do not decrease.
pub fn solve(problem: &SweepProblem) -> Result<(SweepSolution, RefinementTable)> {
    let (sol, table) = refinement_study(problem)?;
    if !table.decreasing || !table.fitted_c.is_finite() {
        let diffs: Vec<f64> = table.rows.iter().filter_map(|r| r.diff_to_next).collect();
        return Err(Error::NonCauchy(format!("successive differences {diffs:?}")));
    }
    Ok((sol, table))
}

/// Constant shifts of the inputs and of the initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Perturbation {
    pub du: Vec<f64>,
    pub dw: Vec<f64>,
    pub dx0: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DependenceRow {
    /// `sup_t d_H(Z(w), Z(w + δw)) + ‖δu‖`.
    pub delta: f64,
    pub xi0_diff: f64,
    pub diff: f64,
    /// `diff² / (Δ + Δ² + |δξ(0)|²)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DependenceTable {
    pub rows: Vec<DependenceRow>,
    pub fitted_c: f64,
    /// Output differences shrink along the family (in the order given).
    pub monotone: bool,
}

/// Solves the base problem and each perturbation on the finest mesh and
/// fits `‖ξ - ξ_n‖² <= C (Δ_n + Δ_n² + |δξ(0)|²)`.
pub fn continuous_dependence_study(problem: &SweepProblem, perturbations: &[Perturbation]) -> Result<DependenceTable> {
    problem.validate()?;
    if problem.family.interior().is_none() {
        return Err(Error::NoInterior(problem.family.label()));
    }
    let eps = problem.mesh.finest();
    let (u, w) = problem.discretize(eps)?;
    let base = catching_up(&u, &w, problem.family.as_ref(), &problem.x0, problem.r, problem.m)?;
    let mut rows = Vec::with_capacity(perturbations.len());
    for p in perturbations {
        let (du, dw, dx0) =
            (Point::from_column_slice(&p.du), Point::from_column_slice(&p.dw), Point::from_column_slice(&p.dx0));
        if du.len() != problem.x0.len() || dx0.len() != problem.x0.len() {
            return Err(Error::DimensionMismatch(problem.x0.len(), du.len().max(dx0.len())));
        }
        if dw.len() != problem.family.param_dim() {
            return Err(Error::DimensionMismatch(problem.family.param_dim(), dw.len()));
        }
        let un = u.map(|v| v + &du);
        let wn = w.map(|v| v + &dw);
        let x0n = &problem.x0 + &dx0;
        let sol = catching_up(&un, &wn, problem.family.as_ref(), &x0n, problem.r, problem.m)?;
        let delta = input_discrepancy(&u, &w, &un, &wn, problem.family.as_ref())?;
        let xi0_diff = (&du - &dx0).norm();
        let diff = base.xi.sup_distance(&sol.xi)?;
        let den = delta + delta * delta + xi0_diff * xi0_diff;
        let ratio = if den > 0.0 { diff * diff / den } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        rows.push(DependenceRow { delta, xi0_diff, diff, ratio });
    }
    let fitted_c = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let monotone = rows.windows(2).all(|w| w[1].diff <= w[0].diff * (1.0 + 1e-12) + 1e-15);
    Ok(DependenceTable { rows, fitted_c, monotone })
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessVerdict {
    pub runs: usize,
    pub max_diff: f64,
    pub identical: bool,
}

/// Re-runs the recursion on refinements that only add breakpoints where
/// the inputs are constant (midpoints, random points, points hugging each
/// jump) and compares the outputs.
pub fn uniqueness_probe(problem: &SweepProblem, seed: u64) -> Result<UniquenessVerdict> {
    let (u, w) = problem.discretize(problem.mesh.finest())?;
    let solve = |times: &[f64]| -> Result<SweepSolution> {
        catching_up(&u.refine(times)?, &w.refine(times)?, problem.family.as_ref(), &problem.x0, problem.r, problem.m)
    };
    let base = solve(u.times())?;
    let t = u.times();
    let mut rng = seeded(seed);
    let midpoints: Vec<f64> = t.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let random: Vec<f64> = t.windows(2).map(|p| p[0] + (p[1] - p[0]) * rng.random_range(0.01..0.99)).collect();
    let hugging: Vec<f64> = t
        .windows(2)
        .flat_map(|p| {
            let h = (p[1] - p[0]) * 1e-9;
            [p[0] + h, p[1] - h]
        })
        .filter(|s| !t.contains(s))
        .collect();
    let mut max_diff = 0.0f64;
    let mut runs = 1;
    for extra in [midpoints, random, hugging] {
        let times = merge_times(t, &extra);
        let s = solve(&times)?;
        max_diff = max_diff.max(base.xi.sup_distance(&s.xi)?);
        runs += 1;
    }
    Ok(UniquenessVerdict { runs, max_diff, identical: max_diff <= 1e-12 })
}
