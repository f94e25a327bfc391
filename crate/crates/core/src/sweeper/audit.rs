use super::{SweepProblem, SweepSolution};
use crate::error::{Error, Result};
use crate::kurzweil::{ks_integral, ks_integral_scalar};
use crate::proxgeom::{interior_witness, random_in_ball, seeded, InteriorParams, ProxSet};
use crate::regulated::StepFn;
use crate::vector::Point;
use serde::Serialize;
use std::sync::Arc;

/// `(r - ρ) ln(μ / (μ - R²ρ²))` with `μ = ρ(2r - ρ)`.
pub fn variation_bound(r: f64, rho: f64, big_r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::Precondition("the variation bound needs a finite r".into()));
    }
    InteriorParams { rho, big_r }.validate(r)?;
    let mu = rho * (2.0 * r - rho);
    Ok((r - rho) * (mu / (mu - big_r * big_r * rho * rho)).ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowAudit {
    pub j0: usize,
    pub j1: usize,
    /// `max_j |u_j - u_{j0}| + d_H(Z(w_j), Z(w_{j0}))` over the window.
    pub excursion: f64,
    pub variation: f64,
    pub input_variation: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub rho: f64,
    pub big_r: f64,
    pub r: f64,
    pub r_star: f64,
    pub windows: Vec<WindowAudit>,
    pub total_variation: f64,
    pub global_bound: f64,
    pub global_slack: f64,
}

impl AuditReport {
    pub fn min_window_slack(&self) -> f64 {
        self.windows.iter().map(|w| w.slack).fold(f64::INFINITY, f64::min)
    }
}

fn excursion(sol: &SweepSolution, problem: &SweepProblem, j0: usize, j: usize) -> Result<f64> {
    let (u, w) = (sol.u.values(), sol.w.values());
    let dh = if w[j] == w[j0] { 0.0 } else { problem.family.hausdorff_upper(&w[j0], &w[j])? };
    Ok((&u[j] - &u[j0]).norm() + dh)
}

/// Greedy maximal windows `(j0, j1)` covering every step, each satisfying
/// `|u_j - u_{j0}| + d_H(Z(w_j), Z(w_{j0})) <= ρ`.
pub fn auto_windows(sol: &SweepSolution, problem: &SweepProblem, rho: f64) -> Result<Vec<(usize, usize)>> {
    let m = sol.times().len() - 1;
    let mut out = Vec::new();
    let mut j0 = 0;
    while j0 < m {
        let mut j1 = j0;
        while j1 < m && excursion(sol, problem, j0, j1 + 1)? <= rho {
            j1 += 1;
        }
        if j1 == j0 {
            return Err(Error::Precondition(format!("step {} alone moves the inputs by more than rho = {rho}", j0 + 1)));
        }
        out.push((j0, j1));
        j0 = j1;
    }
    Ok(out)
}

/// Checks the window variation bound on each window and the global bound
/// `Var ξ <= N * bound + 3 N r*`.
pub fn variation_audit(
    sol: &SweepSolution,
    problem: &SweepProblem,
    windows: &[(usize, usize)],
    params: Option<InteriorParams>,
) -> Result<AuditReport> {
    let p = params
        .or_else(|| problem.family.interior())
        .ok_or_else(|| Error::NoInterior(problem.family.label()))?;
    let bound = variation_bound(problem.r, p.rho, p.big_r)?;
    let m = sol.times().len() - 1;
    let var = sol.running_variation.values();
    let u = sol.u.values();
    let mut audits = Vec::with_capacity(windows.len());
    for &(j0, j1) in windows {
        if !(j0 < j1 && j1 <= m) {
            return Err(Error::Precondition(format!("window ({j0}, {j1}) is not inside 0..={m}")));
        }
        let mut worst = 0.0f64;
        for j in j0 + 1..=j1 {
            let e = excursion(sol, problem, j0, j)?;
            if e > p.rho {
                return Err(Error::Precondition(format!("window ({j0}, {j1}) leaves the rho-ball at step {j}: {e}")));
            }
            worst = worst.max(e);
        }
        let variation = var[j1] - var[j0];
        let input_variation = (j0 + 1..=j1).map(|j| (&u[j] - &u[j - 1]).norm()).sum();
        audits.push(WindowAudit { j0, j1, excursion: worst, variation, input_variation, bound, slack: bound - variation });
    }
    let r_star = crate::regulated::max_jump_gauge(&sol.u, &sol.w, problem.family.as_ref())?;
    let n = windows.len() as f64;
    let global_bound = n * bound + 3.0 * n * r_star;
    let total_variation = sol.variation();
    Ok(AuditReport {
        rho: p.rho,
        big_r: p.big_r,
        r: problem.r,
        r_star,
        windows: audits,
        total_variation,
        global_bound,
        global_slack: global_bound - total_variation,
    })
}

/// Sizes of the test families used by [`residuals`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualBudget {
    pub points_per_step: usize,
    pub test_functions: usize,
    pub seed: u64,
    /// Radius of the ball around `x_j` from which test points are projected.
    pub radius: f64,
}

impl Default for ResidualBudget {
    fn default() -> Self {
        Self { points_per_step: 16, test_functions: 8, seed: 0, radius: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub discrete_vi_min: f64,
    pub worst_step: usize,
    pub kurzweil_vi_min: f64,
    /// `max |Kurzweil route - per-step sum|` over the test functions.
    pub route_gap: f64,
    pub budget: ResidualBudget,
}

fn vi_term(dxi: &Point, x: &Point, z: &Point, r: f64) -> f64 {
    let q = if r.is_finite() { dxi.norm() / (2.0 * r) * (x - z).norm_squared() } else { 0.0 };
    dxi.dot(&(x - z)) + q
}

fn sets(sol: &SweepSolution, problem: &SweepProblem) -> Result<Vec<Arc<dyn ProxSet>>> {
    let ws = sol.w.values();
    let mut out: Vec<Arc<dyn ProxSet>> = Vec::with_capacity(ws.len());
    for (j, w) in ws.iter().enumerate() {
        if j > 0 && *w == ws[j - 1] {
            out.push(out[j - 1].clone());
        } else {
            out.push(problem.family.set_at(w)?);
        }
    }
    Ok(out)
}

/// Test points for step `j`: projections of random points near `x_j`, the
/// projection of the predictor, the interior witness and the test element
/// `u_j - u_{j-1} + ρ (ξ_j - ξ_{j-1})/|ξ_j - ξ_{j-1}| + x̄` when admissible.
fn candidates(
    sol: &SweepSolution,
    problem: &SweepProblem,
    zs: &[Arc<dyn ProxSet>],
    j: usize,
    budget: &ResidualBudget,
    rng: &mut crate::proxgeom::SeededRng,
) -> Vec<Point> {
    let (u, x, xi) = (sol.u.values(), sol.x.values(), sol.xi.values());
    let set = &zs[j];
    let mut out: Vec<Point> = (0..budget.points_per_step)
        .map(|_| set.nearest_point(&(&x[j] + random_in_ball(x[j].len(), budget.radius, rng))))
        .collect();
    let predictor = &x[j - 1] + &u[j] - &u[j - 1];
    out.push(set.nearest_point(&predictor));
    if let Some(p) = problem.family.interior() {
        if let Some(xb) = interior_witness(set.as_ref(), &x[j], p.rho) {
            out.push(xb);
        }
        let dxi = &xi[j] - &xi[j - 1];
        if dxi.norm() > 0.0 {
            if let Some(xb) = interior_witness(zs[j - 1].as_ref(), &x[j - 1], p.rho) {
                let z = &u[j] - &u[j - 1] + &dxi * (p.rho / dxi.norm()) + xb;
                if set.contains(&z) {
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Seeded step test functions `z(t) ∈ Z(w(t))` on the solution's division.
pub fn test_functions(sol: &SweepSolution, problem: &SweepProblem, budget: &ResidualBudget) -> Result<Vec<StepFn<Point>>> {
    let zs = sets(sol, problem)?;
    let mut rng = seeded(budget.seed ^ 0x7e57);
    let x = sol.x.values();
    let mut out = Vec::with_capacity(budget.test_functions + 1);
    out.push(sol.x.clone());
    for _ in 0..budget.test_functions {
        let scale = budget.radius * rand::Rng::random::<f64>(&mut rng);
        let values = x
            .iter()
            .zip(&zs)
            .map(|(xj, z)| z.nearest_point(&(xj + random_in_ball(xj.len(), scale, &mut rng))))
            .collect();
        out.push(StepFn::new(sol.times().to_vec(), values)?);
    }
    Ok(out)
}

/// `∫⟨x - z, dξ⟩ + (1/2r) ∫|x - z|² dV(ξ)` over the solution's interval.
fn kurzweil_vi(sol: &SweepSolution, z: &StepFn<Point>, r: f64) -> Result<f64> {
    let diff = sol.x.zip_with(z, |a, b| a - b)?;
    let lin = ks_integral(&diff, &sol.xi)?.value;
    if !r.is_finite() {
        return Ok(lin);
    }
    let sq = diff.map(|d| d.norm_squared());
    Ok(lin + ks_integral_scalar(&sq, &sol.running_variation)? / (2.0 * r))
}

fn per_step_vi(sol: &SweepSolution, z: &StepFn<Point>, r: f64, from: usize, to: usize) -> f64 {
    let (x, xi, zv) = (sol.x.values(), sol.xi.values(), z.values());
    (from + 1..=to).map(|j| vi_term(&(&xi[j] - &xi[j - 1]), &x[j], &zv[j], r)).sum()
}

/// Minimum of the discrete inequality over sampled test points and of the
/// integral inequality over sampled test functions, plus the gap between
/// the integral and the per-step evaluation of the latter.
pub fn residuals(sol: &SweepSolution, problem: &SweepProblem, budget: &ResidualBudget) -> Result<ResidualReport> {
    let zs = sets(sol, problem)?;
    let mut rng = seeded(budget.seed);
    let (x, xi) = (sol.x.values(), sol.xi.values());
    let mut discrete = f64::INFINITY;
    let mut worst_step = 0;
    for j in 1..x.len() {
        let dxi = &xi[j] - &xi[j - 1];
        for z in candidates(sol, problem, &zs, j, budget, &mut rng) {
            let v = vi_term(&dxi, &x[j], &z, problem.r);
            if v < discrete {
                discrete = v;
                worst_step = j;
            }
        }
    }
    if x.len() < 2 {
        discrete = 0.0;
    }
    let m = x.len() - 1;
    let mut kmin = f64::INFINITY;
    let mut gap = 0.0f64;
    for z in test_functions(sol, problem, budget)? {
        let k = kurzweil_vi(sol, &z, problem.r)?;
        gap = gap.max((k - per_step_vi(sol, &z, problem.r, 0, m)).abs());
        kmin = kmin.min(k);
    }
    Ok(ResidualReport { discrete_vi_min: discrete, worst_step, kurzweil_vi_min: kmin, route_gap: gap, budget: *budget })
}

/// The integral inequality restricted to `[σ, τ]`, minimized over the same
/// test functions as [`residuals`]. `σ` and `τ` must be breakpoints.
pub fn restrict_residual(
    sol: &SweepSolution,
    problem: &SweepProblem,
    sigma: f64,
    tau: f64,
    budget: &ResidualBudget,
) -> Result<f64> {
    let times = sol.times();
    let find = |t: f64| {
        times
            .binary_search_by(|s| s.total_cmp(&t))
            .map_err(|_| Error::Precondition(format!("{t} is not a breakpoint of the solution")))
    };
    let (i, k) = (find(sigma)?, find(tau)?);
    if i >= k {
        return Err(Error::Precondition(format!("empty window [{sigma}, {tau}]")));
    }
    let restricted = SweepSolution {
        u: sol.u.restrict(sigma, tau)?,
        w: sol.w.restrict(sigma, tau)?,
        xi: sol.xi.restrict(sigma, tau)?,
        x: sol.x.restrict(sigma, tau)?,
        running_variation: sol.running_variation.restrict(sigma, tau)?,
        step_log: sol.step_log[i..k].to_vec(),
    };
    let mut best = f64::INFINITY;
    for z in test_functions(sol, problem, budget)? {
        best = best.min(kurzweil_vi(&restricted, &z.restrict(sigma, tau)?, problem.r)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::{BallUnionComplement, FixedFamily};
    use crate::sweeper::catching_up;
    use crate::vector::point;

    #[test]
    fn bound_values() {
        let b = variation_bound(1.0, 0.1, 3.0).unwrap();
        assert!((b - 0.9 * (0.19f64 / 0.10).ln()).abs() < 1e-15);
        assert!((b - 0.57767).abs() < 1e-5);
        assert!(variation_bound(1.0, 1e-6, 3.0).unwrap() < 1e-4);
        assert!(variation_bound(1.0, 0.25, 3.0).is_err());
    }

    fn drag() -> (SweepSolution, SweepProblem) {
        let fam: Arc<dyn crate::ParamFamily> =
            Arc::new(FixedFamily { set: Arc::new(BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0)) });
        let n = 200;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let u = StepFn::new(times.clone(), times.iter().map(|&t| point(&[-1.6 * t, 0.9 * t])).collect()).unwrap();
        let w = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap().refine(&times).unwrap();
        let p = SweepProblem::from_steps(u.clone(), w.clone(), fam.clone(), point(&[2.0, 0.0]));
        let s = catching_up(&u, &w, fam.as_ref(), &p.x0, p.r, p.m).unwrap();
        (s, p)
    }

    #[test]
    fn residual_routes() {
        let (s, p) = drag();
        let b = ResidualBudget::default();
        let rep = residuals(&s, &p, &b).unwrap();
        assert!(rep.discrete_vi_min >= -1e-12);
        assert!(rep.kurzweil_vi_min >= -1e-12);
        assert!(rep.route_gap <= 1e-12);
        let full = restrict_residual(&s, &p, 0.0, 1.0, &b).unwrap();
        assert!((full - rep.kurzweil_vi_min).abs() < 1e-12);
        assert!(restrict_residual(&s, &p, 0.0, 0.0025, &b).is_err());
    }
}
