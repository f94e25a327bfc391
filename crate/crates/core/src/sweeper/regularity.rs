use super::{SweepProblem, SweepSolution};
use crate::error::{Error, Result};
use crate::proxgeom::{random_in_ball, seeded};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub c_star: f64,
    pub u_window: f64,
    pub window_variation: f64,
    /// `min_s (C* U Var - |ξ(s) - ξ(σ)|²)` over breakpoints `s ∈ (σ, τ]`.
    pub min_slack: f64,
    /// `max_s |ξ(s) - ξ(σ)|`.
    pub max_increment: f64,
}

/// Checks `|ξ(s) - ξ(σ)|² <= C* U(σ, τ) Var_[σ,τ] ξ` with
/// `C* = 2C e^{2C Var ξ}`, `C = max(1, 3/(2r))`, for breakpoint indices
/// `i < k` delimiting `[σ, τ]`.
pub fn holder_local_check(sol: &SweepSolution, problem: &SweepProblem, i: usize, k: usize) -> Result<HolderReport> {
    let m = sol.times().len() - 1;
    if !(i < k && k <= m) {
        return Err(Error::Precondition(format!("window ({i}, {k}) is not inside 0..={m}")));
    }
    let (u, w, xi) = (sol.u.values(), sol.w.values(), sol.xi.values());
    let mut su = 0.0f64;
    let mut sh = 0.0f64;
    for j in i..=k {
        su = su.max((&u[j] - &u[i]).norm());
        let dh = if w[j] == w[i] { 0.0 } else { problem.family.hausdorff_upper(&w[i], &w[j])? };
        sh = sh.max(dh);
    }
    if sh > problem.r / 2.0 {
        return Err(Error::Precondition(format!("d_H = {sh} exceeds r/2 on the window")));
    }
    let c = 1f64.max(1.5 / problem.r);
    let c_star = 2.0 * c * (2.0 * c * sol.variation()).exp();
    let u_window = su + su * su + sh + sh * sh;
    let var = sol.running_variation.values();
    let window_variation = var[k] - var[i];
    let rhs = c_star * u_window * window_variation;
    let mut min_slack = f64::INFINITY;
    let mut max_increment = 0.0f64;
    for j in i + 1..=k {
        let d = (&xi[j] - &xi[i]).norm();
        max_increment = max_increment.max(d);
        min_slack = min_slack.min(rhs - d * d);
    }
    Ok(HolderReport { c_star, u_window, window_variation, min_slack, max_increment })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcParams {
    pub test_points: usize,
    pub radius: f64,
    pub seed: u64,
    /// Steps per subinterval for the variation fit.
    pub block: usize,
    /// Every `stride`-th interior breakpoint is tested.
    pub stride: usize,
}

impl Default for AcParams {
    fn default() -> Self {
        Self { test_points: 16, radius: 1.0, seed: 0, block: 50, stride: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcReport {
    /// `min (⟨x - z, ξ'⟩ + |ξ'| |x - z|² / 2r) / (1 + |ξ'|)` over sampled times and points.
    pub vi_min: f64,
    /// `Ĉ = sqrt(max Var ξ / (Var u + Var w))` over the subintervals.
    pub c_hat: f64,
    pub subintervals: usize,
    pub samples: usize,
    /// `2 max_j |x_j - x_{j-1}| (1 + radius / r)`, the size of the quotient
    /// error after normalization.
    pub tolerance: f64,
}

impl AcReport {
    pub fn passed(&self) -> bool {
        self.vi_min >= -self.tolerance && self.c_hat.is_finite()
    }
}

/// Pointwise inequality for symmetric difference quotients of `ξ` and the
/// subinterval variation fit `Var ξ <= Ĉ² (Var u + Var w)`.
pub fn ac_residual(sol: &SweepSolution, problem: &SweepProblem, params: &AcParams) -> Result<AcReport> {
    if problem.family.lipschitz().is_none() {
        return Err(Error::Precondition("absolutely continuous case needs a Lipschitz family".into()));
    }
    let t = sol.times();
    let (x, xi, u, w) = (sol.x.values(), sol.xi.values(), sol.u.values(), sol.w.values());
    let m = t.len() - 1;
    let mut rng = seeded(params.seed);
    let mut vi_min = f64::INFINITY;
    let mut samples = 0;
    let mut cached: Option<(usize, std::sync::Arc<dyn crate::ProxSet>)> = None;
    for j in (1..m).step_by(params.stride.max(1)) {
        let rate = (&xi[j + 1] - &xi[j - 1]) / (t[j + 1] - t[j - 1]);
        let set = match &cached {
            Some((k, s)) if w[*k] == w[j] => s.clone(),
            _ => {
                let s = problem.family.set_at(&w[j])?;
                cached = Some((j, s.clone()));
                s
            }
        };
        let q = if problem.r.is_finite() { rate.norm() / (2.0 * problem.r) } else { 0.0 };
        for _ in 0..params.test_points {
            let z = set.nearest_point(&(&x[j] + random_in_ball(x[j].len(), params.radius, &mut rng)));
            let v = rate.dot(&(&x[j] - &z)) + q * (&x[j] - &z).norm_squared();
            vi_min = vi_min.min(v / (1.0 + rate.norm()));
            samples += 1;
        }
    }
    let var = sol.running_variation.values();
    let block = params.block.max(1);
    let mut bounds: Vec<(usize, usize)> = (0..m).step_by(block).map(|a| (a, (a + block).min(m))).collect();
    bounds.push((0, m));
    let mut worst = 0.0f64;
    for &(a, b) in &bounds {
        let vxi = var[b] - var[a];
        let vin: f64 = (a + 1..=b).map(|j| (&u[j] - &u[j - 1]).norm() + (&w[j] - &w[j - 1]).norm()).sum();
        let q = if vin > 0.0 { vxi / vin } else if vxi == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(q);
    }
    if samples == 0 {
        vi_min = 0.0;
    }
    let max_dx = (1..=m).map(|j| (&x[j] - &x[j - 1]).norm()).fold(0.0, f64::max);
    let ratio = if problem.r.is_finite() { params.radius / problem.r } else { 0.0 };
    let tolerance = 2.0 * max_dx * (1.0 + ratio);
    Ok(AcReport { vi_min, c_hat: worst.sqrt(), subintervals: bounds.len(), samples, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::{BoxSet, FixedFamily, ParamFamily};
    use crate::regulated::StepFn;
    use crate::sweeper::catching_up;
    use crate::vector::point;
    use std::sync::Arc;

    fn play_drag() -> (SweepSolution, SweepProblem) {
        let fam: Arc<dyn ParamFamily> = Arc::new(FixedFamily { set: Arc::new(BoxSet::new(point(&[-1.0]), point(&[1.0])).unwrap()) });
        let n = 1000;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let u = StepFn::new(times.clone(), times.iter().map(|&t| point(&[3.0 * t])).collect()).unwrap();
        let w = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap().refine(&times).unwrap();
        let p = SweepProblem::from_steps(u.clone(), w.clone(), fam.clone(), point(&[0.0])).with_r(10.0);
        let s = catching_up(&u, &w, fam.as_ref(), &p.x0, p.r, p.m).unwrap();
        (s, p)
    }

    #[test]
    fn drag_in_one_dimension() {
        let (s, p) = play_drag();
        assert!((s.xi.final_value()[0] - 2.0).abs() < 1e-12);
        let rep = ac_residual(&s, &p, &AcParams::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.c_hat <= 1.0 + 1e-12);
        let h = holder_local_check(&s, &p, 300, 600).unwrap();
        assert!(h.min_slack >= 0.0);
        let flat = holder_local_check(&s, &p, 0, 100).unwrap();
        assert!(flat.max_increment < 1e-14);
    }
}
