//! Catching-up scheme for the sweeping process `ξ + x = u`, `x ∈ Z(w)`.

mod audit;
mod refine;
mod regularity;

pub use audit::{
    auto_windows, residuals, restrict_residual, test_functions, variation_audit, variation_bound, AuditReport,
    ResidualBudget, ResidualReport, WindowAudit,
};
pub use refine::{
    continuous_dependence_study, refinement_study, solve, uniqueness_probe, DependenceRow, DependenceTable,
    Perturbation, RefinementRow, RefinementTable, UniquenessVerdict,
};
pub use regularity::{ac_residual, holder_local_check, AcParams, AcReport, HolderReport};

use crate::error::{Error, Result};
use crate::proxgeom::{ParamFamily, ProxSet};
use crate::regulated::{max_jump_gauge, merge_times, RegulatedInput, StepFn};
use crate::tolerance;
use crate::vector::Point;
use serde::Serialize;
use std::sync::Arc;

/// Step-approximation schedule `eps_k = eps0 * ratio^k`, `k < levels`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshPolicy {
    pub eps0: f64,
    pub ratio: f64,
    pub levels: usize,
}

impl Default for MeshPolicy {
    fn default() -> Self {
        Self { eps0: 0.05, ratio: 0.5, levels: 5 }
    }
}

impl MeshPolicy {
    pub fn eps(&self, k: usize) -> f64 {
        self.eps0 * self.ratio.powi(k as i32)
    }

    pub fn finest(&self) -> f64 {
        self.eps(self.levels.saturating_sub(1))
    }
}

#[derive(Debug, Clone)]
pub struct SweepProblem {
    pub u: RegulatedInput<Point>,
    pub w: RegulatedInput<Point>,
    pub family: Arc<dyn ParamFamily>,
    pub x0: Point,
    pub r: f64,
    pub m: f64,
    pub mesh: MeshPolicy,
}

/// Outcome of the static checks on a problem.
#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    /// `r*`, the largest combined input jump, from the family's upper `d_H`.
    pub jump_gauge: f64,
    pub limit: f64,
    pub x0_distance: f64,
}

impl SweepProblem {
    /// Problem with `r` taken from the family and the default `M`.
    pub fn new(u: RegulatedInput<Point>, w: RegulatedInput<Point>, family: Arc<dyn ParamFamily>, x0: Point) -> Self {
        let r = family.prox_radius();
        Self { u, w, family, x0, r, m: crate::default_jump_constant(), mesh: MeshPolicy::default() }
    }

    pub fn from_steps(u: StepFn<Point>, w: StepFn<Point>, family: Arc<dyn ParamFamily>, x0: Point) -> Self {
        Self::new(RegulatedInput::from_step(u), RegulatedInput::from_step(w), family, x0)
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn with_mesh(mut self, mesh: MeshPolicy) -> Self {
        self.mesh = mesh;
        self
    }

    pub fn is_step(&self) -> bool {
        self.u.as_step().is_some() && self.w.as_step().is_some()
    }

    pub fn start(&self) -> f64 {
        self.u.start()
    }

    pub fn end(&self) -> f64 {
        self.u.end()
    }

    /// Jump gauge `sup_t d_H(Z(w(t)), Z(w(t-))) + |u(t) - u(t-)|` over the
    /// declared jumps of both inputs.
    pub fn jump_gauge(&self) -> Result<f64> {
        if let (Some(u), Some(w)) = (self.u.as_step(), self.w.as_step()) {
            return max_jump_gauge(u, w, self.family.as_ref());
        }
        let tu: Vec<f64> = self.u.jumps().iter().map(|j| j.0).collect();
        let tw: Vec<f64> = self.w.jumps().iter().map(|j| j.0).collect();
        let mut gauge = 0.0f64;
        for t in merge_times(&tu, &tw) {
            let du = (self.u.eval(t)? - self.u.left_limit(t)?).norm();
            let (wl, wr) = (self.w.left_limit(t)?, self.w.eval(t)?);
            let dh = if wl == wr { 0.0 } else { self.family.hausdorff_upper(&wl, &wr)? };
            if !dh.is_finite() {
                return Err(Error::Hausdorff(format!("no finite bound at t = {t}")));
            }
            gauge = gauge.max(du + dh);
        }
        Ok(gauge)
    }

    /// Static checks: `M >= 2`, `0 < r <= r(family)`, matching intervals,
    /// `w(0)` in the family domain, `x0 ∈ Z(w(0))` and `r* < r/M`.
    pub fn validate(&self) -> Result<Validation> {
        if !(self.m >= 2.0) {
            return Err(Error::Precondition(format!("M = {} is below 2", self.m)));
        }
        if !(self.r > 0.0) || self.r > self.family.prox_radius() {
            return Err(Error::Precondition(format!(
                "r = {} must lie in (0, {}]",
                self.r,
                self.family.prox_radius()
            )));
        }
        if self.u.start() != self.w.start() || self.u.end() != self.w.end() {
            return Err(Error::IntervalMismatch(self.u.start(), self.u.end(), self.w.start(), self.w.end()));
        }
        let w0 = self.w.eval(self.start())?;
        self.family.check_domain(&w0)?;
        let z0 = self.family.set_at(&w0)?;
        if z0.dim() != self.x0.len() || self.u.eval(self.start())?.len() != self.x0.len() {
            return Err(Error::DimensionMismatch(z0.dim(), self.x0.len()));
        }
        let x0_distance = z0.distance(&self.x0);
        if x0_distance > tolerance::MEMBERSHIP * (1.0 + self.x0.norm()) {
            return Err(Error::Precondition(format!("x0 is at distance {x0_distance} from Z(w(0))")));
        }
        let jump_gauge = self.jump_gauge()?;
        let limit = self.r / self.m;
        if jump_gauge >= limit {
            return Err(Error::JumpGauge { gauge: jump_gauge, limit });
        }
        Ok(Validation { jump_gauge, limit, x0_distance })
    }

    /// Step inputs on a common division: the exact steps where available,
    /// otherwise step approximations within `eps`.
    pub fn discretize(&self, eps: f64) -> Result<(StepFn<Point>, StepFn<Point>)> {
        let u = self.u.step_approximate(eps)?;
        let w = self.w.step_approximate(eps)?;
        let times = u.merged_times(&w)?;
        Ok((u.refine(&times)?, w.refine(&times)?))
    }
}

/// Diagnostics of one catching-up step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub j: usize,
    pub t: f64,
    pub du: f64,
    /// Upper bound on `d_H(Z(w_j), Z(w_{j-1}))`.
    pub dh: f64,
    pub dxi: f64,
    pub dx: f64,
    pub predictor_dist: f64,
    /// `| |ξ_j - ξ_{j-1}| - dist(predictor, Z(w_j)) |`.
    pub identity_defect: f64,
    pub slack_x: f64,
    pub slack_xi: f64,
    pub cap_slack: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSolution {
    pub u: StepFn<Point>,
    pub w: StepFn<Point>,
    pub xi: StepFn<Point>,
    pub x: StepFn<Point>,
    pub running_variation: StepFn<f64>,
    pub step_log: Vec<StepRecord>,
}

impl SweepSolution {
    pub fn times(&self) -> &[f64] {
        self.xi.times()
    }

    pub fn variation(&self) -> f64 {
        *self.running_variation.final_value()
    }

    pub fn min_bound_slack(&self) -> f64 {
        self.step_log
            .iter()
            .map(|s| s.slack_x.min(s.slack_xi).min(s.cap_slack))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|u_j - u_{j-1}| + d_H(Z(w_j), Z(w_{j-1}))` over the steps.
    pub fn max_step_gauge(&self) -> f64 {
        self.step_log.iter().map(|s| s.du + s.dh).fold(0.0, f64::max)
    }

    pub fn max_identity_defect(&self) -> f64 {
        self.step_log.iter().map(|s| s.identity_defect).fold(0.0, f64::max)
    }

    /// `max_j |ξ_j + x_j - u_j|`.
    pub fn decomposition_defect(&self) -> f64 {
        self.xi
            .values()
            .iter()
            .zip(self.x.values())
            .zip(self.u.values())
            .map(|((xi, x), u)| (xi + x - u).norm())
            .fold(0.0, f64::max)
    }

    /// Rows `t, xi*, x*, V, dxi, dx, predictor_dist, slack_x, slack_xi, cap_slack`;
    /// step diagnostics are empty on the first row.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let n = self.xi.dim();
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("xi{i}")));
        header.extend((0..n).map(|i| format!("x{i}")));
        for h in ["V", "dxi", "dx", "predictor_dist", "slack_x", "slack_xi", "cap_slack"] {
            header.push(h.into());
        }
        wtr.write_record(&header)?;
        let (xi, x, v) = (self.xi.values(), self.x.values(), self.running_variation.values());
        for (j, t) in self.times().iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(xi[j].iter().map(f64::to_string));
            row.extend(x[j].iter().map(f64::to_string));
            row.push(v[j].to_string());
            match j.checked_sub(1).and_then(|k| self.step_log.get(k)) {
                Some(s) => {
                    for q in [s.dxi, s.dx, s.predictor_dist, s.slack_x, s.slack_xi, s.cap_slack] {
                        row.push(q.to_string());
                    }
                }
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()
    }
}

/// Catching-up recursion on step inputs sharing one division.
///
/// `y = x_{j-1} + u_j - u_{j-1}`, `x_j = P_{Z(w_j)}(y)`, `ξ_j = u_j - x_j`,
/// with the step estimates and the jump cap `|ξ_j - ξ_{j-1}| <= r/M`
/// recorded for every step. The recursion itself only needs the predictor
/// inside the reach `r`; the estimates are guaranteed when every step gauge
/// stays below `r/M`, which [`SweepProblem::validate`] enforces on jumps.
pub fn catching_up(
    u: &StepFn<Point>,
    w: &StepFn<Point>,
    family: &dyn ParamFamily,
    x0: &Point,
    r: f64,
    m: f64,
) -> Result<SweepSolution> {
    if u.times() != w.times() {
        return Err(Error::Precondition("u and w must share one division".into()));
    }
    if m < 2.0 {
        return Err(Error::Precondition(format!("M = {m} is below 2")));
    }
    let (us, ws, times) = (u.values(), w.values(), u.times());
    let mut set: Arc<dyn ProxSet> = {
        family.check_domain(&ws[0])?;
        family.set_at(&ws[0])?
    };
    let d0 = set.distance(x0);
    if d0 > tolerance::MEMBERSHIP * (1.0 + x0.norm()) {
        return Err(Error::Precondition(format!("x0 is at distance {d0} from Z(w(0))")));
    }
    let cap = r / m;
    let kx = 2.0 * m / (2.0 * m - 1.0);
    let kxi = (4.0 * m - 1.0) / (2.0 * m - 1.0);

    let mut xs = Vec::with_capacity(us.len());
    let mut xis = Vec::with_capacity(us.len());
    let mut var = Vec::with_capacity(us.len());
    let mut log = Vec::with_capacity(us.len().saturating_sub(1));
    xs.push(x0.clone());
    xis.push(&us[0] - x0);
    var.push(0.0);
    for j in 1..us.len() {
        let du = (&us[j] - &us[j - 1]).norm();
        let dh = if ws[j] == ws[j - 1] {
            0.0
        } else {
            family.check_domain(&ws[j])?;
            set = family.set_at(&ws[j])?;
            family.hausdorff_upper(&ws[j - 1], &ws[j])?
        };
        let y = &xs[j - 1] + &us[j] - &us[j - 1];
        let x = set.nearest_point(&y);
        let predictor_dist = (&y - &x).norm();
        if predictor_dist >= r {
            return Err(Error::OutOfReach { dist: predictor_dist, r });
        }
        let xi = &us[j] - &x;
        let dxi = (&xi - &xis[j - 1]).norm();
        let dx = (&x - &xs[j - 1]).norm();
        log.push(StepRecord {
            j,
            t: times[j],
            du,
            dh,
            dxi,
            dx,
            predictor_dist,
            identity_defect: (dxi - predictor_dist).abs(),
            slack_x: kx * du + kxi * dh - dx,
            slack_xi: kxi * (du + dh) - dxi,
            cap_slack: cap - dxi,
        });
        var.push(var[j - 1] + dxi);
        xs.push(x);
        xis.push(xi);
    }
    Ok(SweepSolution {
        u: u.clone(),
        w: w.clone(),
        xi: StepFn::new(times.to_vec(), xis)?,
        x: StepFn::new(times.to_vec(), xs)?,
        running_variation: StepFn::new(times.to_vec(), var)?,
        step_log: log,
    })
}

impl SweepProblem {
    /// Catching-up on the discretization at `eps`.
    pub fn run_at(&self, eps: f64) -> Result<SweepSolution> {
        let (u, w) = self.discretize(eps)?;
        catching_up(&u, &w, self.family.as_ref(), &self.x0, self.r, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::{BallUnionComplement, BoxSet, FixedFamily};
    use crate::vector::point;

    fn fixed(set: Arc<dyn ProxSet>) -> Arc<dyn ParamFamily> {
        Arc::new(FixedFamily { set })
    }

    fn two_step(a: Point, b: Point) -> StepFn<Point> {
        StepFn::new(vec![0.0, 1.0], vec![a, b]).unwrap()
    }

    #[test]
    fn interval_projection() {
        let fam = fixed(Arc::new(BoxSet::new(point(&[-1.0]), point(&[1.0])).unwrap()));
        let u = two_step(point(&[0.0]), point(&[1.5]));
        let w = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap();
        let s = catching_up(&u, &w, fam.as_ref(), &point(&[0.0]), f64::INFINITY, crate::default_jump_constant()).unwrap();
        assert_eq!(s.x.final_value()[0], 1.0);
        assert_eq!(s.xi.final_value()[0], 0.5);
        assert_eq!(s.step_log[0].predictor_dist, 0.5);
    }

    #[test]
    fn ball_complement_steps() {
        let fam = fixed(Arc::new(BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0)));
        let w = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap();
        let x0 = point(&[1.0, 0.0]);
        let m = crate::default_jump_constant();
        let free = two_step(point(&[0.0, 0.0]), point(&[0.5, 0.0]));
        let s = catching_up(&free, &w, fam.as_ref(), &x0, 1.0, m).unwrap();
        assert_eq!(s.x.final_value(), &point(&[1.5, 0.0]));
        assert_eq!(s.xi.final_value(), &point(&[-1.0, 0.0]));
        assert_eq!(s.step_log[0].dxi, 0.0);

        let push = two_step(point(&[0.0, 0.0]), point(&[-0.2, 0.0]));
        let s = catching_up(&push, &w, fam.as_ref(), &x0, 1.0, m).unwrap();
        assert_eq!(s.x.final_value(), &point(&[1.0, 0.0]));
        assert!((s.xi.final_value() - point(&[-1.2, 0.0])).norm() < 1e-15);
        assert!((s.step_log[0].dxi - 0.2).abs() < 1e-15);
        assert!(s.min_bound_slack() >= 0.0);

        let big = two_step(point(&[0.0, 0.0]), point(&[-0.4, 0.0]));
        let s = catching_up(&big, &w, fam.as_ref(), &x0, 1.0, m).unwrap();
        assert!((s.xi.final_value() - point(&[-1.4, 0.0])).norm() < 1e-15);
        assert!((s.step_log[0].dxi - 0.4).abs() < 1e-15);
        assert!(s.max_step_gauge() > 1.0 / m && s.step_log[0].cap_slack < 0.0);
        let s = catching_up(&big, &w, fam.as_ref(), &x0, 1.0, 2.0).unwrap();
        assert!(s.min_bound_slack() >= 0.0);
        let far = two_step(point(&[0.0, 0.0]), point(&[-1.0, 0.0]));
        assert!(matches!(catching_up(&far, &w, fam.as_ref(), &x0, 1.0, 2.0), Err(Error::OutOfReach { .. })));
    }

    #[test]
    fn validation_rules() {
        let fam = fixed(Arc::new(BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0)));
        let w = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap();
        let u = two_step(point(&[0.0, 0.0]), point(&[0.3, 0.0]));
        let p = SweepProblem::from_steps(u.clone(), w.clone(), fam.clone(), point(&[1.0, 0.0]));
        assert!(matches!(p.validate(), Err(Error::JumpGauge { .. })));
        let small = two_step(point(&[0.0, 0.0]), point(&[0.1, 0.0]));
        let p = SweepProblem::from_steps(small.clone(), w.clone(), fam.clone(), point(&[1.0, 0.0]));
        assert!(p.validate().is_ok());
        let p = SweepProblem::from_steps(small, w, fam, point(&[0.5, 0.0]));
        assert!(matches!(p.validate(), Err(Error::Precondition(_))));
        assert!((2.0 * crate::default_jump_constant().powi(2) - 9.0 * crate::default_jump_constant() + 2.0).abs() < 1e-12);
    }
}
