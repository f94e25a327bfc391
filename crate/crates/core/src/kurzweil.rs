//! Kurzweil–Stieltjes integrals `∫⟨f, dg⟩` of step integrands against step
//! integrators, evaluated in closed form on the merged division.
//!
//! For step functions the gauge limit is determined by the jumps of the
//! integrator: each breakpoint `t` contributes `⟨f(t), g(t+) - g(t-)⟩`, with
//! `g(a-) = g(a)` and `g(b+) = g(b)`. Between breakpoints the integrator is
//! constant and nothing accrues.

use crate::error::{Error, Result};
use crate::regulated::{merge_times, StepFn};
use crate::tolerance;
use crate::vector::Vector;
use serde::Serialize;

/// Step function that need not be right-continuous: a value at every
/// breakpoint and a value on every open plateau between breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralStep<V> {
    times: Vec<f64>,
    points: Vec<V>,
    plateaus: Vec<V>,
}

impl<V: Vector> GeneralStep<V> {
    /// `points[j]` is the value at `times[j]`; `plateaus[j]` the value on
    /// `(times[j], times[j+1])`.
    pub fn new(times: Vec<f64>, points: Vec<V>, plateaus: Vec<V>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidStep("need at least two breakpoints".into()));
        }
        if points.len() != times.len() || plateaus.len() + 1 != times.len() {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints, {} point values, {} plateaus",
                times.len(),
                points.len(),
                plateaus.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep("breakpoints must be finite and strictly increasing".into()));
        }
        let d = points[0].dim();
        if let Some(v) = points.iter().chain(&plateaus).find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch(d, v.dim()));
        }
        Ok(Self { times, points, plateaus })
    }

    /// `v` on `[a, tau)` and zero elsewhere on `[a, b]`.
    pub fn interval_indicator(a: f64, b: f64, tau: f64, v: V) -> Result<Self> {
        if !(tau > a && tau <= b) {
            return Err(Error::OutOfDomain { t: tau, start: a, end: b });
        }
        let z = v.zero_like();
        if tau == b {
            return Self::new(vec![a, b], vec![v.clone(), z], vec![v]);
        }
        Self::new(vec![a, tau, b], vec![v.clone(), z.clone(), z.clone()], vec![v, z])
    }

    /// `v` at the single time `tau` and zero elsewhere on `[a, b]`.
    pub fn point_mass(a: f64, b: f64, tau: f64, v: V) -> Result<Self> {
        if !(tau >= a && tau <= b) {
            return Err(Error::OutOfDomain { t: tau, start: a, end: b });
        }
        let z = v.zero_like();
        if tau == a {
            Self::new(vec![a, b], vec![v, z.clone()], vec![z])
        } else if tau == b {
            Self::new(vec![a, b], vec![z.clone(), v], vec![z])
        } else {
            Self::new(vec![a, tau, b], vec![z.clone(), v, z.clone()], vec![z.clone(), z])
        }
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn check(&self, t: f64) -> Result<()> {
        if t >= self.start() && t <= self.end() {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, start: self.start(), end: self.end() })
        }
    }

    pub fn eval(&self, t: f64) -> Result<V> {
        self.check(t)?;
        match self.times.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(k) => Ok(self.points[k].clone()),
            Err(k) => Ok(self.plateaus[k - 1].clone()),
        }
    }

    /// `f(t-)`, with `f(a-) = f(a)`.
    pub fn left_limit(&self, t: f64) -> Result<V> {
        self.check(t)?;
        if t == self.start() {
            return Ok(self.points[0].clone());
        }
        let k = self.times.partition_point(|&s| s < t);
        Ok(self.plateaus[k - 1].clone())
    }

    /// `f(t+)`, with `f(b+) = f(b)`.
    pub fn right_limit(&self, t: f64) -> Result<V> {
        self.check(t)?;
        if t == self.end() {
            return Ok(self.points.last().unwrap().clone());
        }
        let k = self.times.partition_point(|&s| s <= t);
        Ok(self.plateaus[k - 1].clone())
    }
}

impl<V: Vector> From<&StepFn<V>> for GeneralStep<V> {
    fn from(f: &StepFn<V>) -> Self {
        let v = f.values();
        Self {
            times: f.times().to_vec(),
            points: v.to_vec(),
            plateaus: v[..v.len() - 1].to_vec(),
        }
    }
}

/// One merged subinterval `[from, to]` and its share of the integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contribution {
    pub from: f64,
    pub to: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub decomposition: Vec<Contribution>,
}

fn same_interval(a: (f64, f64), b: (f64, f64)) -> Result<()> {
    if a != b {
        return Err(Error::IntervalMismatch(a.0, a.1, b.0, b.1));
    }
    Ok(())
}

/// `∫⟨f, dg⟩` for general step functions. The subinterval `[s_{j-1}, s_j]`
/// contributes `⟨f(s_{j-1}), g(s_{j-1}+) - g(s_{j-1})⟩ + ⟨f(s_j), g(s_j) - g(s_j-)⟩`.
pub fn ks_integral_general<V: Vector>(f: &GeneralStep<V>, g: &GeneralStep<V>) -> Result<IntegralValue> {
    same_interval((f.start(), f.end()), (g.start(), g.end()))?;
    if f.points[0].dim() != g.points[0].dim() {
        return Err(Error::DimensionMismatch(f.points[0].dim(), g.points[0].dim()));
    }
    let times = merge_times(&f.times, &g.times);
    let mut decomposition = Vec::with_capacity(times.len() - 1);
    let mut value = 0.0;
    for w in times.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let g0 = g.eval(s0)?;
        let g1 = g.eval(s1)?;
        let left = f.eval(s0)?.dot(&g.right_limit(s0)?.sub(&g0));
        let right = f.eval(s1)?.dot(&g1.sub(&g.left_limit(s1)?));
        let c = left + right;
        value += c;
        decomposition.push(Contribution { from: s0, to: s1, value: c });
    }
    Ok(IntegralValue { value, decomposition })
}

/// `∫⟨f, dg⟩` for right-continuous step functions:
/// `Σ_j ⟨f(s_j), g(s_j) - g(s_{j-1})⟩` over the merged breakpoints.
pub fn ks_integral<V: Vector>(f: &StepFn<V>, g: &StepFn<V>) -> Result<IntegralValue> {
    let times = f.merged_times(g)?;
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let fv = f.refine(&times)?;
    let gv = g.refine(&times)?;
    let (fv, gv) = (fv.values(), gv.values());
    let mut decomposition = Vec::with_capacity(times.len() - 1);
    let mut value = 0.0;
    for j in 1..times.len() {
        let c = fv[j].dot(&gv[j].sub(&gv[j - 1]));
        value += c;
        decomposition.push(Contribution { from: times[j - 1], to: times[j], value: c });
    }
    Ok(IntegralValue { value, decomposition })
}

/// Scalar integral against a nondecreasing right-continuous integrator.
pub fn ks_integral_scalar(f: &StepFn<f64>, g: &StepFn<f64>) -> Result<f64> {
    if let Some((t, _, _)) = g.jumps().find(|(_, l, r)| r < l) {
        return Err(Error::NotMonotone(t));
    }
    Ok(ks_integral(f, g)?.value)
}

/// `Σ_t (⟨Δ⁻f, Δ⁻g⟩ - ⟨Δ⁺f, Δ⁺g⟩)` over the merged breakpoints.
fn jump_correction<V: Vector>(f: &GeneralStep<V>, g: &GeneralStep<V>) -> Result<f64> {
    let mut sum = 0.0;
    for &t in &merge_times(&f.times, &g.times) {
        let (fv, gv) = (f.eval(t)?, g.eval(t)?);
        let dm = fv.sub(&f.left_limit(t)?).dot(&gv.sub(&g.left_limit(t)?));
        let dp = f.right_limit(t)?.sub(&fv).dot(&g.right_limit(t)?.sub(&gv));
        sum += dm - dp;
    }
    Ok(sum)
}

/// Defect of the integration-by-parts formula for general step functions.
pub fn parts_defect_general<V: Vector>(f: &GeneralStep<V>, g: &GeneralStep<V>) -> Result<f64> {
    let fg = ks_integral_general(f, g)?.value;
    let gf = ks_integral_general(g, f)?.value;
    let (a, b) = (f.start(), f.end());
    let boundary = f.eval(b)?.dot(&g.eval(b)?) - f.eval(a)?.dot(&g.eval(a)?);
    Ok((fg + gf - boundary - jump_correction(f, g)?).abs())
}

/// Defect of `∫⟨f,dg⟩ + ∫⟨g,df⟩ = ⟨f(b),g(b)⟩ - ⟨f(a),g(a)⟩ + Σ(⟨Δ⁻f,Δ⁻g⟩ - ⟨Δ⁺f,Δ⁺g⟩)`.
pub fn parts_defect<V: Vector>(f: &StepFn<V>, g: &StepFn<V>) -> Result<f64> {
    parts_defect_general(&GeneralStep::from(f), &GeneralStep::from(g))
}

/// Defect of `∫⟨g,dg⟩ = |g(b)|²/2 - |g(a)|²/2 + Σ|g(t) - g(t-)|²/2`.
pub fn quadratic_defect<V: Vector>(g: &StepFn<V>) -> Result<f64> {
    let lhs = ks_integral(g, g)?.value;
    let jumps: f64 = g.jumps().map(|(_, l, r)| r.sub(l).dot(&r.sub(l))).sum();
    let (ga, gb) = (&g.values()[0], g.final_value());
    let rhs = 0.5 * gb.dot(gb) - 0.5 * ga.dot(ga) + 0.5 * jumps;
    Ok((lhs - rhs).abs())
}

/// Defect of `∫_a^c = lim_{s↑c} ∫_a^s + ⟨f(c), g(c) - g(c-)⟩` for `c ∈ (a, b]`,
/// with the limit taken at the last merged breakpoint before `c`.
pub fn hake_check<V: Vector>(f: &StepFn<V>, g: &StepFn<V>, c: f64) -> Result<f64> {
    let (a, b) = (f.start(), f.end());
    if !(c > a && c <= b) {
        return Err(Error::OutOfDomain { t: c, start: a, end: b });
    }
    let times = f.merged_times(g)?;
    let s = times[times.partition_point(|&t| t < c) - 1];
    let full = ks_integral(&f.restrict(a, c)?, &g.restrict(a, c)?)?.value;
    let before = if s > a { ks_integral(&f.restrict(a, s)?, &g.restrict(a, s)?)?.value } else { 0.0 };
    let jump = f.eval(c)?.dot(&g.eval(c)?.sub(&g.left_limit(c)?));
    Ok((full - before - jump).abs())
}

/// Tolerance for identity checks: `IDENTITY (1 + ‖f‖∞)(1 + Var g)`.
pub fn identity_tolerance<V: Vector>(f: &StepFn<V>, g: &StepFn<V>) -> f64 {
    let sup = |h: &StepFn<V>| h.values().iter().map(Vector::norm).fold(0.0, f64::max);
    tolerance::IDENTITY * (1.0 + sup(f).max(sup(g))) * (1.0 + g.total_variation().total.max(f.total_variation().total))
}

/// Generalized exponential: the solution of `y(t) = 1 + ∫_0^t y dg`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenExp {
    pub driver: StepFn<f64>,
    pub solution: StepFn<f64>,
}

impl GenExp {
    /// `e^{2(g(T) - g(0))}`.
    pub fn upper_bound(&self) -> f64 {
        (2.0 * (self.driver.final_value() - self.driver.values()[0])).exp()
    }

    /// `max_j |y_j - 1 - Σ_{i≤j} y_i (g_i - g_{i-1})|`.
    pub fn equation_residual(&self) -> f64 {
        let (g, y) = (self.driver.values(), self.solution.values());
        let mut acc = 0.0;
        let mut worst = (y[0] - 1.0).abs();
        for j in 1..y.len() {
            acc += y[j] * (g[j] - g[j - 1]);
            worst = worst.max((y[j] - 1.0 - acc).abs());
        }
        worst
    }
}

/// `y_0 = 1`, `y_j = y_{j-1} / (1 - (g_j - g_{j-1}))`.
pub fn gen_exponential(g: &StepFn<f64>) -> Result<GenExp> {
    let gv = g.values();
    let mut y = Vec::with_capacity(gv.len());
    y.push(1.0);
    for j in 1..gv.len() {
        let d = gv[j] - gv[j - 1];
        let t = g.times()[j];
        if d < 0.0 {
            return Err(Error::NotMonotone(t));
        }
        if d > 0.5 {
            return Err(Error::JumpTooLarge { t, jump: d });
        }
        y.push(y[j - 1] / (1.0 - d));
    }
    let solution = StepFn::new(g.times().to_vec(), y)?;
    Ok(GenExp { driver: g.clone(), solution })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    /// `min_t (γ + ∫_0^t z dg - z(t))`.
    pub hypothesis_margin: f64,
    /// `min_t (γ y(t) - z(t))`.
    pub min_slack: f64,
}

/// Checks `z ≤ γ + ∫ z dg` at every merged breakpoint and then asserts
/// `z ≤ γ y` where `y` is the generalized exponential of `g`.
pub fn gronwall_bound(z: &StepFn<f64>, g: &StepFn<f64>, gamma: f64) -> Result<GronwallReport> {
    if gamma < 0.0 {
        return Err(Error::Precondition(format!("gamma = {gamma} is negative")));
    }
    let times = z.merged_times(g)?;
    let zv = z.refine(&times)?;
    let gv = g.refine(&times)?;
    if let Some(&bad) = zv.values().iter().find(|v| **v < 0.0) {
        return Err(Error::Precondition(format!("z takes the negative value {bad}")));
    }
    let y = gen_exponential(&gv)?.solution;
    let (zs, gs, ys) = (zv.values(), gv.values(), y.values());
    let mut integral = 0.0;
    let mut margin = f64::INFINITY;
    for j in 0..times.len() {
        if j > 0 {
            integral += zs[j] * (gs[j] - gs[j - 1]);
        }
        let rhs = gamma + integral;
        if zs[j] > rhs + tolerance::slack_scale(rhs) {
            return Err(Error::GronwallHypothesis { t: times[j], lhs: zs[j], rhs });
        }
        margin = margin.min(rhs - zs[j]);
    }
    let mut slack = f64::INFINITY;
    for j in 0..times.len() {
        let bound = gamma * ys[j];
        if zs[j] > bound + tolerance::slack_scale(bound) {
            return Err(Error::GronwallConclusion { t: times[j], z: zs[j], bound });
        }
        slack = slack.min(bound - zs[j]);
    }
    Ok(GronwallReport { hypothesis_margin: margin, min_slack: slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::point;

    fn scalar(times: &[f64], values: &[f64]) -> StepFn<f64> {
        StepFn::new(times.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn indicator_cases() {
        let f = GeneralStep::new(
            vec![0.0, 0.3, 0.6, 1.0],
            vec![point(&[1.0, 2.0]), point(&[3.0, -1.0]), point(&[0.5, 0.5]), point(&[-2.0, 4.0])],
            vec![point(&[7.0, 7.0]), point(&[8.0, 8.0]), point(&[9.0, 9.0])],
        )
        .unwrap();
        let v = point(&[1.0, 1.0]);
        for (tau, ft) in [(0.3, 2.0), (0.45, 16.0), (1.0, 2.0)] {
            let g = GeneralStep::interval_indicator(0.0, 1.0, tau, v.clone()).unwrap();
            assert_eq!(ks_integral_general(&f, &g).unwrap().value, -ft);
        }
        let g = GeneralStep::point_mass(0.0, 1.0, 0.6, v.clone()).unwrap();
        assert_eq!(ks_integral_general(&f, &g).unwrap().value, 0.0);
        let g = GeneralStep::point_mass(0.0, 1.0, 0.0, v.clone()).unwrap();
        assert_eq!(ks_integral_general(&f, &g).unwrap().value, -3.0);
        let g = GeneralStep::point_mass(0.0, 1.0, 1.0, v).unwrap();
        assert_eq!(ks_integral_general(&f, &g).unwrap().value, 2.0);
    }

    #[test]
    fn constant_integrand_telescopes() {
        let g = StepFn::new(vec![0.0, 0.2, 1.0], vec![point(&[1.0, 0.0]), point(&[0.0, 3.0]), point(&[2.0, 2.0])]).unwrap();
        let f = StepFn::constant(0.0, 1.0, point(&[0.5, -1.0])).unwrap();
        let v = ks_integral(&f, &g).unwrap();
        assert_eq!(v.value, 0.5 * 1.0 - 2.0);
        assert_eq!(v.decomposition.iter().map(|c| c.value).sum::<f64>(), v.value);
    }

    #[test]
    fn scalar_integral() {
        let g = scalar(&[0.0, 0.5, 1.0], &[0.0, 0.7, 0.7]);
        let one = StepFn::constant(0.0, 1.0, 1.0).unwrap();
        assert_eq!(ks_integral_scalar(&one, &g).unwrap(), 0.7);
        let chi = scalar(&[0.0, 0.5, 1.0], &[0.0, 1.0, 1.0]);
        assert_eq!(ks_integral_scalar(&chi, &g).unwrap(), 0.7);
        let dec = scalar(&[0.0, 0.5, 1.0], &[0.0, -0.1, 0.0]);
        assert_eq!(ks_integral_scalar(&one, &dec), Err(Error::NotMonotone(0.5)));
    }

    #[test]
    fn parts_and_quadratic() {
        let f = StepFn::new(vec![0.0, 0.25, 0.5, 1.0], vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let g = StepFn::new(vec![0.0, 0.5, 0.75, 1.0], vec![0.3, 1.1, -0.4, 2.0]).unwrap();
        assert!(parts_defect(&f, &g).unwrap() < 1e-14);
        assert!(quadratic_defect(&g).unwrap() < 1e-14);
        let c = StepFn::constant(0.0, 1.0, 2.0).unwrap();
        assert_eq!(parts_defect(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn hake_jump() {
        let e1 = StepFn::constant(0.0, 1.0, point(&[1.0, 0.0])).unwrap();
        let g = StepFn::new(vec![0.0, 0.4, 1.0], vec![point(&[0.0, 0.0]), point(&[0.25, 1.0]), point(&[0.25, 1.0])]).unwrap();
        assert_eq!(hake_check(&e1, &g, 0.4).unwrap(), 0.0);
        assert_eq!(hake_check(&e1, &g, 0.7).unwrap(), 0.0);
        let full = ks_integral(&e1.restrict(0.0, 0.4).unwrap(), &g.restrict(0.0, 0.4).unwrap()).unwrap().value;
        assert_eq!(full, 0.25);
    }

    #[test]
    fn exponential_product() {
        let g = scalar(&[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5]);
        let y = gen_exponential(&g).unwrap();
        assert_eq!(y.solution.values(), &[1.0, 4.0 / 3.0, 16.0 / 9.0]);
        assert!(y.equation_residual() < 1e-15);
        let flat = StepFn::constant(0.0, 1.0, 3.0).unwrap();
        assert!(gen_exponential(&flat).unwrap().solution.values().iter().all(|&v| v == 1.0));
        let big = scalar(&[0.0, 1.0], &[0.0, 0.6]);
        assert!(matches!(gen_exponential(&big), Err(Error::JumpTooLarge { .. })));
    }

    #[test]
    fn exponential_limit() {
        let n = 1000;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let g = StepFn::new(times.clone(), times).unwrap();
        let y = gen_exponential(&g).unwrap();
        let end = *y.solution.final_value();
        assert!((end - std::f64::consts::E).abs() < 2e-3);
        assert!(end <= y.upper_bound());
    }

    #[test]
    fn gronwall_cases() {
        let g = scalar(&[0.0, 0.3, 0.6, 1.0], &[0.0, 0.2, 0.5, 0.6]);
        let y = gen_exponential(&g).unwrap().solution;
        let z = y.map(|v| 2.0 * v);
        let rep = gronwall_bound(&z, &g, 2.0).unwrap();
        assert!(rep.min_slack.abs() < 1e-14 && rep.hypothesis_margin.abs() < 1e-14);
        let flat = StepFn::constant(0.0, 1.0, 0.0).unwrap();
        let z = scalar(&[0.0, 0.5, 1.0], &[0.5, 1.0, 0.2]);
        assert!(gronwall_bound(&z, &flat, 1.0).unwrap().min_slack >= 0.0);
        assert!(matches!(gronwall_bound(&z, &flat, 0.9), Err(Error::GronwallHypothesis { .. })));
    }
}
