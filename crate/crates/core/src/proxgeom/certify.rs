use super::{project, random_unit, ProxSet, SeededRng};
use crate::error::{Error, Result};
use crate::vector::Point;
use serde::Serialize;

/// Max deviation `|dist(x + (s/d)(y - x), Z) - s|` over `s` on a uniform grid
/// of `[0, r]` (of `[0, max(2, 4d)]` for convex sets).
pub fn segment_distance_check(set: &dyn ProxSet, y: &Point, samples: usize) -> Result<f64> {
    let r = set.prox_radius();
    let x = set.nearest_point(y);
    let d = (y - &x).norm();
    if !(d > 0.0 && d < r) {
        return Err(Error::Precondition(format!("need 0 < dist(y) = {d} < r = {r}")));
    }
    let s_max = if r.is_finite() { r } else { (4.0 * d).max(2.0) };
    let dir = (y - &x) / d;
    let n = samples.max(2);
    let mut worst = 0.0f64;
    for k in 0..n {
        let s = s_max * k as f64 / (n - 1) as f64;
        let p = &x + &dir * s;
        worst = worst.max((set.distance(&p) - s).abs());
    }
    Ok(worst)
}

/// Centre `x̄` of a `3 rho`-ball inside `Z` nearest to `x`: the nearest point
/// of the eroded set.
pub fn interior_witness(set: &dyn ProxSet, x: &Point, rho: f64) -> Option<Point> {
    set.eroded(3.0 * rho).map(|e| e.nearest_point(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct LintPoint {
    pub rho: f64,
    pub big_r: f64,
    /// Witness with `|x - x̄| <= R rho` and `B_{3 rho}(x̄) ⊆ Z` at every sample.
    pub ball_ok: bool,
    /// Cone `x + a(x* - x) + a B_rho(0) ⊆ Z` with `x* = x̄`, `|x - x*| <= R rho`.
    pub cone_ok: bool,
    /// `max_x (|x - x̄|^2 + rho^2 - 2 r rho)`; negative when the ball form holds.
    pub worst_ball_gap: f64,
    /// Sample point attaining `worst_ball_gap`.
    pub worst_point: Vec<f64>,
}

impl LintPoint {
    pub fn agree(&self) -> bool {
        self.ball_ok == self.cone_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LintReport {
    pub set: String,
    pub r: f64,
    pub points: Vec<LintPoint>,
}

impl LintReport {
    pub fn all_agree(&self) -> bool {
        self.points.iter().all(LintPoint::agree)
    }
}

/// Evaluates the ball form and the cone form of the interior condition at
/// each `(rho, R)` of `grid` (the set's own parameters when `grid` is empty)
/// on sampled members of the set.
pub fn interior_cone_equiv_check(
    set: &dyn ProxSet,
    r: f64,
    grid: &[(f64, f64)],
    samples: usize,
    rng: &mut SeededRng,
) -> Result<LintReport> {
    let grid: Vec<(f64, f64)> = if grid.is_empty() {
        let p = set.interior_params().ok_or_else(|| Error::NoInterior(set.label()))?;
        vec![(p.rho, p.big_r)]
    } else {
        grid.to_vec()
    };
    let mut xs = set.boundary_sample(samples, rng);
    let anchors: Vec<Point> = xs.iter().take(samples / 4 + 1).cloned().collect();
    for a in &anchors {
        xs.extend(set.sample_members(a, 0.3, 1, rng));
    }
    let dirs: Vec<Point> = (0..24).map(|_| random_unit(set.dim(), rng)).collect();
    let alphas: Vec<f64> = (0..12).map(|k| 0.5f64.powi(k)).chain([0.75, 0.3, 0.1]).collect();

    let mut points = Vec::with_capacity(grid.len());
    for (rho, big_r) in grid {
        let eroded = set.eroded(3.0 * rho);
        let mut ball_ok = true;
        let mut cone_ok = true;
        let mut worst = f64::NEG_INFINITY;
        let mut worst_point = Vec::new();
        for x in &xs {
            let Some(xb) = eroded.as_ref().map(|e| e.nearest_point(x)) else {
                ball_ok = false;
                cone_ok = false;
                worst = f64::INFINITY;
                worst_point = x.iter().copied().collect();
                break;
            };
            let dist = (x - &xb).norm();
            let gap = dist * dist + rho * rho - 2.0 * r * rho;
            if gap > worst {
                worst = gap;
                worst_point = x.iter().copied().collect();
            }
            let near = dist <= big_r * rho * (1.0 + 1e-12);
            let ball_in = dirs.iter().all(|u| set.contains(&(&xb + u * (3.0 * rho)))) && set.contains(&xb);
            ball_ok &= near && ball_in;
            let cone_in = alphas.iter().all(|&a| {
                let c = x + (&xb - x) * a;
                set.contains(&c) && dirs.iter().all(|u| set.contains(&(&c + u * (a * rho))))
            });
            cone_ok &= near && cone_in;
        }
        points.push(LintPoint { rho, big_r, ball_ok, cone_ok, worst_ball_gap: worst, worst_point });
    }
    Ok(LintReport { set: set.label(), r, points })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProxViolation {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    /// Either `reach` (the point `x + (r/d)(y - x)` is closer than `r` to
    /// the set) or `inequality` (a sampled `z` violates the projection
    /// inequality).
    pub kind: String,
    pub defect: f64,
}

/// Falsifier for `r`-prox-regularity: samples `y` with `0 < dist(y) < r`
/// around the boundary and checks the reach condition and the projection
/// inequality against sampled members. Returns the worst violation found.
pub fn prox_regularity_sampler(
    set: &dyn ProxSet,
    r: f64,
    samples: usize,
    z_samples: usize,
    rng: &mut SeededRng,
) -> Option<ProxViolation> {
    let anchors = set.boundary_sample(samples, rng);
    let mut worst: Option<ProxViolation> = None;
    let tol = 1e-9 * (1.0 + r);
    for b in &anchors {
        let y = b + super::random_in_ball(set.dim(), r, rng);
        let x = set.nearest_point(&y);
        let d = (&y - &x).norm();
        if !(d > 0.0 && d < r) {
            continue;
        }
        let far = &x + (&y - &x) * (r / d);
        let reach_defect = r - set.distance(&far);
        let mut record = |kind: &str, defect: f64| {
            if defect > tol && worst.as_ref().is_none_or(|w| defect > w.defect) {
                worst = Some(ProxViolation {
                    y: y.iter().copied().collect(),
                    x: x.iter().copied().collect(),
                    kind: kind.to_string(),
                    defect,
                });
            }
        };
        record("reach", reach_defect);
        for z in set.sample_members(&x, 2.0 * r, z_samples, rng) {
            let v = (&y - &x).dot(&(&x - &z)) + d / (2.0 * r) * (&x - &z).norm_squared();
            record("inequality", -v);
        }
    }
    worst
}

/// Outward unit normal at a boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct NormalVector {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
}

impl NormalVector {
    /// `min_z <xi, x - z> + |x - z|^2 / 2r` over the supplied members.
    pub fn defect(&self, r: f64, members: &[Point]) -> f64 {
        let x = Point::from_column_slice(&self.base);
        let xi = Point::from_column_slice(&self.direction);
        members
            .iter()
            .map(|z| {
                let q = if r.is_finite() { (&x - z).norm_squared() / (2.0 * r) } else { 0.0 };
                xi.dot(&(&x - z)) + q
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalReport {
    pub normal: Option<NormalVector>,
    /// Projections of the final probe land on `x` and the direction is a
    /// fixed point of the probe iteration.
    pub converged: bool,
    /// `|P(x + h xi) - x|` for the final probe.
    pub residual: f64,
}

/// Numeric proximal normal by projecting probes `x + h u` and iterating
/// `u <- (y - P(y)) / |y - P(y)|` over a shrinking step `h`.
pub fn proximal_normal(set: &dyn ProxSet, x: &Point, h: f64, rng: &mut SeededRng) -> Result<NormalReport> {
    if !set.contains(x) {
        return Err(Error::Precondition("normal requested at a point outside the set".into()));
    }
    let mut best: Option<(Point, f64)> = None;
    for _ in 0..256 {
        let u = random_unit(set.dim(), rng);
        let y = x + &u * h;
        if set.contains(&y) {
            continue;
        }
        let p = set.nearest_point(&y);
        let e = (&p - x).norm();
        if best.as_ref().is_none_or(|b| e < b.1) {
            best = Some(((&y - &p) / (&y - &p).norm(), e));
        }
    }
    let Some((mut u, _)) = best else {
        return Ok(NormalReport { normal: None, converged: false, residual: f64::INFINITY });
    };
    let mut residual = f64::INFINITY;
    let mut change = f64::INFINITY;
    let mut step = h;
    for _ in 0..12 {
        for _ in 0..50 {
            let y = x + &u * step;
            let p = set.nearest_point(&y);
            let gap = &y - &p;
            residual = (&p - x).norm();
            if gap.norm() == 0.0 {
                break;
            }
            let next = &gap / gap.norm();
            change = (&next - &u).norm();
            u = next;
            if change < 1e-13 {
                break;
            }
        }
        step *= 0.5;
    }
    let converged = residual <= 1e-9 * (1.0 + h) && change < 1e-9;
    Ok(NormalReport {
        normal: Some(NormalVector { base: x.iter().copied().collect(), direction: u.iter().copied().collect() }),
        converged,
        residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub r_eff: f64,
    pub slack: f64,
}

/// Constant in `|ζ1 - ζ2|^2 <= C(|y1 - y2|^2 + d_H^2 + d_H)`.
///
/// The chain `E^2 <= 3/4 E^2 + (D + Y)^2 + D^2/2 + rD` with
/// `(D + Y)^2 <= 2D^2 + 2Y^2` gives `E^2 <= 8Y^2 + 10D^2 + 4rD`.
pub fn projection_stability_constant(r: f64) -> f64 {
    10f64.max(4.0 * r)
}

/// Checks the projection stability estimate for `y_i` within `r/2` of `Z_i`.
/// `dh` is an upper bound on `d_H(Z1, Z2)`.
pub fn projection_stability_check(
    z1: &dyn ProxSet,
    z2: &dyn ProxSet,
    y1: &Point,
    y2: &Point,
    dh: f64,
) -> Result<StabilityReport> {
    if !dh.is_finite() {
        return Err(Error::Hausdorff("projection stability needs a finite d_H".into()));
    }
    let r = z1.prox_radius().min(z2.prox_radius());
    let delta = z1.distance(y1).max(z2.distance(y2));
    if delta > r / 2.0 {
        return Err(Error::Precondition(format!("dist(y_i, Z_i) = {delta} exceeds r/2 = {}", r / 2.0)));
    }
    let r_eff = (2.0 * delta).max(r.min(2.5));
    let c = projection_stability_constant(r_eff);
    let zeta1 = project(z1, y1)?;
    let zeta2 = project(z2, y2)?;
    let lhs = (&zeta1 - &zeta2).norm_squared();
    let rhs = c * ((y1 - y2).norm_squared() + dh * dh + dh);
    Ok(StabilityReport { lhs, rhs, constant: c, r_eff, slack: rhs - lhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::sets::*;
    use crate::proxgeom::seeded;
    use crate::vector::point;

    #[test]
    fn segment_radial_and_affine() {
        let z = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
        assert!(segment_distance_check(&z, &point(&[0.6, 0.0]), 101).unwrap() < 1e-15);
        let h = HalfSpace::new(point(&[1.0, 1.0]), 0.5).unwrap();
        assert!(segment_distance_check(&h, &point(&[2.0, 0.3]), 101).unwrap() < 1e-14);
        assert!(segment_distance_check(&z, &point(&[2.0, 0.0]), 10).is_err());
    }

    #[test]
    fn lint_ball_and_cusp() {
        let mut rng = seeded(11);
        let b = Ball::new(point(&[0.0, 0.0]), 1.0);
        let rep = interior_cone_equiv_check(&b, 1.0, &[(0.1, 3.0)], 200, &mut rng).unwrap();
        assert!(rep.points[0].ball_ok && rep.points[0].cone_ok);
        let cusp = BallUnionComplement::cusp(1.0);
        let rep = interior_cone_equiv_check(&cusp, 1.0, &[(0.05, 3.0), (0.02, 4.0)], 400, &mut rng).unwrap();
        for p in &rep.points {
            assert!(!p.ball_ok && !p.cone_ok);
            assert!(p.worst_ball_gap > 0.0);
        }
        assert!(interior_cone_equiv_check(&cusp, 1.0, &[], 10, &mut rng).is_err());
    }

    #[test]
    fn sampler_on_ball_complement() {
        let z = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
        let mut rng = seeded(2);
        assert!(prox_regularity_sampler(&z, 1.0, 500, 20, &mut rng).is_none());
        let v = prox_regularity_sampler(&z, 1.5, 500, 20, &mut rng).expect("violation at r = 1.5");
        assert!(v.defect > 0.0);
    }

    #[test]
    fn normals() {
        let z = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
        let mut rng = seeded(4);
        let x = point(&[0.6, 0.8]);
        let rep = proximal_normal(&z, &x, 0.1, &mut rng).unwrap();
        assert!(rep.converged);
        let n = rep.normal.unwrap();
        assert!((n.direction[0] + 0.6).abs() < 1e-9 && (n.direction[1] + 0.8).abs() < 1e-9);
        let members = z.boundary_sample(500, &mut rng);
        assert!(n.defect(1.0, &members) >= -1e-12);
    }

    #[test]
    fn stability_examples() {
        let z = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
        let same = projection_stability_check(&z, &z, &point(&[0.6, 0.0]), &point(&[0.6, 0.0]), 0.0).unwrap();
        assert_eq!(same.lhs, 0.0);
        let rep = projection_stability_check(&z, &z, &point(&[0.5, 0.0]), &point(&[0.5, 0.1]), 0.0).unwrap();
        assert!(rep.slack >= 0.0);
        assert!(projection_stability_check(&z, &z, &point(&[0.2, 0.0]), &point(&[0.5, 0.1]), 0.0).is_err());
    }
}
