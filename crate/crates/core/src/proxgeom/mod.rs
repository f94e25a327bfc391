//! Prox-regular sets in `R^n`, parametric families `w -> Z(w)` and numerical
//! certification of the geometric conditions used by the sweeping solver.
//!
//! Every concrete set computes its nearest point exactly (closed form or a
//! finite candidate list), so distances double as oracles for sampled checks.

mod certify;
mod family;
mod sets;

pub use certify::{
    interior_cone_equiv_check, interior_witness, projection_stability_check, projection_stability_constant,
    prox_regularity_sampler, proximal_normal, segment_distance_check, LintPoint, LintReport, NormalReport,
    NormalVector, ProxViolation, StabilityReport,
};
pub use family::{FixedFamily, ParamFamily, RotationFamily, ScaledBallFamily, TranslationFamily};
pub use sets::{Ball, BallUnionComplement, BoxSet, Crescent, HalfSpace, Intersection, Rotated, Translated, TwoBalls};

use crate::error::{Error, Result};
use crate::vector::Point;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;

/// Seeded generator used by every sampler in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform-non-empty-interior parameters `(rho, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorParams {
    pub rho: f64,
    pub big_r: f64,
}

impl InteriorParams {
    /// Checks `R >= 3` and `0 < rho < 2r / (1 + R^2)`.
    pub fn validate(&self, r: f64) -> Result<()> {
        let limit = 2.0 * r / (1.0 + self.big_r * self.big_r);
        if self.big_r < 3.0 || !(self.rho > 0.0) || !(self.rho < limit) {
            return Err(Error::Precondition(format!(
                "interior parameters rho = {}, R = {} need R >= 3 and 0 < rho < 2r/(1+R^2) = {limit}",
                self.rho, self.big_r
            )));
        }
        Ok(())
    }
}

/// Two-sided enclosure of a Hausdorff distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Closed `r`-prox-regular subset of `R^n`.
pub trait ProxSet: Send + Sync + Debug {
    fn label(&self) -> String;
    fn dim(&self) -> usize;
    /// Largest `r` for which the set is certified `r`-prox-regular
    /// (`f64::INFINITY` for convex sets).
    fn prox_radius(&self) -> f64;
    fn contains(&self, x: &Point) -> bool;
    /// A nearest point of the set; unique whenever `distance(y) < prox_radius`.
    fn nearest_point(&self, y: &Point) -> Point;
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point>;
    /// Boundary points such that every boundary point lies within `spacing`
    /// of one of them; `None` when the boundary is unbounded or not gridded.
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>>;
    /// `{x : B_margin(x) ⊆ Z}`, or `None` when it is empty.
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>>;
    fn interior_params(&self) -> Option<InteriorParams>;
    fn is_convex(&self) -> bool;
    /// `sup_{z in Z} |z - about|`, or `None` when unbounded.
    fn bounding_radius(&self, about: &Point) -> Option<f64>;
    /// Exact `d_H(Z, Z + v)` when available.
    fn translation_hausdorff(&self, v: &Point) -> Option<f64>;

    fn distance(&self, y: &Point) -> f64 {
        (y - self.nearest_point(y)).norm()
    }

    fn is_bounded(&self) -> bool {
        self.bounding_radius(&Point::zeros(self.dim())).is_some()
    }

    /// Members of the set near `center`: projections of uniform samples
    /// from the ball of the given radius.
    fn sample_members(&self, center: &Point, radius: f64, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        (0..count)
            .map(|_| {
                let y = center + random_in_ball(self.dim(), radius, rng);
                self.nearest_point(&y)
            })
            .collect()
    }
}

/// Unit vector with uniformly distributed direction.
pub fn random_unit(dim: usize, rng: &mut SeededRng) -> Point {
    loop {
        let v = Point::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniform sample from the closed ball of radius `radius` about the origin.
pub fn random_in_ball(dim: usize, radius: f64, rng: &mut SeededRng) -> Point {
    let u: f64 = rng.random();
    random_unit(dim, rng) * (radius * u.powf(1.0 / dim as f64))
}

/// Proximal projection: the unique nearest point, defined on the open tube
/// `dist(y, Z) < r`.
pub fn project(set: &dyn ProxSet, y: &Point) -> Result<Point> {
    if y.len() != set.dim() {
        return Err(Error::DimensionMismatch(set.dim(), y.len()));
    }
    let x = set.nearest_point(y);
    let d = (y - &x).norm();
    let r = set.prox_radius();
    if d >= r {
        return Err(Error::OutOfReach { dist: d, r });
    }
    Ok(x)
}

/// Sampled one-sided distance `sup_{a in A} dist(a, B)` over a point cloud.
pub(crate) fn one_sided(points: &[Point], b: &dyn ProxSet) -> f64 {
    points.iter().map(|p| b.distance(p)).fold(0.0, f64::max)
}

/// Hausdorff bracket for two arbitrary sets from boundary grids (certified
/// for bounded sets) or random boundary samples (lower bound only).
pub fn hausdorff_bracket(a: &dyn ProxSet, b: &dyn ProxSet, spacing: f64, rng: &mut SeededRng) -> Bracket {
    if a.is_bounded() && b.is_bounded() {
        if let (Some(ga), Some(gb)) = (a.boundary_grid(spacing), b.boundary_grid(spacing)) {
            let lo = one_sided(&ga, b).max(one_sided(&gb, a));
            return Bracket { lo, hi: lo + spacing };
        }
    }
    let sa = a.boundary_sample(4096, rng);
    let sb = b.boundary_sample(4096, rng);
    Bracket { lo: one_sided(&sa, b).max(one_sided(&sb, a)), hi: f64::INFINITY }
}
