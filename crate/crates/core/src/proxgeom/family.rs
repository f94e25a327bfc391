use super::sets::{Ball, Rotated, Translated};
use super::{one_sided, Bracket, InteriorParams, ProxSet};
use crate::error::{Error, Result};
use crate::vector::Point;
use std::fmt::Debug;
use std::sync::Arc;

/// Parametric family `w -> Z(w)` of prox-regular sets.
pub trait ParamFamily: Send + Sync + Debug {
    fn label(&self) -> String;
    fn param_dim(&self) -> usize;
    fn in_domain(&self, w: &Point) -> bool;
    fn set_at(&self, w: &Point) -> Result<Arc<dyn ProxSet>>;
    /// Hausdorff distance, exact where analytic and bracketed otherwise.
    fn hausdorff(&self, w1: &Point, w2: &Point) -> Result<Bracket>;
    /// Constant `L` with `d_H(Z(w1), Z(w2)) <= L |w1 - w2|`, when known.
    fn lipschitz(&self) -> Option<f64>;
    /// Continuity modulus `eps -> delta` for the Hausdorff distance.
    fn modulus(&self, eps: f64) -> f64;
    /// A radius `r` for which every member is `r`-prox-regular.
    fn prox_radius(&self) -> f64;
    fn interior(&self) -> Option<InteriorParams>;

    /// Cheap certified upper bound on the Hausdorff distance.
    fn hausdorff_upper(&self, w1: &Point, w2: &Point) -> Result<f64> {
        Ok(self.hausdorff(w1, w2)?.hi)
    }

    fn check_domain(&self, w: &Point) -> Result<()> {
        if w.len() != self.param_dim() {
            return Err(Error::DimensionMismatch(self.param_dim(), w.len()));
        }
        if !self.in_domain(w) {
            return Err(Error::ParamOutsideDomain(w.iter().copied().collect()));
        }
        Ok(())
    }
}

/// A single set, independent of the (one-dimensional) parameter.
#[derive(Debug, Clone)]
pub struct FixedFamily {
    pub set: Arc<dyn ProxSet>,
}

impl ParamFamily for FixedFamily {
    fn label(&self) -> String {
        format!("fixed[{}]", self.set.label())
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn in_domain(&self, w: &Point) -> bool {
        w.iter().all(|v| v.is_finite())
    }
    fn set_at(&self, w: &Point) -> Result<Arc<dyn ProxSet>> {
        self.check_domain(w)?;
        Ok(self.set.clone())
    }
    fn hausdorff(&self, w1: &Point, w2: &Point) -> Result<Bracket> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        Ok(Bracket::exact(0.0))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
    fn modulus(&self, _eps: f64) -> f64 {
        f64::INFINITY
    }
    fn prox_radius(&self) -> f64 {
        self.set.prox_radius()
    }
    fn interior(&self) -> Option<InteriorParams> {
        self.set.interior_params()
    }
}

/// Translates `Z(w) = Z0 + w` with `w` in `R^n`.
#[derive(Debug, Clone)]
pub struct TranslationFamily {
    pub base: Arc<dyn ProxSet>,
}

impl ParamFamily for TranslationFamily {
    fn label(&self) -> String {
        format!("translate[{}]", self.base.label())
    }
    fn param_dim(&self) -> usize {
        self.base.dim()
    }
    fn in_domain(&self, w: &Point) -> bool {
        w.iter().all(|v| v.is_finite())
    }
    fn set_at(&self, w: &Point) -> Result<Arc<dyn ProxSet>> {
        self.check_domain(w)?;
        Ok(Arc::new(Translated { base: self.base.clone(), shift: w.clone() }))
    }
    fn hausdorff(&self, w1: &Point, w2: &Point) -> Result<Bracket> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        let v = w2 - w1;
        if let Some(d) = self.base.translation_hausdorff(&v) {
            return Ok(Bracket::exact(d));
        }
        let a = self.set_at(w1)?;
        let b = self.set_at(w2)?;
        let mut rng = super::seeded(0);
        let sa = a.boundary_sample(2048, &mut rng);
        let sb = b.boundary_sample(2048, &mut rng);
        let lo = one_sided(&sa, b.as_ref()).max(one_sided(&sb, a.as_ref()));
        Ok(Bracket { lo: lo.min(v.norm()), hi: v.norm() })
    }
    fn hausdorff_upper(&self, w1: &Point, w2: &Point) -> Result<f64> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        let v = w2 - w1;
        Ok(self.base.translation_hausdorff(&v).unwrap_or_else(|| v.norm()))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
    fn modulus(&self, eps: f64) -> f64 {
        eps
    }
    fn prox_radius(&self) -> f64 {
        self.base.prox_radius()
    }
    fn interior(&self) -> Option<InteriorParams> {
        self.base.interior_params()
    }
}

/// Concentric balls `Z(w) = B_w(c)` with `w` in `[r_min, r_max]`.
#[derive(Debug, Clone)]
pub struct ScaledBallFamily {
    pub center: Point,
    pub r_min: f64,
    pub r_max: f64,
    pub interior: Option<InteriorParams>,
}

impl ParamFamily for ScaledBallFamily {
    fn label(&self) -> String {
        format!("scaled_ball[c={:?}, w in [{}, {}]]", self.center.as_slice(), self.r_min, self.r_max)
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn in_domain(&self, w: &Point) -> bool {
        w[0] >= self.r_min && w[0] <= self.r_max
    }
    fn set_at(&self, w: &Point) -> Result<Arc<dyn ProxSet>> {
        self.check_domain(w)?;
        let mut b = Ball::new(self.center.clone(), w[0]);
        b.interior = self.interior;
        Ok(Arc::new(b))
    }
    fn hausdorff(&self, w1: &Point, w2: &Point) -> Result<Bracket> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        Ok(Bracket::exact((w1[0] - w2[0]).abs()))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
    fn modulus(&self, eps: f64) -> f64 {
        eps
    }
    fn prox_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn interior(&self) -> Option<InteriorParams> {
        self.interior
    }
}

/// Planar rotations `Z(w) = Rot_w(Z0)` about a fixed centre.
///
/// The upper bound `2 rho_max sin(|dw|/2)` uses the farthest distance of the
/// base set from the centre; the lower bound comes from boundary grids.
#[derive(Debug, Clone)]
pub struct RotationFamily {
    pub base: Arc<dyn ProxSet>,
    pub center: Point,
    pub grid_spacing: f64,
}

impl RotationFamily {
    pub fn new(base: Arc<dyn ProxSet>, center: Point) -> Result<Self> {
        if base.dim() != 2 || center.len() != 2 {
            return Err(Error::Precondition("rotation family is planar".into()));
        }
        if base.bounding_radius(&center).is_none() {
            return Err(Error::Precondition("rotation family needs a bounded base set".into()));
        }
        Ok(Self { base, center, grid_spacing: 2e-3 })
    }

    fn rho_max(&self) -> f64 {
        self.base.bounding_radius(&self.center).unwrap()
    }

    fn upper(&self, w1: &Point, w2: &Point) -> f64 {
        let dw = (w1[0] - w2[0]).abs().min(std::f64::consts::PI);
        2.0 * self.rho_max() * (dw / 2.0).sin()
    }
}

impl ParamFamily for RotationFamily {
    fn label(&self) -> String {
        format!("rotate[{} about {:?}]", self.base.label(), self.center.as_slice())
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn in_domain(&self, w: &Point) -> bool {
        w[0].is_finite()
    }
    fn set_at(&self, w: &Point) -> Result<Arc<dyn ProxSet>> {
        self.check_domain(w)?;
        Ok(Arc::new(Rotated { base: self.base.clone(), center: self.center.clone(), angle: w[0] }))
    }
    fn hausdorff(&self, w1: &Point, w2: &Point) -> Result<Bracket> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        if w1[0] == w2[0] {
            return Ok(Bracket::exact(0.0));
        }
        let a = self.set_at(w1)?;
        let b = self.set_at(w2)?;
        let hi = self.upper(w1, w2);
        let lo = match (a.boundary_grid(self.grid_spacing), b.boundary_grid(self.grid_spacing)) {
            (Some(ga), Some(gb)) => one_sided(&ga, b.as_ref()).max(one_sided(&gb, a.as_ref())),
            _ => 0.0,
        };
        Ok(Bracket { lo: lo.min(hi), hi })
    }
    fn hausdorff_upper(&self, w1: &Point, w2: &Point) -> Result<f64> {
        self.check_domain(w1)?;
        self.check_domain(w2)?;
        Ok(self.upper(w1, w2))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.rho_max())
    }
    fn modulus(&self, eps: f64) -> f64 {
        eps / self.rho_max()
    }
    fn prox_radius(&self) -> f64 {
        self.base.prox_radius()
    }
    fn interior(&self) -> Option<InteriorParams> {
        self.base.interior_params()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::sets::Crescent;
    use crate::vector::point;

    #[test]
    fn translation_exact() {
        let f = TranslationFamily { base: Arc::new(Ball::new(point(&[0.0, 0.0]), 1.0)) };
        let b = f.hausdorff(&point(&[0.0, 0.0]), &point(&[0.4, 0.0])).unwrap();
        assert_eq!(b, Bracket::exact(0.4));
    }

    #[test]
    fn concentric_exact() {
        let f = ScaledBallFamily { center: point(&[0.0, 0.0]), r_min: 0.5, r_max: 2.0, interior: None };
        assert_eq!(f.hausdorff(&point(&[1.0]), &point(&[1.5])).unwrap(), Bracket::exact(0.5));
        assert!(f.hausdorff(&point(&[1.0]), &point(&[3.0])).is_err());
    }

    #[test]
    fn rotation_bracket_contains_truth() {
        let c = Crescent::new(point(&[0.0, 0.0]), 1.0, point(&[1.2, 0.0]), 0.8).unwrap();
        let f = RotationFamily::new(Arc::new(c), point(&[0.0, 0.0])).unwrap();
        let b = f.hausdorff(&point(&[0.0]), &point(&[0.05])).unwrap();
        assert!(b.lo > 0.0 && b.lo <= b.hi);
        assert!(b.hi <= 0.05 + 1e-12);
        assert_eq!(f.lipschitz(), Some(1.0));
    }
}
