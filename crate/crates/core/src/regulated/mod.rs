//! Right-continuous step functions and regulated inputs on a compact interval.

mod input;
mod step;

pub use input::RegulatedInput;
pub use step::{merge_times, StepFn, Variation};

use crate::error::{Error, Result};
use crate::proxgeom::ParamFamily;
use crate::vector::Point;

/// Largest combined jump `d_H(Z(w(t)), Z(w(t-))) + |u(t) - u(t-)|` over the
/// merged breakpoints of `u` and `w`, using the family's upper bound on `d_H`.
pub fn max_jump_gauge(u: &StepFn<Point>, w: &StepFn<Point>, family: &dyn ParamFamily) -> Result<f64> {
    let times = u.merged_times(w)?;
    let mut gauge = 0.0f64;
    for &t in &times[1..] {
        let du = (u.eval(t)? - u.left_limit(t)?).norm();
        let (wr, wl) = (w.eval(t)?, w.left_limit(t)?);
        let dh = if wr == wl { 0.0 } else { family.hausdorff_upper(&wl, &wr)? };
        if !dh.is_finite() {
            return Err(Error::Hausdorff(format!("no finite bound at t = {t}")));
        }
        gauge = gauge.max(dh + du);
    }
    Ok(gauge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::{FixedFamily, ScaledBallFamily, Ball};
    use crate::vector::point;
    use std::sync::Arc;

    #[test]
    fn gauge_examples() {
        let fam = FixedFamily { set: Arc::new(Ball::new(point(&[0.0, 0.0]), 1.0)) };
        let u0 = StepFn::constant(0.0, 1.0, point(&[0.0, 0.0])).unwrap();
        let w0 = StepFn::constant(0.0, 1.0, point(&[0.0])).unwrap();
        assert_eq!(max_jump_gauge(&u0, &w0, &fam).unwrap(), 0.0);
        let u1 = StepFn::new(vec![0.0, 0.5, 1.0], vec![point(&[0.0, 0.0]), point(&[0.3, 0.0]), point(&[0.3, 0.0])]).unwrap();
        assert!((max_jump_gauge(&u1, &w0, &fam).unwrap() - 0.3).abs() < 1e-15);

        let scaled = ScaledBallFamily { center: point(&[0.0, 0.0]), r_min: 0.5, r_max: 2.0, interior: None };
        let u2 = StepFn::new(vec![0.0, 0.5, 1.0], vec![point(&[0.0, 0.0]), point(&[0.1, 0.0]), point(&[0.1, 0.0])]).unwrap();
        let w2 = StepFn::new(vec![0.0, 0.5, 1.0], vec![point(&[1.0]), point(&[1.2]), point(&[1.2])]).unwrap();
        assert!((max_jump_gauge(&u2, &w2, &scaled).unwrap() - 0.3).abs() < 1e-12);
    }
}
