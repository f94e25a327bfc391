//! Catching-up scheme for sweeping processes with prox-regular moving
//! constraints driven by right-continuous regulated inputs.
//!
//! The crate is split along the mathematical layers it needs:
//!
//! * [`regulated`]: right-continuous step functions, variation, sup-norm
//!   distance and step approximation of regulated inputs.
//! * [`kurzweil`]: closed-form Kurzweil-Stieltjes integrals of step pairs,
//!   integration by parts, the generalized exponential and Gronwall checks.
//! * [`proxgeom`]: prox-regular sets in `R^n`, parametric families `w -> Z(w)`,
//!   Hausdorff distances and sampling-based certification of the geometric
//!   conditions.
//! * [`sweeper`]: the catching-up recursion, refinement and continuous
//!   dependence drivers, residuals and variation audits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kurzweil;
pub mod proxgeom;
pub mod regulated;
pub mod sweeper;
pub mod tolerance;
pub mod vector;

pub use error::{Error, Result};
pub use kurzweil::{GenExp, IntegralValue};
pub use proxgeom::{Bracket, InteriorParams, ParamFamily, ProxSet};
pub use regulated::{RegulatedInput, StepFn, Variation};
pub use sweeper::{SweepProblem, SweepSolution};
pub use vector::{Point, Vector};

/// Jump-safety constant, the positive root of `2M^2 - 9M + 2 = 0`.
pub fn default_jump_constant() -> f64 {
    (9.0 + 65f64.sqrt()) / 4.0
}
