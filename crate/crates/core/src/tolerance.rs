//! Tolerances shared by the checks in this crate.
//!
//! The identities checked here are exact in real arithmetic, so every
//! tolerance below measures accumulated rounding only.

/// Absolute slack for membership tests, scaled by `1 + |x|`.
pub const MEMBERSHIP: f64 = 1e-12;

/// Identity checks on unit-scale data (integration by parts, quadratic
/// identity, Hake formula). Scaled by `(1 + |f|)(1 + Var g)` where used.
pub const IDENTITY: f64 = 1e-12;

/// Residual floor for variational inequalities built from projections.
pub const RESIDUAL: f64 = 1e-10;

/// Dykstra iterations stop when successive iterates move less than this.
pub const DYKSTRA: f64 = 1e-15;

/// Relative slack used when a bound is compared against a computed value.
pub fn slack_scale(a: f64) -> f64 {
    IDENTITY * (1.0 + a.abs())
}
