use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time {t} outside [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("functions live on different intervals: [{0}, {1}] vs [{2}, {3}]")]
    IntervalMismatch(f64, f64, f64, f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("integrator is not nondecreasing at t = {0}")]
    NotMonotone(f64),

    #[error("continuity modulus cannot certify eps = {eps} on [{from}, {to}]: {detail}")]
    Modulus { eps: f64, from: f64, to: f64, detail: String },

    #[error("driver jump {jump} at t = {t} exceeds 1/2")]
    JumpTooLarge { t: f64, jump: f64 },

    #[error("gronwall hypothesis fails at t = {t}: z = {lhs} > {rhs}")]
    GronwallHypothesis { t: f64, lhs: f64, rhs: f64 },

    #[error("gronwall conclusion fails at t = {t}: z = {z} > gamma*y = {bound}")]
    GronwallConclusion { t: f64, z: f64, bound: f64 },

    #[error("point at distance {dist} is outside the projection reach r = {r}")]
    OutOfReach { dist: f64, r: f64 },

    #[error("parameter {0:?} outside the family domain")]
    ParamOutsideDomain(Vec<f64>),

    #[error("hausdorff distance cannot be bounded: {0}")]
    Hausdorff(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("jump gauge r* = {gauge} is not below r/M = {limit}")]
    JumpGauge { gauge: f64, limit: f64 },

    #[error("refinement is not Cauchy: {0}")]
    NonCauchy(String),

    #[error("interior parameters are not available for {0}")]
    NoInterior(String),
}
