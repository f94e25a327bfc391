use nalgebra::DVector;
use std::fmt::Debug;

/// Points of the state space `X = R^n` and of the parameter space `W`.
pub type Point = DVector<f64>;

/// Minimal inner-product-space surface needed by step functions and
/// Kurzweil sums. Implemented for scalars and for [`Point`].
pub trait Vector: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, a: f64) -> Self;
    fn dot(&self, other: &Self) -> f64;
    fn dim(&self) -> usize;
    /// Components in a fixed order; used for CSV output.
    fn components(&self) -> Vec<f64>;

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn dist(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }
}

impl Vector for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, a: f64) -> Self {
        self * a
    }
    fn dot(&self, other: &Self) -> f64 {
        self * other
    }
    fn dim(&self) -> usize {
        1
    }
    fn components(&self) -> Vec<f64> {
        vec![*self]
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Vector for DVector<f64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, a: f64) -> Self {
        self * a
    }
    fn dot(&self, other: &Self) -> f64 {
        DVector::dot(self, other)
    }
    fn dim(&self) -> usize {
        self.len()
    }
    fn components(&self) -> Vec<f64> {
        self.iter().copied().collect()
    }
    fn norm(&self) -> f64 {
        DVector::norm(self)
    }
}

/// Shorthand for building a [`Point`] from a slice.
pub fn point(xs: &[f64]) -> Point {
    DVector::from_column_slice(xs)
}
