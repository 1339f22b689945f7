//! Scalar abstraction shared by the numerical kernels.
//!
//! Floating-point code is written against [`Real`] so the same kernels run in
//! `f32` and `f64`. Incidence weights are exact rationals ([`Weight`]) and can
//! be materialized into any [`IncidenceScalar`], including exact big rationals
//! used for rank cross-checks.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive, Zero};

/// Exact hyperedge weight, e.g. `(n-1)/n`.
pub type Weight = Ratio<i64>;

/// Arbitrary-precision rational used for exact rank computations.
pub type Exact = Ratio<BigInt>;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + IncidenceScalar
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Anything an incidence matrix can be materialized into.
pub trait IncidenceScalar: Clone + Zero + Debug {
    fn from_weight(w: Weight) -> Self;
}

impl IncidenceScalar for f64 {
    fn from_weight(w: Weight) -> Self {
        *w.numer() as f64 / *w.denom() as f64
    }
}

impl IncidenceScalar for f32 {
    fn from_weight(w: Weight) -> Self {
        (*w.numer() as f64 / *w.denom() as f64) as f32
    }
}

impl IncidenceScalar for Weight {
    fn from_weight(w: Weight) -> Self {
        w
    }
}

impl IncidenceScalar for Exact {
    fn from_weight(w: Weight) -> Self {
        Ratio::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_materialization() {
        let w = Weight::new(-1, 4);
        assert_eq!(f64::from_weight(w), -0.25);
        assert_eq!(f32::from_weight(w), -0.25);
        assert_eq!(Exact::from_weight(w), Ratio::new(BigInt::from(-1), BigInt::from(4)));
    }
}
