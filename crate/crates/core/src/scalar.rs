//! Scalar traits for the geometric and routing layers.
//!
//! Edge weights only need to be added and compared, so exact integer types
//! work as well as floats. Coordinates need a square root for the Euclidean
//! metric and uniform sampling for bin placement.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, Zero};
use rand::distributions::uniform::SampleUniform;

/// A path cost. Implemented for every ordered additive type with a zero.
pub trait Weight: Copy + PartialOrd + Zero + Sum + Debug + Display + Send + Sync + 'static {
    /// `false` for negative values and for NaN.
    fn is_valid_weight(self) -> bool {
        self >= Self::zero()
    }
}

impl<T> Weight for T where
    T: Copy + PartialOrd + Zero + Sum + Debug + Display + Send + Sync + 'static
{
}

/// A planar coordinate that is also usable as an edge weight.
pub trait Coord: Weight + Float + SampleUniform {
    fn from_f64(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 is representable")
    }
}

impl<T> Coord for T where T: Weight + Float + SampleUniform {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity() {
        assert!(0u32.is_valid_weight());
        assert!(2.5f64.is_valid_weight());
        assert!(!(-1i64).is_valid_weight());
        assert!(!f64::NAN.is_valid_weight());
        assert!(!(-0.5f32).is_valid_weight());
    }

    #[test]
    fn coord_from_f64() {
        assert_eq!(<f32 as Coord>::from_f64(0.5), 0.5f32);
    }
}
