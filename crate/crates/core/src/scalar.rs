//! Scalar abstractions for the analytic side of the crate.
//!
//! Closed-form expectations and event probabilities are rational numbers, so
//! they are written once against [`Scalar`] and evaluated in `f32`, `f64` or
//! exactly in a rational type. Anything involving `exp`/`ln` needs [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Float, Num};

pub trait Scalar: Num + Clone + PartialOrd + Debug {
    fn from_count(count: u64) -> Self;
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_count(count: u64) -> Self {
                count as $t
            }
        }
    )*};
}

float_scalar!(f32, f64);

impl Scalar for Ratio<i64> {
    fn from_count(count: u64) -> Self {
        Ratio::from_integer(i64::try_from(count).expect("count fits in i64"))
    }
}

impl Scalar for Ratio<i128> {
    fn from_count(count: u64) -> Self {
        Ratio::from_integer(i128::from(count))
    }
}

impl Scalar for Ratio<BigInt> {
    fn from_count(count: u64) -> Self {
        Ratio::from_integer(BigInt::from(count))
    }
}

/// Floating point scalars: `f32` or `f64`.
pub trait Real: Scalar + Float + Default + Send + Sync {
    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// `floor(x)`, except that values within a few ulps of an integer snap to it.
pub fn snapped_floor<F: Real>(x: F) -> F {
    let nearest = x.round();
    if near(x, nearest) {
        nearest
    } else {
        x.floor()
    }
}

/// `ceil(x)`, except that values within a few ulps of an integer snap to it.
pub fn snapped_ceil<F: Real>(x: F) -> F {
    let nearest = x.round();
    if near(x, nearest) {
        nearest
    } else {
        x.ceil()
    }
}

fn near<F: Real>(x: F, target: F) -> bool {
    let scale = x.abs().max(F::one());
    (x - target).abs() <= F::epsilon() * F::from_count(8) * scale
}
