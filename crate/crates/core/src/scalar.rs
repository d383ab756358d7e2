//! Floating-point scalar abstraction for the numeric layers.
//!
//! Exact work (fields, character sums, certificates) never touches this
//! trait. The walk simulator, the idempotent builder and the evaluation of
//! cyclotomic sums are generic over it so the same code runs in `f32` and
//! `f64`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Machine epsilon, used to scale tolerances for the narrower type.
    const EPS: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts")
    }
}

impl Scalar for f32 {
    const EPS: f64 = f32::EPSILON as f64;
}

impl Scalar for f64 {
    const EPS: f64 = f64::EPSILON;
}
