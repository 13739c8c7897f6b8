//! Scalar abstraction shared by the linear-algebra layers.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use num_complex::Complex;

/// Real field usable as the base scalar of kernel operators and symbols.
///
/// Implemented for `f32` and `f64`. Complex entries are `Complex<R>`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("representable literal")
    }

    /// Converts to `f64`, mapping failures to NaN.
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Complex number with the given real part and zero imaginary part.
    fn cx(self) -> Complex<Self> {
        Complex::new(self, Self::zero())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts a double-precision complex value into `Complex<R>`.
pub fn cast_cx<R: Real>(z: Complex<f64>) -> Complex<R> {
    Complex::new(R::lit(z.re), R::lit(z.im))
}

/// Converts a `Complex<R>` into double precision.
pub fn widen_cx<R: Real>(z: Complex<R>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}
