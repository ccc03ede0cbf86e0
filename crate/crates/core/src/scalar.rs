//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for
//! `f32` and `f64`. Spectral routines need `rustfft` plans; those are exposed
//! through [`Real::fft_plan`] so that the `Signed` bound of `rustfft::FftNum`
//! never collides with `Float` method resolution in generic code.

use std::fmt::{Debug, Display};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::{FftDirection, FftPlanner};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// In-place FFT callable produced by [`Real::fft_plan`]. Unnormalized in both directions.
pub type FftPlan<T> = Arc<dyn Fn(&mut [Complex<T>]) + Send + Sync>;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for values not representable at all,
    /// which cannot happen for finite literals in `f32`/`f64`.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("count fits in a float")
    }

    /// Lossy widening to `f64` for reporting and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Builds an FFT of the given length. `inverse` selects the sign of the exponent.
    fn fft_plan(len: usize, inverse: bool) -> FftPlan<Self>;
}

macro_rules! impl_real {
    ($ty:ty) => {
        impl Real for $ty {
            fn fft_plan(len: usize, inverse: bool) -> FftPlan<Self> {
                let direction = if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                };
                let plan = FftPlanner::<$ty>::new().plan_fft(len, direction);
                Arc::new(move |buffer: &mut [Complex<$ty>]| plan.process(buffer))
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// `e^{iθ}` as a complex number.
#[inline]
pub fn unit<T: Real>(theta: T) -> Cx<T> {
    Cx::new(theta.cos(), theta.sin())
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::one())
}

/// Lifts a real scalar to the complex plane.
#[inline]
pub fn real<T: Real>(value: T) -> Cx<T> {
    Cx::new(value, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_round_trip_f32_and_f64() {
        fn round_trip<T: Real>() -> T {
            let n = 16;
            let forward = T::fft_plan(n, false);
            let inverse = T::fft_plan(n, true);
            let original: Vec<Cx<T>> = (0..n)
                .map(|k| Cx::new(T::from_count(k).sin(), T::zero()))
                .collect();
            let mut buffer = original.clone();
            forward(&mut buffer);
            inverse(&mut buffer);
            let scale = T::from_count(n);
            original
                .iter()
                .zip(&buffer)
                .map(|(a, b)| (*a - *b / scale).norm())
                .fold(T::zero(), T::max)
        }
        assert!(round_trip::<f64>() < 1e-14);
        assert!(round_trip::<f32>() < 1e-5);
    }

    #[test]
    fn unit_has_modulus_one() {
        let w = unit(0.7_f64);
        assert!((w.norm() - 1.0).abs() < 1e-15);
    }
}
