//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All linear algebra is written once against [`Real`] and instantiated for
//! `f32` and `f64`. The per-type slack constants replace the fixed absolute
//! thresholds that would be meaningless at single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as the real part of matrix entries.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Default zero threshold for eigenvalues, PSD slack and trace tests.
    fn default_zero() -> Self;
    /// Largest entrywise asymmetry accepted when building a Hermitian matrix.
    fn hermitian_slack() -> Self;
    /// Frobenius slack for identities such as `sum K^dag K = I`.
    fn identity_slack() -> Self;
    /// Frobenius slack for `U^dag U = I`.
    fn unitary_slack() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Real for f64 {
    fn default_zero() -> Self {
        1e-9
    }
    fn hermitian_slack() -> Self {
        1e-12
    }
    fn identity_slack() -> Self {
        1e-8
    }
    fn unitary_slack() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn default_zero() -> Self {
        1e-4
    }
    fn hermitian_slack() -> Self {
        1e-5
    }
    fn identity_slack() -> Self {
        1e-4
    }
    fn unitary_slack() -> Self {
        1e-5
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
