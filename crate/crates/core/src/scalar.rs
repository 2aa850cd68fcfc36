// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Numeric trait bounds shared by every generic module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the simulator is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; constants and sampled values go through here.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }

    /// Bytes in the little-endian encoding used by checkpoints.
    fn to_le_f64_bytes(self) -> [u8; 8] {
        self.as_f64().to_le_bytes()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex amplitude over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Scalar>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}
