//! Scalar abstractions shared by the dense kernels.
//!
//! [`Scalar`] is the field the elimination routines run over: `f32`, `f64`,
//! their complex counterparts and exact big rationals. [`Real`] adds the
//! floating-point operations needed by the spectral and least-squares code.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field element usable by the dense linear solver.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Num + std::ops::Neg<Output = Self> {
    /// Exact arithmetic: a pivot is usable iff it is non-zero.
    const EXACT: bool;

    /// Magnitude used for pivot selection and conditioning checks.
    fn magnitude(&self) -> f64;

    fn from_f64_lossy(v: f64) -> Self;
}

/// Real floating-point scalar (`f32` or `f64`).
pub trait Real: Scalar + Float + FromPrimitive + fmt::Display + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("literal representable")
    }

    /// `tol`, floored at a small multiple of machine epsilon so that `f32`
    /// callers get a meaningful threshold.
    fn tolerance(tol: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(tol).max(floor)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }

            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl<T: Real> Scalar for Complex<T> {
    const EXACT: bool = false;

    fn magnitude(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Complex::new(T::lit(v), T::zero())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // Non-zero rationals never report zero magnitude.
            self.abs().to_f64().unwrap_or(f64::MAX).max(f64::MIN_POSITIVE)
        }
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
}
