//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating point type the simulator can run on: `f32` or `f64`.
///
/// Besides the arithmetic bounds, each implementation fixes the numerical
/// thresholds used for invariant checks. The `f64` values are the ones the
/// protocols are validated against; `f32` uses proportionally looser ones.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Tolerance for structural invariants: Hermiticity, unit trace,
    /// normalization, unitarity, projector algebra.
    fn invariant_tol() -> Self;

    /// Probabilities at or below this value are treated as exactly zero.
    fn null_prob_tol() -> Self;

    /// Cutoff deciding whether a Schmidt coefficient or eigenvalue counts
    /// towards a numerical rank.
    fn rank_tol() -> Self;

    /// Convergence threshold for the iterative eigen and singular value solvers.
    fn solver_eps() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real always converts to f64")
    }
}

impl Real for f64 {
    fn invariant_tol() -> Self {
        1e-9
    }
    fn null_prob_tol() -> Self {
        1e-12
    }
    fn rank_tol() -> Self {
        1e-9
    }
    fn solver_eps() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn invariant_tol() -> Self {
        1e-4
    }
    fn null_prob_tol() -> Self {
        1e-6
    }
    fn rank_tol() -> Self {
        1e-3
    }
    fn solver_eps() -> Self {
        f32::EPSILON
    }
}

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}
