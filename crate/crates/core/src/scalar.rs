//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All state, Schmidt, LOCC and combinatorial code is written against [`Real`],
//! so the same algorithms run in `f64` (the default, see the aliases at the
//! crate root) or `f32`. Tolerances scale with the precision of the scalar.

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;
use std::fmt::{Debug, Display};

/// Complex amplitude over a real scalar `T`.
pub type Amplitude<T> = Complex<T>;

/// Real floating point scalar: `f32` or `f64`.
pub trait Real: RealField + Copy + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Normalization tolerance for states (`|‖ψ‖² − 1|`).
    const NORM_TOL: f64;
    /// Tolerance for equality-style checks (unitarity, completeness, hermiticity).
    const EQ_TOL: f64;
    /// Singular values at or below this count as zero when computing Schmidt rank.
    const RANK_TOL: f64;
    /// Negative eigenvalues in `[-EIG_CLAMP, 0)` are treated as numerical noise.
    const EIG_CLAMP: f64;

    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const NORM_TOL: f64 = 1e-12;
    const EQ_TOL: f64 = 1e-10;
    const RANK_TOL: f64 = 1e-10;
    const EIG_CLAMP: f64 = 1e-10;

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    const NORM_TOL: f64 = 1e-5;
    const EQ_TOL: f64 = 1e-4;
    const RANK_TOL: f64 = 1e-4;
    const EIG_CLAMP: f64 = 1e-4;

    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
}

/// Tunable tolerances. `Default` uses the per-scalar constants of [`Real`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub norm: T,
    pub equality: T,
    pub rank: T,
    pub eig_clamp: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            norm: T::lit(T::NORM_TOL),
            equality: T::lit(T::EQ_TOL),
            rank: T::lit(T::RANK_TOL),
            eig_clamp: T::lit(T::EIG_CLAMP),
        }
    }
}

#[inline]
pub(crate) fn real<T: Real>(x: T) -> Amplitude<T> {
    Complex::new(x, T::zero())
}

/// Largest entry modulus.
pub(crate) fn max_modulus<T: Real>(m: &nalgebra::DMatrix<Amplitude<T>>) -> T {
    m.iter()
        .map(|z| z.norm_sqr().sqrt())
        .fold(T::zero(), |a, b| a.max(b))
}
