//! One-sided Jacobi SVD for complex matrices.
//!
//! nalgebra's bidiagonal SVD occasionally returns wrong singular values for
//! rank-deficient complex input (the squared values no longer sum to the
//! Frobenius norm), so Schmidt analysis uses this instead. Jacobi rotations
//! also give small singular values to high relative accuracy, which the rank
//! count depends on.

use crate::error::{Error, Result};
use crate::scalar::{Amplitude, Real};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 80;

pub(crate) struct Svd<T: Real> {
    /// `rows × r`, orthonormal columns where the singular value is nonzero
    /// and zero columns elsewhere.
    pub u: DMatrix<Amplitude<T>>,
    /// Unordered, `r = min(rows, cols)` entries.
    pub s: Vec<T>,
    /// `cols × r` with orthonormal columns; `M = U diag(s) V†`.
    pub v: DMatrix<Amplitude<T>>,
}

pub(crate) fn svd<T: Real>(m: &DMatrix<Amplitude<T>>) -> Result<Svd<T>> {
    if m.nrows() >= m.ncols() {
        tall_svd(m.clone(), true)
    } else {
        let t = tall_svd(m.adjoint(), true)?;
        Ok(Svd { u: t.v, s: t.s, v: t.u })
    }
}

/// Singular values only, unordered.
pub(crate) fn singular_values<T: Real>(m: &DMatrix<Amplitude<T>>) -> Result<Vec<T>> {
    let tall = if m.nrows() >= m.ncols() { m.clone() } else { m.adjoint() };
    Ok(tall_svd(tall, false)?.s)
}

fn column_dot<T: Real>(a: &DMatrix<Amplitude<T>>, p: usize, q: usize) -> Amplitude<T> {
    a.column(p).dotc(&a.column(q))
}

fn column_norm_sq<T: Real>(a: &DMatrix<Amplitude<T>>, p: usize) -> T {
    a.column(p).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Rephases column `q` by `ē`, then applies the real rotation `(c, s)` to the pair.
fn rotate<T: Real>(x: &mut DMatrix<Amplitude<T>>, p: usize, q: usize, c: T, s: T, phase: Amplitude<T>) {
    for i in 0..x.nrows() {
        let xp = x[(i, p)];
        let xq = x[(i, q)] * phase.conj();
        x[(i, p)] = xp.scale(c) - xq.scale(s);
        x[(i, q)] = xp.scale(s) + xq.scale(c);
    }
}

fn tall_svd<T: Real>(mut a: DMatrix<Amplitude<T>>, vectors: bool) -> Result<Svd<T>> {
    let n = a.ncols();
    // pairs count as orthogonal below this cosine; roundoff alone keeps the
    // cosine near eps, so a little headroom is needed for sweeps to stop
    let eps = T::default_epsilon() * T::lit(4.0 * (a.nrows() as f64).sqrt());
    let mut v = if vectors {
        DMatrix::<Amplitude<T>>::identity(n, n)
    } else {
        DMatrix::<Amplitude<T>>::zeros(0, n)
    };
    // Gram entries below this are roundoff; chasing them can cycle forever
    let floor = T::default_epsilon() * T::default_epsilon() * (0..n).fold(T::zero(), |acc, j| acc + column_norm_sq(&a, j));
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = column_norm_sq(&a, p);
                let beta = column_norm_sq(&a, q);
                let gamma = column_dot(&a, p, q);
                let g = gamma.norm_sqr().sqrt();
                if g <= floor || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
    }
    if !converged {
        return Err(Error::Computation("Jacobi SVD did not converge".into()));
    }
    let mut s = Vec::with_capacity(n);
    for j in 0..n {
        let sigma = column_norm_sq(&a, j).sqrt();
        if !sigma.is_finite() {
            return Err(Error::Computation("non-finite singular value".into()));
        }
        if sigma > T::zero() {
            let inv = T::one() / sigma;
            for z in a.column_mut(j).iter_mut() {
                *z = z.scale(inv);
            }
        }
        s.push(sigma);
    }
    Ok(Svd { u: a, s, v })
}
