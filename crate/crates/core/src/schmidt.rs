//! Schmidt decomposition and the entropy of entanglement.
//!
//! The Schmidt coefficients of `|ψ⟩` are the singular values of its coefficient
//! matrix. The entropy of entanglement is the Shannon entropy (base 2) of their
//! squares, which coincides with the von Neumann entropy of either reduced
//! state; both routes are exposed so they can be checked against each other.

use crate::error::{Error, Result};
use crate::scalar::{real, Amplitude, Real};
use crate::state::{hermitian_eigenvalues, BipartiteState, DensityOperator};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt;

/// Probabilities may dip this far below zero before being rejected.
pub const PROB_NEGATIVE_TOL: f64 = 1e-12;
/// Allowed deviation of `Σ p` from one in [`shannon_entropy`].
pub const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SchmidtForm<T: Real> {
    /// Descending, length `min(dim_a, dim_b)`.
    pub coeffs: Vec<T>,
    /// Unitary `dim_a × dim_a`; its first `coeffs.len()` columns pair with `coeffs`.
    pub basis_a: DMatrix<Amplitude<T>>,
    /// Unitary `dim_b × dim_b`, laid out like `basis_a`.
    pub basis_b: DMatrix<Amplitude<T>>,
    pub rank: usize,
}

impl<T: Real> SchmidtForm<T> {
    /// Squared coefficients.
    pub fn probabilities(&self) -> Vec<T> {
        self.coeffs.iter().map(|&x| x * x).collect()
    }

    /// `basis_a · diag(coeffs) · basis_bᵀ`, restricted to the paired columns.
    pub fn reconstruct(&self) -> DMatrix<Amplitude<T>> {
        let r = self.coeffs.len();
        let ua = self.basis_a.columns(0, r);
        let ub = self.basis_b.columns(0, r);
        let sigma = DMatrix::from_diagonal(&DVector::from_iterator(
            r,
            self.coeffs.iter().map(|&x| real(x)),
        ));
        ua * sigma * ub.transpose()
    }
}

/// Entanglement in ebits (one singlet = 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct EntanglementValue<T> {
    pub ebits: T,
}

impl<T: Real> EntanglementValue<T> {
    pub fn value(self) -> T {
        self.ebits
    }
}

impl<T: Real> fmt::Display for EntanglementValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.ebits.as_f64())
    }
}

pub fn schmidt_decompose<T: Real>(s: &BipartiteState<T>) -> Result<SchmidtForm<T>> {
    schmidt_decompose_with(s, T::lit(T::RANK_TOL))
}

pub fn schmidt_decompose_with<T: Real>(
    s: &BipartiteState<T>,
    rank_tol: T,
) -> Result<SchmidtForm<T>> {
    let (da, db) = (s.dim_a(), s.dim_b());
    let r = da.min(db);
    let svd = crate::linalg::svd(s.amps())?;
    let sv = &svd.s;

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).expect("finite"));

    let coeffs: Vec<T> = order.iter().map(|&i| sv[i]).collect();
    // zero singular values leave zero columns in U; those get completed below
    let live: Vec<usize> = order.iter().copied().filter(|&i| sv[i] > T::zero()).collect();
    let ua = DMatrix::from_fn(da, live.len(), |row, k| svd.u[(row, live[k])]);
    let ub = DMatrix::from_fn(db, live.len(), |row, k| svd.v[(row, live[k])].conj());
    let rank = coeffs.iter().filter(|&&x| x > rank_tol).count();

    Ok(SchmidtForm {
        coeffs,
        basis_a: complete_unitary(ua),
        basis_b: complete_unitary(ub),
        rank,
    })
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt on the standard basis.
pub(crate) fn complete_unitary<T: Real>(q: DMatrix<Amplitude<T>>) -> DMatrix<Amplitude<T>> {
    let d = q.nrows();
    let mut cols: Vec<DVector<Amplitude<T>>> = q.column_iter().map(|c| c.into_owned()).collect();
    let residual = |cols: &[DVector<Amplitude<T>>], k: usize| {
        let mut v = DVector::<Amplitude<T>>::zeros(d);
        v[k] = real(T::one());
        for _ in 0..2 {
            for c in cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let n = v.norm();
        (n, v)
    };
    // one pass accepting any well-conditioned candidate, then best-of for the rest
    let accept = T::lit(0.5) / T::lit(d as f64).sqrt();
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let (n, v) = residual(&cols, k);
        if n > accept {
            cols.push(v.unscale(n));
        }
    }
    while cols.len() < d {
        let (n, v) = (0..d)
            .map(|k| residual(&cols, k))
            .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"))
            .expect("d > 0");
        cols.push(v.unscale(n));
    }
    DMatrix::from_columns(&cols)
}

/// Schmidt coefficients alone, descending; cheaper than the full decomposition.
pub fn schmidt_coefficients<T: Real>(s: &BipartiteState<T>) -> Result<Vec<T>> {
    let mut sv = crate::linalg::singular_values(s.amps())?;
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(sv)
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_entropy<T: Real>(probs: &[T]) -> Result<T> {
    let neg = T::lit(PROB_NEGATIVE_TOL);
    let sum_tol = T::lit(PROB_SUM_TOL).max(T::lit(T::NORM_TOL));
    let mut sum = T::zero();
    for &p in probs {
        if !p.is_finite() || p < -neg {
            return Err(Error::Validation(format!("invalid probability {p}")));
        }
        sum += p;
    }
    if (sum - T::one()).abs() > sum_tol {
        return Err(Error::Validation(format!("probabilities sum to {sum}")));
    }
    Ok(entropy_bits(probs.iter().map(|&p| p.max(T::zero()).min(T::one()))))
}

pub(crate) fn entropy_bits<T: Real>(probs: impl Iterator<Item = T>) -> T {
    let h = probs
        .filter(|&p| p > T::zero())
        .fold(T::zero(), |acc, p| acc - p * p.log2());
    h.max(T::zero())
}

/// Binary entropy `H(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_bits([p, T::one() - p].into_iter())
}

pub fn entropy_of_entanglement<T: Real>(s: &BipartiteState<T>) -> Result<EntanglementValue<T>> {
    let probs: Vec<T> = schmidt_coefficients(s)?.into_iter().map(|c| c * c).collect();
    Ok(EntanglementValue {
        ebits: shannon_entropy(&probs)?,
    })
}

/// `−Tr ρ log₂ ρ`; eigenvalues in `[−clamp, 0)` count as zero.
pub fn vn_entropy<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    let clamp = T::lit(T::EIG_CLAMP);
    let eig = hermitian_eigenvalues(rho.matrix())?;
    if let Some(&min) = eig.last() {
        if min < -clamp {
            return Err(Error::Validation(format!(
                "eigenvalue {min} is below the clamp window"
            )));
        }
    }
    Ok(entropy_bits(eig.into_iter().map(|l| l.max(T::zero()))))
}
