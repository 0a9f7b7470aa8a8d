//! Brute-force concentration on explicitly constructed `k`-copy states.
//!
//! Independent of the combinatorial path: it never evaluates a binomial. The
//! `k`-fold tensor power is built with state-core, Alice's collective
//! Hamming-weight projectors are applied to the amplitude matrix, and the
//! post-measurement entropy comes from the Schmidt module.

use crate::error::{Error, Result};
use crate::locc::{apply_unitary, LocalOperation};
use crate::scalar::Real;
use crate::schmidt::{entropy_of_entanglement, schmidt_decompose};
use crate::state::{norm_sq, tensor_product, BipartiteState, Side};
use nalgebra::DMatrix;

/// `4^10` amplitudes is the state-core dimension cap.
pub const ORACLE_MAX_COPIES: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome<T> {
    /// Number of copies found in the smaller Schmidt term.
    pub m: u64,
    pub prob: T,
    pub block_entropy: T,
}

pub fn oracle_concentrate<T: Real>(state: &BipartiteState<T>, k: u32) -> Result<Vec<OracleOutcome<T>>> {
    if (state.dim_a(), state.dim_b()) != (2, 2) {
        return Err(Error::Shape("oracle needs a 2x2 input state".into()));
    }
    if k == 0 {
        return Err(Error::Validation("need at least one copy".into()));
    }
    if k > ORACLE_MAX_COPIES {
        return Err(Error::Capacity {
            what: "oracle copies",
            requested: k as u128,
            cap: ORACLE_MAX_COPIES as u128,
        });
    }

    // local unitaries bring the pair to √λ₀|00⟩ + √λ₁|11⟩ with λ₀ ≥ λ₁
    let form = schmidt_decompose(state)?;
    let ua = LocalOperation::unitary(Side::A, form.basis_a.adjoint())?;
    let ub = LocalOperation::unitary(Side::B, form.basis_b.adjoint())?;
    let single = apply_unitary(&apply_unitary(state, &ua)?, &ub)?;

    let mut joint = single.clone();
    for _ in 1..k {
        joint = tensor_product(&joint, &single)?;
    }

    let amps = joint.amps();
    let (rows, cols) = amps.shape();
    let mut out = Vec::new();
    for m in 0..=k {
        // rows of Alice's weight-m subspace; the zero rows the projector leaves
        // behind are dropped, which is a local isometry and keeps E unchanged
        let support: Vec<usize> = (0..rows).filter(|i| i.count_ones() == m).collect();
        let block = DMatrix::from_fn(support.len(), cols, |r, c| amps[(support[r], c)]);
        let prob = norm_sq(&block);
        if prob < T::lit(crate::locc::PRUNE_THRESHOLD) {
            continue;
        }
        let post = BipartiteState::normalized(block)?;
        out.push(OracleOutcome {
            m: m as u64,
            prob,
            block_entropy: entropy_of_entanglement(&post)?.ebits,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotic::{hamming_distribution, log2_binomial, TwoTermSource};
    use approx::assert_abs_diff_eq;

    #[test]
    fn singlet_two_copies() {
        let out = oracle_concentrate(&BipartiteState::<f64>::singlet(), 2).unwrap();
        let mid = out.iter().find(|o| o.m == 1).unwrap();
        assert_abs_diff_eq!(mid.prob, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.block_entropy, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn product_source_single_outcome() {
        let out = oracle_concentrate(&BipartiteState::<f64>::basis(2, 2, 1, 0).unwrap(), 3).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].m, 0);
        assert_abs_diff_eq!(out[0].prob, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[0].block_entropy, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn quarter_source_five_copies() {
        let s = BipartiteState::<f64>::from_schmidt_probabilities(&[0.75, 0.25]).unwrap();
        let out = oracle_concentrate(&s, 5).unwrap();
        let dist = hamming_distribution(&TwoTermSource::new(0.25).unwrap(), 5);
        assert_eq!(out.len(), 6);
        for o in &out {
            assert_abs_diff_eq!(o.prob, dist[o.m as usize].1, epsilon = 1e-9);
            assert_abs_diff_eq!(o.block_entropy, log2_binomial::<f64>(5, o.m), epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = BipartiteState::<f64>::singlet();
        assert!(matches!(oracle_concentrate(&s, 11), Err(Error::Capacity { .. })));
        let big = BipartiteState::<f64>::basis(3, 2, 0, 0).unwrap();
        assert!(matches!(oracle_concentrate(&big, 2), Err(Error::Shape(_))));
    }
}
