//! Local operations and classical communication on bipartite pure states.
//!
//! Alice and Bob act only on their own index of the coefficient matrix:
//! unitaries and Kraus measurements on one side, with later steps of a
//! [`Protocol`] conditioned on earlier measurement outcomes. Measurements
//! split a state into an [`Ensemble`] of branches, and the averaged
//! entanglement of that ensemble can be compared with the input
//! ([`monotonicity_check`]).

mod operation;
mod protocol;
mod random;
mod sweep;

pub use operation::{LocalOperation, OperationKind};
pub use protocol::{run_protocol, Protocol, ProtocolStep, StepFile};
pub use random::{haar_unitary, random_kraus_pair, random_protocol};
pub use sweep::{monotonicity_sweep, SweepConfig, SweepSummary, Violation};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schmidt::entropy_of_entanglement;
use crate::state::BipartiteState;
use operation::act;
use serde::Serialize;

/// Outcomes rarer than this are discarded and the remaining mass renormalized.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Slack allowed in the averaged monotonicity inequality.
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// Outcome labels in the order the measurements were performed.
pub type Transcript = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T: Real> {
    pub prob: T,
    pub state: BipartiteState<T>,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T: Real> {
    pub branches: Vec<Branch<T>>,
}

impl<T: Real> Ensemble<T> {
    pub fn pure(state: BipartiteState<T>) -> Self {
        Self {
            branches: vec![Branch {
                prob: T::one(),
                state,
                transcript: Vec::new(),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_probability(&self) -> T {
        self.branches.iter().fold(T::zero(), |acc, b| acc + b.prob)
    }

    /// `Σ pᵢ f(Φᵢ)` for an arbitrary state function.
    pub fn average<F>(&self, mut f: F) -> Result<T>
    where
        F: FnMut(&BipartiteState<T>) -> Result<T>,
    {
        let mut acc = T::zero();
        for b in &self.branches {
            acc += b.prob * f(&b.state)?;
        }
        Ok(acc)
    }

    pub(crate) fn renormalize(&mut self) -> Result<()> {
        let total = self.total_probability();
        if !(total > T::zero()) {
            return Err(Error::Computation("every branch was pruned".into()));
        }
        for b in &mut self.branches {
            b.prob /= total;
        }
        Ok(())
    }
}

pub fn apply_unitary<T: Real>(
    s: &BipartiteState<T>,
    op: &LocalOperation<T>,
) -> Result<BipartiteState<T>> {
    let OperationKind::Unitary(u) = op.kind() else {
        return Err(Error::Validation("apply_unitary given a measurement".into()));
    };
    op.check_fits(s)?;
    BipartiteState::normalized(act(op.side(), u, s.amps()))
}

pub fn apply_measurement<T: Real>(
    s: &BipartiteState<T>,
    op: &LocalOperation<T>,
) -> Result<Ensemble<T>> {
    let OperationKind::Measurement(kraus) = op.kind() else {
        return Err(Error::Validation("apply_measurement given a unitary".into()));
    };
    op.check_fits(s)?;
    let mut out = Ensemble { branches: Vec::new() };
    for (label, k) in kraus.iter().enumerate() {
        let post = act(op.side(), k, s.amps());
        let prob = crate::state::norm_sq(&post);
        if prob < T::lit(PRUNE_THRESHOLD) {
            continue;
        }
        out.branches.push(Branch {
            prob,
            state: BipartiteState::normalized(post)?,
            transcript: vec![label],
        });
    }
    out.renormalize()?;
    Ok(out)
}

/// `Σ pᵢ E(Φᵢ)` with `E` the entropy of entanglement.
pub fn average_entanglement<T: Real>(e: &Ensemble<T>) -> Result<T> {
    e.average(|s| entropy_of_entanglement(s).map(|v| v.ebits))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchValue {
    pub prob: f64,
    pub value: f64,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub before: f64,
    pub after_avg: f64,
    pub satisfied: bool,
    /// `before − after_avg`.
    pub slack: f64,
    pub branches: Vec<BranchValue>,
}

pub fn monotonicity_check<T: Real>(
    s: &BipartiteState<T>,
    p: &Protocol<T>,
) -> Result<MonotonicityReport> {
    monotonicity_check_with(s, p, |x| entropy_of_entanglement(x).map(|v| v.ebits))
}

/// Monotonicity of an arbitrary state function under `p`.
pub fn monotonicity_check_with<T, F>(
    s: &BipartiteState<T>,
    p: &Protocol<T>,
    mut measure: F,
) -> Result<MonotonicityReport>
where
    T: Real,
    F: FnMut(&BipartiteState<T>) -> Result<T>,
{
    let before = measure(s)?.as_f64();
    let ensemble = run_protocol(s, p)?;
    let mut branches = Vec::with_capacity(ensemble.len());
    let mut after = 0.0;
    for b in &ensemble.branches {
        let value = measure(&b.state)?.as_f64();
        let prob = b.prob.as_f64();
        after += prob * value;
        branches.push(BranchValue {
            prob,
            value,
            transcript: b.transcript.clone(),
        });
    }
    Ok(MonotonicityReport {
        before,
        after_avg: after,
        satisfied: after <= before + MONOTONICITY_TOL,
        slack: before - after,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;
    use crate::schmidt::schmidt_decompose;
    use crate::state::{random_state, Side};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Complex, DMatrix};

    type S = BipartiteState<f64>;
    type M = DMatrix<Complex<f64>>;

    fn real(rows: usize, data: &[f64]) -> M {
        M::from_row_slice(rows, data.len() / rows, &data.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>())
    }

    fn procrustean() -> LocalOperation<f64> {
        let k0 = real(2, &[(1.0f64 / 3.0).sqrt(), 0.0, 0.0, 1.0]);
        let k1 = real(2, &[(2.0f64 / 3.0).sqrt(), 0.0, 0.0, 0.0]);
        LocalOperation::measurement(Side::A, vec![k0, k1]).unwrap()
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = random_state::<f64>(2, 3, RngSpec::new(2)).unwrap();
        let id = LocalOperation::unitary(Side::A, M::identity(2, 2)).unwrap();
        assert_abs_diff_eq!((apply_unitary(&s, &id).unwrap().amps() - s.amps()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_x_relabels_basis() {
        let x = LocalOperation::unitary(Side::A, real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let out = apply_unitary(&S::basis(2, 2, 0, 0).unwrap(), &x).unwrap();
        assert_eq!(out, S::basis(2, 2, 1, 0).unwrap());
        // on Bob's side the matrix acts on the column index
        let out = apply_unitary(&S::basis(2, 2, 0, 0).unwrap(), &LocalOperation::unitary(Side::B, real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap()).unwrap();
        assert_eq!(out, S::basis(2, 2, 0, 1).unwrap());
    }

    #[test]
    fn local_unitary_keeps_singlet_entropy() {
        let u = haar_unitary::<f64, _>(2, &mut RngSpec::new(4).rng());
        let op = LocalOperation::unitary(Side::B, u).unwrap();
        let out = apply_unitary(&S::singlet(), &op).unwrap();
        assert_abs_diff_eq!(entropy_of_entanglement(&out).unwrap().ebits, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_invalid_operations() {
        assert!(matches!(
            LocalOperation::unitary(Side::A, real(2, &[1.0, 1.0, 0.0, 1.0])),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            LocalOperation::measurement(Side::A, vec![real(2, &[1.0, 0.0, 0.0, 0.0])]),
            Err(Error::Validation(_))
        ));
        let op = LocalOperation::<f64>::computational_measurement(Side::B, 3).unwrap();
        assert!(matches!(apply_measurement(&S::singlet(), &op), Err(Error::Shape(_))));
        let u = LocalOperation::unitary(Side::A, M::identity(2, 2)).unwrap();
        assert!(apply_measurement(&S::singlet(), &u).is_err());
    }

    #[test]
    fn computational_measurement_collapses_singlet() {
        let op = LocalOperation::computational_measurement(Side::A, 2).unwrap();
        let e = apply_measurement(&S::singlet(), &op).unwrap();
        assert_eq!(e.len(), 2);
        for b in &e.branches {
            assert_abs_diff_eq!(b.prob, 0.5, epsilon = 1e-15);
            assert_eq!(schmidt_decompose(&b.state).unwrap().rank, 1);
        }
        assert_abs_diff_eq!(average_entanglement(&e).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_povm_returns_input() {
        let s = random_state::<f64>(2, 2, RngSpec::new(3)).unwrap();
        let op = LocalOperation::measurement(Side::A, vec![M::identity(2, 2)]).unwrap();
        let e = apply_measurement(&s, &op).unwrap();
        assert_eq!(e.len(), 1);
        assert_abs_diff_eq!(e.branches[0].prob, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((e.branches[0].state.amps() - s.amps()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn procrustean_filter_branches() {
        let s = S::from_schmidt_probabilities(&[0.75, 0.25]).unwrap();
        let e = apply_measurement(&s, &procrustean()).unwrap();
        assert_eq!(e.len(), 2);
        assert_abs_diff_eq!(e.branches[0].prob, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(e.branches[1].prob, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(entropy_of_entanglement(&e.branches[0].state).unwrap().ebits, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_of_entanglement(&e.branches[1].state).unwrap().ebits, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(average_entanglement(&e).unwrap(), 0.5, epsilon = 1e-12);

        let report = monotonicity_check(&s, &Protocol::new(vec![ProtocolStep::always(procrustean())])).unwrap();
        assert_abs_diff_eq!(report.before, 0.8112781244591328, epsilon = 1e-12);
        assert_abs_diff_eq!(report.after_avg, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.slack, 0.3112781244591328, epsilon = 1e-12);
        assert!(report.satisfied);
    }

    #[test]
    fn zero_probability_outcomes_are_pruned() {
        let op = LocalOperation::computational_measurement(Side::A, 2).unwrap();
        let e = apply_measurement(&S::basis(2, 2, 1, 0).unwrap(), &op).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.branches[0].transcript, vec![1]);
        assert_eq!(e.branches[0].prob, 1.0);
    }

    #[test]
    fn ensemble_averages() {
        assert_abs_diff_eq!(average_entanglement(&Ensemble::pure(S::singlet())).unwrap(), 1.0, epsilon = 1e-12);
        let e = Ensemble {
            branches: vec![
                Branch { prob: 0.3, state: S::basis(2, 2, 0, 0).unwrap(), transcript: vec![0] },
                Branch { prob: 0.7, state: S::basis(2, 2, 1, 1).unwrap(), transcript: vec![1] },
            ],
        };
        assert_eq!(average_entanglement(&e).unwrap(), 0.0);
    }

    #[test]
    fn unitary_only_protocol_has_no_slack() {
        let s = random_state::<f64>(3, 3, RngSpec::new(9)).unwrap();
        let mut rng = RngSpec::new(10).rng();
        let steps = vec![
            ProtocolStep::always(LocalOperation::unitary(Side::A, haar_unitary(3, &mut rng)).unwrap()),
            ProtocolStep::always(LocalOperation::unitary(Side::B, haar_unitary(3, &mut rng)).unwrap()),
        ];
        let r = monotonicity_check(&s, &Protocol::new(steps)).unwrap();
        assert!(r.slack.abs() <= 1e-10);
        assert!(r.satisfied);
    }
}
