//! Candidate entanglement measures run against the axioms a pure-state
//! measure must satisfy: local-unitary invariance, LOCC monotonicity,
//! additivity over independent pairs, unit value on the singlet, and
//! agreement with the asymptotic concentration yield.
//!
//! Every candidate sees the same random inputs for a given [`RngSpec`], so
//! reports are comparable across candidates and reproducible byte for byte.

use crate::asymptotic::{concentrate_exact, TwoTermSource};
use crate::error::{Error, Result};
use crate::locc::{
    haar_unitary, monotonicity_check_with, random_protocol, run_protocol, LocalOperation, Protocol,
    ProtocolStep, StepFile,
};
use crate::rng::RngSpec;
use crate::scalar::Real;
use crate::schmidt::{entropy_of_entanglement, schmidt_decompose};
use crate::state::{random_state_from, tensor_product, BipartiteState, Side, StateFile};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Equality tolerance for invariance, additivity and unit checks.
pub const AXIOM_TOL: f64 = 1e-9;
/// Allowed `|c(ψ) − yield per copy|` in the asymptotic check.
pub const ASYMPTOTIC_TOL: f64 = 0.03;
pub const ASYMPTOTIC_COPIES: u64 = 1000;
/// Two-term sources probed by the asymptotic check, in order.
pub const ASYMPTOTIC_SOURCES: [f64; 2] = [0.25, 0.5];
pub const DEFAULT_SUITE_TRIALS: usize = 200;

const DIM_CHOICES: [usize; 3] = [2, 3, 4];
const MAX_DEPTH: usize = 4;
const STREAM_STRIDE: u64 = 1 << 32;

type EvalFn<T> = dyn Fn(&BipartiteState<T>) -> Result<T> + Send + Sync;

pub struct CandidateMeasure<T: Real> {
    pub name: String,
    pub eval: Box<EvalFn<T>>,
    /// Value the candidate assigns to the singlet.
    pub expected_unit: T,
}

impl<T: Real> CandidateMeasure<T> {
    pub fn new<F>(name: impl Into<String>, expected_unit: T, eval: F) -> Self
    where
        F: Fn(&BipartiteState<T>) -> Result<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            expected_unit,
        }
    }

    pub fn evaluate(&self, s: &BipartiteState<T>) -> Result<T> {
        (self.eval)(s)
    }
}

impl<T: Real> std::fmt::Debug for CandidateMeasure<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CandidateMeasure")
            .field("name", &self.name)
            .field("expected_unit", &self.expected_unit)
            .finish_non_exhaustive()
    }
}

fn entropy<T: Real>(s: &BipartiteState<T>) -> Result<T> {
    entropy_of_entanglement(s).map(|v| v.ebits)
}

/// `entropy`, `log_rank`, `linear_entropy`, `entropy_squared`, `exp_entropy`.
pub fn builtin_candidates<T: Real>() -> Vec<CandidateMeasure<T>> {
    vec![
        CandidateMeasure::new("entropy", T::one(), entropy),
        CandidateMeasure::new("log_rank", T::one(), |s| {
            Ok(T::lit(schmidt_decompose(s)?.rank as f64).log2())
        }),
        CandidateMeasure::new("linear_entropy", T::lit(0.5), |s| {
            let probs = schmidt_decompose(s)?.probabilities();
            Ok(T::one() - probs.iter().fold(T::zero(), |acc, &p| acc + p * p))
        }),
        CandidateMeasure::new("entropy_squared", T::one(), |s| entropy(s).map(|e| e * e)),
        CandidateMeasure::new("exp_entropy", T::one(), |s| {
            entropy(s).map(|e| T::lit(2.0).powf(e) - T::one())
        }),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    UnitaryInvariance,
    Monotonicity,
    Additivity,
    UnitNorm,
    Asymptotic,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::UnitaryInvariance,
        Axiom::Monotonicity,
        Axiom::Additivity,
        Axiom::UnitNorm,
        Axiom::Asymptotic,
    ];

    fn index(self) -> u64 {
        self as u64
    }
}

/// Inputs and observed values of a failed check. `observed` is what the
/// candidate produced, `expected` what the axiom demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub axiom: Axiom,
    pub trial: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngSpec>,
    pub state: StateFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<StateFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Vec<StepFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copies_k: Option<u64>,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub name: String,
    pub expected_unit: f64,
    pub passes_unitary_invariance: bool,
    pub passes_monotonicity: bool,
    pub passes_additivity: bool,
    pub passes_unit_norm: bool,
    pub passes_asymptotic: bool,
    /// First counterexample of each failed axiom, in axiom order.
    pub counterexamples: Vec<Counterexample>,
}

impl MeasureRecord {
    pub fn passes(&self, axiom: Axiom) -> bool {
        match axiom {
            Axiom::UnitaryInvariance => self.passes_unitary_invariance,
            Axiom::Monotonicity => self.passes_monotonicity,
            Axiom::Additivity => self.passes_additivity,
            Axiom::UnitNorm => self.passes_unit_norm,
            Axiom::Asymptotic => self.passes_asymptotic,
        }
    }

    pub fn passes_all(&self) -> bool {
        Axiom::ALL.iter().all(|&a| self.passes(a))
    }

    pub fn counterexample(&self, axiom: Axiom) -> Option<&Counterexample> {
        self.counterexamples.iter().find(|c| c.axiom == axiom)
    }
}

/// Serialized as a bare JSON array of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureReport {
    pub records: Vec<MeasureRecord>,
}

impl MeasureReport {
    pub fn all_pass(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| r.passes_all())
            .map(|r| r.name.as_str())
            .collect()
    }

    pub fn record(&self, name: &str) -> Option<&MeasureRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn stream_for(rng: RngSpec, axiom: Axiom, trial: usize) -> RngSpec {
    rng.stream(
        rng.stream_index
            .wrapping_add(axiom.index() * STREAM_STRIDE)
            .wrapping_add(trial as u64),
    )
}

fn random_dims<R: Rng + ?Sized>(rng: &mut R) -> (usize, usize) {
    (
        DIM_CHOICES[rng.gen_range(0..DIM_CHOICES.len())],
        DIM_CHOICES[rng.gen_range(0..DIM_CHOICES.len())],
    )
}

fn close<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(AXIOM_TOL)
}

fn local_unitaries<T: Real>(dims: (usize, usize), rng: &mut impl Rng) -> Result<Protocol<T>> {
    Ok(Protocol::new(vec![
        ProtocolStep::always(LocalOperation::unitary(Side::A, haar_unitary(dims.0, rng))?),
        ProtocolStep::always(LocalOperation::unitary(Side::B, haar_unitary(dims.1, rng))?),
    ]))
}

fn rotated<T: Real>(s: &BipartiteState<T>, u: &Protocol<T>) -> Result<BipartiteState<T>> {
    let mut e = run_protocol(s, u)?;
    Ok(e.branches.swap_remove(0).state)
}

/// `|c(ψ) − per_copy(k)|` on the two-term source with smaller weight `p`.
pub fn asymptotic_residual<T: Real>(c: &CandidateMeasure<T>, p: T, k: u64) -> Result<T> {
    let src = TwoTermSource::new(p)?;
    let target = concentrate_exact(&src, k)?.per_copy;
    Ok((c.evaluate(&src.state()?)? - target).abs())
}

fn check_unitary<T: Real>(c: &CandidateMeasure<T>, spec: RngSpec, trial: usize) -> Result<Option<Counterexample>> {
    let mut rng = spec.rng();
    let dims = random_dims(&mut rng);
    let s = random_state_from::<T, _>(dims.0, dims.1, &mut rng)?;
    let u = local_unitaries(dims, &mut rng)?;
    let before = c.evaluate(&s)?;
    let after = c.evaluate(&rotated(&s, &u)?)?;
    Ok((!close(before, after)).then(|| Counterexample {
        axiom: Axiom::UnitaryInvariance,
        trial,
        rng: Some(spec),
        state: s.to_file(),
        partner: None,
        protocol: Some(u.to_file()),
        p: None,
        copies_k: None,
        observed: after.as_f64(),
        expected: before.as_f64(),
    }))
}

fn check_monotone<T: Real>(c: &CandidateMeasure<T>, spec: RngSpec, trial: usize) -> Result<Option<Counterexample>> {
    let mut rng = spec.rng();
    let dims = random_dims(&mut rng);
    let depth = rng.gen_range(1..=MAX_DEPTH);
    let s = random_state_from::<T, _>(dims.0, dims.1, &mut rng)?;
    let protocol = random_protocol::<T>(dims, depth, spec.stream(spec.stream_index ^ (1 << 63)))?;
    let report = monotonicity_check_with(&s, &protocol, |x| c.evaluate(x))?;
    Ok((!report.satisfied).then(|| Counterexample {
        axiom: Axiom::Monotonicity,
        trial,
        rng: Some(spec),
        state: s.to_file(),
        partner: None,
        protocol: Some(protocol.to_file()),
        p: None,
        copies_k: None,
        observed: report.after_avg,
        expected: report.before,
    }))
}

fn check_additive<T: Real>(c: &CandidateMeasure<T>, spec: RngSpec, trial: usize) -> Result<Option<Counterexample>> {
    // the singlet pair is always probed first
    let (s1, s2, rng) = if trial == 0 {
        (BipartiteState::singlet(), BipartiteState::singlet(), None)
    } else {
        let mut rng = spec.rng();
        let d1 = random_dims(&mut rng);
        let d2 = random_dims(&mut rng);
        (
            random_state_from::<T, _>(d1.0, d1.1, &mut rng)?,
            random_state_from::<T, _>(d2.0, d2.1, &mut rng)?,
            Some(spec),
        )
    };
    let joint = c.evaluate(&tensor_product(&s1, &s2)?)?;
    let sum = c.evaluate(&s1)? + c.evaluate(&s2)?;
    Ok((!close(joint, sum)).then(|| Counterexample {
        axiom: Axiom::Additivity,
        trial,
        rng,
        state: s1.to_file(),
        partner: Some(s2.to_file()),
        protocol: None,
        p: None,
        copies_k: None,
        observed: joint.as_f64(),
        expected: sum.as_f64(),
    }))
}

fn check_unit<T: Real>(c: &CandidateMeasure<T>) -> Result<Option<Counterexample>> {
    let s = BipartiteState::singlet();
    let v = c.evaluate(&s)?;
    Ok((!close(v, T::one())).then(|| Counterexample {
        axiom: Axiom::UnitNorm,
        trial: 0,
        rng: None,
        state: s.to_file(),
        partner: None,
        protocol: None,
        p: None,
        copies_k: None,
        observed: v.as_f64(),
        expected: 1.0,
    }))
}

fn check_asymptotic<T: Real>(c: &CandidateMeasure<T>) -> Result<Option<Counterexample>> {
    for (trial, &p) in ASYMPTOTIC_SOURCES.iter().enumerate() {
        let src = TwoTermSource::new(T::lit(p))?;
        let s = src.state()?;
        let v = c.evaluate(&s)?;
        let target = concentrate_exact(&src, ASYMPTOTIC_COPIES)?.per_copy;
        if (v - target).abs() > T::lit(ASYMPTOTIC_TOL) {
            return Ok(Some(Counterexample {
                axiom: Axiom::Asymptotic,
                trial,
                rng: None,
                state: s.to_file(),
                partner: None,
                protocol: None,
                p: Some(p),
                copies_k: Some(ASYMPTOTIC_COPIES),
                observed: v.as_f64(),
                expected: target.as_f64(),
            }));
        }
    }
    Ok(None)
}

fn first_failure<T: Real>(
    c: &CandidateMeasure<T>,
    rng: RngSpec,
    axiom: Axiom,
    trials: usize,
) -> Result<Option<Counterexample>> {
    for t in 0..trials {
        let spec = stream_for(rng, axiom, t);
        let found = match axiom {
            Axiom::UnitaryInvariance => check_unitary(c, spec, t)?,
            Axiom::Monotonicity => check_monotone(c, spec, t)?,
            Axiom::Additivity => check_additive(c, spec, t)?,
            Axiom::UnitNorm => return check_unit(c),
            Axiom::Asymptotic => return check_asymptotic(c),
        };
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Runs all five checks; randomized ones use `trials` draws each.
pub fn axiom_suite<T: Real>(c: &CandidateMeasure<T>, rng: RngSpec, trials: usize) -> Result<MeasureRecord> {
    if trials == 0 {
        return Err(Error::Validation("axiom suite needs at least one trial".into()));
    }
    let mut failures = Vec::new();
    for axiom in Axiom::ALL {
        if let Some(cx) = first_failure(c, rng, axiom, trials)? {
            failures.push(cx);
        }
    }
    let fails = |a: Axiom| failures.iter().any(|c: &Counterexample| c.axiom == a);
    Ok(MeasureRecord {
        name: c.name.clone(),
        expected_unit: c.expected_unit.as_f64(),
        passes_unitary_invariance: !fails(Axiom::UnitaryInvariance),
        passes_monotonicity: !fails(Axiom::Monotonicity),
        passes_additivity: !fails(Axiom::Additivity),
        passes_unit_norm: !fails(Axiom::UnitNorm),
        passes_asymptotic: !fails(Axiom::Asymptotic),
        counterexamples: failures,
    })
}

/// Re-evaluates `c` on the inputs stored in `cx`; `true` if the violation
/// shows up again.
pub fn replay<T: Real>(c: &CandidateMeasure<T>, cx: &Counterexample) -> Result<bool> {
    let s: BipartiteState<T> = cx.state.clone().into_state()?;
    let protocol = || -> Result<Protocol<T>> {
        let steps = cx
            .protocol
            .clone()
            .ok_or_else(|| Error::Validation("counterexample lacks a protocol".into()))?;
        Protocol::from_file(steps)
    };
    Ok(match cx.axiom {
        Axiom::UnitaryInvariance => !close(c.evaluate(&s)?, c.evaluate(&rotated(&s, &protocol()?)?)?),
        Axiom::Monotonicity => !monotonicity_check_with(&s, &protocol()?, |x| c.evaluate(x))?.satisfied,
        Axiom::Additivity => {
            let s2: BipartiteState<T> = cx
                .partner
                .clone()
                .ok_or_else(|| Error::Validation("counterexample lacks a partner state".into()))?
                .into_state()?;
            let joint = c.evaluate(&tensor_product(&s, &s2)?)?;
            !close(joint, c.evaluate(&s)? + c.evaluate(&s2)?)
        }
        Axiom::UnitNorm => !close(c.evaluate(&s)?, T::one()),
        Axiom::Asymptotic => {
            let p = cx.p.ok_or_else(|| Error::Validation("counterexample lacks p".into()))?;
            let k = cx.copies_k.unwrap_or(ASYMPTOTIC_COPIES);
            let src = TwoTermSource::new(T::lit(p))?;
            let target = concentrate_exact(&src, k)?.per_copy;
            (c.evaluate(&s)? - target).abs() > T::lit(ASYMPTOTIC_TOL)
        }
    })
}

/// Suite over the builtins followed by `extra`. Fails with a consistency
/// error unless `entropy` is the only builtin passing every axiom.
pub fn uniqueness_report<T: Real>(
    rng: RngSpec,
    trials: usize,
    extra: Vec<CandidateMeasure<T>>,
) -> Result<MeasureReport> {
    let builtins = builtin_candidates::<T>();
    let n_builtin = builtins.len();
    let mut records = Vec::with_capacity(n_builtin + extra.len());
    for c in builtins.iter().chain(extra.iter()) {
        records.push(axiom_suite(c, rng, trials)?);
    }
    let passing: Vec<&str> = records[..n_builtin]
        .iter()
        .filter(|r| r.passes_all())
        .map(|r| r.name.as_str())
        .collect();
    if passing != ["entropy"] {
        return Err(Error::Consistency(format!(
            "expected only `entropy` to pass every axiom among builtins, got {passing:?}"
        )));
    }
    Ok(MeasureReport { records })
}
