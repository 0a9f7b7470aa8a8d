use super::operation::{act, LocalOperation, OperationKind};
use super::{Branch, Ensemble, Transcript, PRUNE_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{decode_square_matrix, encode_matrix, BipartiteState, Side};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Upper bound on the number of distinct transcripts a protocol may produce.
pub const MAX_TRANSCRIPTS: usize = 1 << 20;

/// One step of a protocol. With `when = Some(prefix)` the step runs only on
/// branches whose transcript starts with `prefix`; other branches skip it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStep<T: Real> {
    pub op: LocalOperation<T>,
    pub when: Option<Transcript>,
}

impl<T: Real> ProtocolStep<T> {
    pub fn always(op: LocalOperation<T>) -> Self {
        Self { op, when: None }
    }

    pub fn when(op: LocalOperation<T>, prefix: Transcript) -> Self {
        Self {
            op,
            when: Some(prefix),
        }
    }

    fn applies_to(&self, transcript: &[usize]) -> bool {
        self.when
            .as_ref()
            .map_or(true, |prefix| transcript.starts_with(prefix))
    }
}

/// Ordered steps forming a decision tree over classical outcomes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Protocol<T: Real> {
    pub steps: Vec<ProtocolStep<T>>,
}

impl<T: Real> Protocol<T> {
    pub fn new(steps: Vec<ProtocolStep<T>>) -> Self {
        Self { steps }
    }

    pub fn empty() -> Self {
        Self { steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every `when` key against the transcripts the tree can produce.
    pub fn validate(&self) -> Result<()> {
        let mut reachable: BTreeSet<Transcript> = BTreeSet::from([Vec::new()]);
        for (i, step) in self.steps.iter().enumerate() {
            if let Some(prefix) = &step.when {
                if !reachable.iter().any(|t| t.starts_with(prefix)) {
                    return Err(Error::Protocol(format!(
                        "step {i}: branch key {prefix:?} matches no reachable transcript"
                    )));
                }
            }
            let n = step.op.outcomes();
            if step.op.is_unitary() {
                continue;
            }
            let mut next = BTreeSet::new();
            for t in reachable {
                if step.applies_to(&t) {
                    for k in 0..n {
                        let mut child = t.clone();
                        child.push(k);
                        next.insert(child);
                    }
                } else {
                    next.insert(t);
                }
                if next.len() > MAX_TRANSCRIPTS {
                    return Err(Error::Capacity {
                        what: "protocol transcripts",
                        requested: next.len() as u128,
                        cap: MAX_TRANSCRIPTS as u128,
                    });
                }
            }
            reachable = next;
        }
        Ok(())
    }

    pub fn to_file(&self) -> Vec<StepFile> {
        self.steps
            .iter()
            .map(|s| {
                let (kind, matrix, kraus) = match s.op.kind() {
                    OperationKind::Unitary(u) => ("unitary", Some(encode_matrix(u)), None),
                    OperationKind::Measurement(k) => (
                        "measurement",
                        None,
                        Some(k.iter().map(encode_matrix).collect()),
                    ),
                };
                StepFile {
                    side: s.op.side(),
                    kind: kind.to_string(),
                    matrix,
                    kraus,
                    when: s.when.clone(),
                }
            })
            .collect()
    }

    pub fn from_file(steps: Vec<StepFile>) -> Result<Self> {
        let mut out = Vec::with_capacity(steps.len());
        for (i, s) in steps.into_iter().enumerate() {
            let op = match (s.kind.as_str(), s.matrix, s.kraus) {
                ("unitary", Some(m), None) => LocalOperation::unitary(s.side, decode_square_matrix(&m)?)?,
                ("measurement", None, Some(ks)) => {
                    let kraus = ks
                        .iter()
                        .map(|k| decode_square_matrix(k))
                        .collect::<Result<Vec<_>>>()?;
                    LocalOperation::measurement(s.side, kraus)?
                }
                (kind, ..) => {
                    return Err(Error::Parse(format!(
                        "step {i}: kind {kind:?} needs exactly one of \"matrix\" (unitary) or \"kraus\" (measurement)"
                    )))
                }
            };
            out.push(ProtocolStep { op, when: s.when });
        }
        let p = Self::new(out);
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("protocol serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// On-disk step: `{"side", "kind", "matrix" | "kraus", "when"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFile {
    pub side: Side,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<Transcript>,
}

/// Depth-first expansion of the protocol tree; branch order follows outcome labels.
pub fn run_protocol<T: Real>(s: &BipartiteState<T>, p: &Protocol<T>) -> Result<Ensemble<T>> {
    p.validate()?;
    let mut leaves = Vec::new();
    expand(s.clone(), T::one(), Vec::new(), &p.steps, &mut leaves)?;
    let mut e = Ensemble { branches: leaves };
    e.renormalize()?;
    Ok(e)
}

fn expand<T: Real>(
    state: BipartiteState<T>,
    prob: T,
    transcript: Transcript,
    steps: &[ProtocolStep<T>],
    out: &mut Vec<Branch<T>>,
) -> Result<()> {
    let Some((step, rest)) = steps.split_first() else {
        out.push(Branch {
            prob,
            state,
            transcript,
        });
        return Ok(());
    };
    if !step.applies_to(&transcript) {
        return expand(state, prob, transcript, rest, out);
    }
    step.op.check_fits(&state)?;
    match step.op.kind() {
        OperationKind::Unitary(u) => {
            let next = BipartiteState::normalized(act(step.op.side(), u, state.amps()))?;
            expand(next, prob, transcript, rest, out)
        }
        OperationKind::Measurement(kraus) => {
            for (label, k) in kraus.iter().enumerate() {
                let post = act(step.op.side(), k, state.amps());
                let q = crate::state::norm_sq(&post);
                if q < T::lit(PRUNE_THRESHOLD) {
                    continue;
                }
                let mut t = transcript.clone();
                t.push(label);
                expand(BipartiteState::normalized(post)?, prob * q, t, rest, out)?;
            }
            Ok(())
        }
    }
}
