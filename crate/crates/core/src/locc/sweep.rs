use super::protocol::StepFile;
use super::{monotonicity_check, random_protocol, run_protocol};
use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, RngSpec};
use crate::scalar::Real;
use crate::schmidt::schmidt_decompose;
use crate::state::{random_state_from, BipartiteState, StateFile};
use rand::Rng;
use serde::Serialize;

/// Randomized monotonicity sweep. Trial `t` draws its dimensions, depth and
/// input state from stream `3t`, its protocol from `3t + 1` and a product
/// probe state from `3t + 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub trials: usize,
    /// Fixed `(dim_a, dim_b)`; `None` samples each side from `dim_choices`.
    pub dims: Option<(usize, usize)>,
    pub dim_choices: Vec<usize>,
    /// Each trial uses a depth drawn uniformly from `1..=max_depth`.
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            dims: None,
            dim_choices: vec![2, 3, 4],
            max_depth: 4,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    /// `"monotonicity"` or `"entanglement_creation"`.
    pub kind: String,
    pub rng: RngSpec,
    pub state: StateFile,
    pub protocol: Vec<StepFile>,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub trials: usize,
    pub satisfied: usize,
    /// Largest `after_avg − before` seen over all trials.
    pub worst_excess: f64,
    pub product_probes: usize,
    pub violations: Vec<Violation>,
}

impl SweepSummary {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub(crate) struct Trial<T: Real> {
    pub dims: (usize, usize),
    pub state: BipartiteState<T>,
    pub product: BipartiteState<T>,
    pub protocol: super::Protocol<T>,
    pub protocol_rng: RngSpec,
}

pub(crate) fn draw_trial<T: Real>(cfg: &SweepConfig, t: usize) -> Result<Trial<T>> {
    let base = RngSpec::with_stream(cfg.seed, 3 * t as u64);
    let mut rng = base.rng();
    let dims = match cfg.dims {
        Some(d) => d,
        None => {
            let n = cfg.dim_choices.len();
            (
                cfg.dim_choices[rng.gen_range(0..n)],
                cfg.dim_choices[rng.gen_range(0..n)],
            )
        }
    };
    let depth = if cfg.max_depth == 0 {
        0
    } else {
        rng.gen_range(1..=cfg.max_depth)
    };
    let state = random_state_from(dims.0, dims.1, &mut rng)?;
    let protocol_rng = RngSpec::with_stream(cfg.seed, 3 * t as u64 + 1);
    let protocol = random_protocol(dims, depth, protocol_rng)?;
    let mut prng = RngSpec::with_stream(cfg.seed, 3 * t as u64 + 2).rng();
    let a: Vec<_> = (0..dims.0).map(|_| complex_gaussian::<T, _>(&mut prng)).collect();
    let b: Vec<_> = (0..dims.1).map(|_| complex_gaussian::<T, _>(&mut prng)).collect();
    let product = BipartiteState::product(&a, &b)?;
    Ok(Trial {
        dims,
        state,
        product,
        protocol,
        protocol_rng,
    })
}

/// Runs the entropy-of-entanglement monotonicity check and the
/// no-creation probe on every trial.
pub fn monotonicity_sweep<T: Real>(cfg: &SweepConfig) -> Result<SweepSummary> {
    if cfg.trials == 0 {
        return Err(Error::Validation("sweep needs at least one trial".into()));
    }
    if cfg.dims.is_none() && cfg.dim_choices.is_empty() {
        return Err(Error::Validation("no dimensions to sample from".into()));
    }
    if let Some((a, b)) = cfg.dims {
        if a == 0 || b == 0 {
            return Err(Error::Validation(format!("invalid dims {a}x{b}")));
        }
    }
    let mut summary = SweepSummary {
        trials: cfg.trials,
        satisfied: 0,
        worst_excess: f64::NEG_INFINITY,
        product_probes: 0,
        violations: Vec::new(),
    };
    for t in 0..cfg.trials {
        let trial = draw_trial::<T>(cfg, t)?;
        let report = monotonicity_check(&trial.state, &trial.protocol)?;
        summary.worst_excess = summary.worst_excess.max(report.after_avg - report.before);
        if report.satisfied {
            summary.satisfied += 1;
        } else {
            summary.violations.push(Violation {
                trial: t,
                kind: "monotonicity".into(),
                rng: trial.protocol_rng,
                state: trial.state.to_file(),
                protocol: trial.protocol.to_file(),
                before: report.before,
                after: report.after_avg,
            });
        }

        let ensemble = run_protocol(&trial.product, &trial.protocol)?;
        summary.product_probes += 1;
        for b in &ensemble.branches {
            let rank = schmidt_decompose(&b.state)?.rank;
            if rank != 1 {
                summary.violations.push(Violation {
                    trial: t,
                    kind: "entanglement_creation".into(),
                    rng: trial.protocol_rng,
                    state: trial.product.to_file(),
                    protocol: trial.protocol.to_file(),
                    before: 1.0,
                    after: rank as f64,
                });
                break;
            }
        }
        debug_assert_eq!(trial.dims, (trial.state.dim_a(), trial.state.dim_b()));
    }
    Ok(summary)
}
