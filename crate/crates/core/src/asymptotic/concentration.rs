use super::combinatorics::{ln_binomial, log2_binomial};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::scalar::Real;
use crate::schmidt::{binary_entropy, schmidt_decompose};
use crate::state::BipartiteState;
use rand_distr::{Binomial, Distribution};

/// Largest copy count the exact combinatorial routines accept by default.
pub const DEFAULT_COPY_BUDGET: u64 = 1_000_000;

/// A two-term Schmidt source `√(1−p)|00⟩ + √p|11⟩`, fixed up to local unitaries by `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTermSource<T> {
    p: T,
}

impl<T: Real> TwoTermSource<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::Validation(format!("p = {p} is outside [0, 1]")));
        }
        Ok(Self { p })
    }

    /// Source with `p` the smaller squared Schmidt coefficient of a 2×2 state.
    pub fn from_state(s: &BipartiteState<T>) -> Result<Self> {
        if (s.dim_a(), s.dim_b()) != (2, 2) {
            return Err(Error::Shape(format!(
                "two-term source needs a 2x2 state, got {}x{}",
                s.dim_a(),
                s.dim_b()
            )));
        }
        let probs = schmidt_decompose(s)?.probabilities();
        Self::new(probs[1].max(T::zero()).min(T::one()))
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `H(p)` in ebits.
    pub fn entropy(&self) -> T {
        binary_entropy(self.p)
    }

    /// Single-copy state in Schmidt form.
    pub fn state(&self) -> Result<BipartiteState<T>> {
        BipartiteState::from_schmidt_probabilities(&[T::one() - self.p, self.p])
    }

    fn is_degenerate(&self) -> bool {
        self.p == T::zero() || self.p == T::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YieldMethod {
    Exact,
    MonteCarlo,
}

impl YieldMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            YieldMethod::Exact => "exact",
            YieldMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldEstimate<T> {
    pub copies_k: u64,
    /// Expected ebits of the block selected by the weight measurement.
    pub expected_ebits: T,
    pub per_copy: T,
    /// `H(p) − per_copy`.
    pub gap: T,
    /// Expected whole singlets, `E[⌊log₂ C(k, m)⌋]`.
    pub whole_singlets: T,
    pub method: YieldMethod,
    /// Standard error of `per_copy` (Monte Carlo only).
    pub stderr: Option<T>,
}

fn check_copies(k: u64, budget: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::Validation("need at least one copy".into()));
    }
    if k > budget {
        return Err(Error::Capacity {
            what: "copies",
            requested: k as u128,
            cap: budget as u128,
        });
    }
    Ok(())
}

/// `P(m) = C(k, m) pᵐ (1−p)^(k−m)` for `m = 0..=k`, evaluated in log space.
pub fn hamming_distribution<T: Real>(src: &TwoTermSource<T>, k: u64) -> Vec<(u64, T)> {
    (0..=k)
        .map(|m| (m, ln_class_probability(src, k, m).exp()))
        .collect()
}

/// `ln P(m)`, taking `0 · ln 0 = 0` so degenerate sources are exact deltas.
pub(crate) fn ln_class_probability<T: Real>(src: &TwoTermSource<T>, k: u64, m: u64) -> T {
    let p = src.p();
    let ln = |x: T, count: u64| {
        if count == 0 {
            T::zero()
        } else {
            T::lit(count as f64) * x.ln()
        }
    };
    ln_binomial::<T>(k, m) + ln(p, m) + ln(T::one() - p, k - m)
}

fn floor_bits<T: Real>(bits: T) -> T {
    // C(k, m) that are exact powers of two must not drop a singlet to rounding
    (bits + T::lit(1e-9)).floor()
}

pub fn concentrate_exact<T: Real>(src: &TwoTermSource<T>, k: u64) -> Result<YieldEstimate<T>> {
    concentrate_exact_with_budget(src, k, DEFAULT_COPY_BUDGET)
}

pub fn concentrate_exact_with_budget<T: Real>(
    src: &TwoTermSource<T>,
    k: u64,
    budget: u64,
) -> Result<YieldEstimate<T>> {
    check_copies(k, budget)?;
    let (mut expected, mut whole) = (T::zero(), T::zero());
    if !src.is_degenerate() {
        for (m, prob) in hamming_distribution(src, k) {
            if prob == T::zero() {
                continue;
            }
            let bits = log2_binomial::<T>(k, m);
            expected += prob * bits;
            whole += prob * floor_bits(bits);
        }
    }
    let per_copy = expected / T::lit(k as f64);
    Ok(YieldEstimate {
        copies_k: k,
        expected_ebits: expected,
        per_copy,
        gap: src.entropy() - per_copy,
        whole_singlets: whole,
        method: YieldMethod::Exact,
        stderr: None,
    })
}

/// Monte Carlo estimate: draw `m ~ Binomial(k, p)` per trial and average `log₂ C(k, m)`.
pub fn concentrate_sample<T: Real>(
    src: &TwoTermSource<T>,
    k: u64,
    trials: u64,
    rng: RngSpec,
) -> Result<YieldEstimate<T>> {
    check_copies(k, u64::MAX)?;
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    let kf = T::lit(k as f64);
    if src.is_degenerate() {
        return Ok(YieldEstimate {
            copies_k: k,
            expected_ebits: T::zero(),
            per_copy: T::zero(),
            gap: src.entropy(),
            whole_singlets: T::zero(),
            method: YieldMethod::MonteCarlo,
            stderr: Some(T::zero()),
        });
    }
    let dist = Binomial::new(k, src.p().as_f64())
        .map_err(|e| Error::Validation(format!("binomial parameters: {e}")))?;
    let mut r = rng.rng();
    // Welford accumulation over per-trial bits
    let (mut mean, mut m2, mut whole) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..trials {
        let m = dist.sample(&mut r);
        let bits: f64 = log2_binomial(k, m);
        let delta = bits - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (bits - mean);
        whole += floor_bits(bits);
    }
    let var = if trials > 1 { m2 / (trials - 1) as f64 } else { 0.0 };
    let expected = T::lit(mean);
    let per_copy = expected / kf;
    Ok(YieldEstimate {
        copies_k: k,
        expected_ebits: expected,
        per_copy,
        gap: src.entropy() - per_copy,
        whole_singlets: T::lit(whole / trials as f64),
        method: YieldMethod::MonteCarlo,
        stderr: Some(T::lit((var / trials as f64).sqrt()) / kf),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow<T> {
    pub k: u64,
    pub per_copy: T,
    pub gap: T,
}

/// Convergence table of `n/k = per_copy` toward `H(p)`.
pub fn ratio_table<T: Real>(src: &TwoTermSource<T>, k_values: &[u64]) -> Result<Vec<RatioRow<T>>> {
    if k_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation("k values must be ascending".into()));
    }
    k_values
        .iter()
        .map(|&k| {
            let y = concentrate_exact(src, k)?;
            Ok(RatioRow {
                k,
                per_copy: y.per_copy,
                gap: y.gap,
            })
        })
        .collect()
}

/// Per-copy yield when each pair is processed alone versus `k` pairs collectively.
pub fn collective_advantage<T: Real>(src: &TwoTermSource<T>, k: u64) -> Result<(T, T)> {
    Ok((
        concentrate_exact(src, 1)?.per_copy,
        concentrate_exact(src, k)?.per_copy,
    ))
}
