//! Many-copy conversions between a two-term source and singlets.
//!
//! Concentration: a collective measurement of Alice's Hamming weight on `k`
//! copies leaves a maximally entangled block of rank `C(k, m)` with
//! probability `C(k, m) pᵐ (1−p)^(k−m)`, worth `log₂ C(k, m)` ebits. The
//! expected yield per copy approaches `H(p)` from below as `k` grows.
//! Dilution: keeping high-probability weight classes up to a dimension budget
//! of `2^(nR)` trades rate against fidelity, with fidelity approaching one for
//! any `R > H(p)` as `n` grows.

mod combinatorics;
mod concentration;
mod dilution;
mod oracle;

pub use combinatorics::{ln_binomial, ln_gamma, log2_binomial};
pub use concentration::{
    collective_advantage, concentrate_exact, concentrate_exact_with_budget, concentrate_sample,
    hamming_distribution, ratio_table, RatioRow, TwoTermSource, YieldEstimate, YieldMethod,
    DEFAULT_COPY_BUDGET,
};
pub use dilution::{class_order, dilution_curve, rate_grid, RateFidelityPoint};
pub use oracle::{oracle_concentrate, OracleOutcome, ORACLE_MAX_COPIES};
