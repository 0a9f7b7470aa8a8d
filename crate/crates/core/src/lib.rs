//! Entanglement of bipartite pure states.
//!
//! States are dense amplitude matrices; the entropy of entanglement comes from
//! their singular values. [`locc`] simulates local operations with classical
//! communication, [`asymptotic`] computes many-copy concentration and dilution,
//! and [`measures`] checks candidate measures against the pure-state axioms.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

pub mod asymptotic;
pub mod error;
mod linalg;
pub mod locc;
pub mod measures;
pub mod rng;
pub mod scalar;
pub mod schmidt;
pub mod state;

pub use error::{Error, Result};
pub use rng::RngSpec;
pub use scalar::{Amplitude, Real, Tolerances};
pub use state::{Side, StateFile};

pub type State = state::BipartiteState<f64>;
pub type Density = state::DensityOperator<f64>;
pub type Schmidt = schmidt::SchmidtForm<f64>;
pub type Ebits = schmidt::EntanglementValue<f64>;
pub type Operation = locc::LocalOperation<f64>;
pub type Protocol = locc::Protocol<f64>;
pub type Ensemble = locc::Ensemble<f64>;
pub type Source = asymptotic::TwoTermSource<f64>;
pub type Yield = asymptotic::YieldEstimate<f64>;
pub type Candidate = measures::CandidateMeasure<f64>;

pub type State32 = state::BipartiteState<f32>;
pub type Source32 = asymptotic::TwoTermSource<f32>;
