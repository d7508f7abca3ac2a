//! Salp swarm optimizer family (published, as-coded and amended leader rules),
//! random search and DE/rand/1/bin baselines, plus the experiment harness used
//! to audit translation invariance, origin bias and boundary bouncing.
//!
//! All optimizers minimize. Runs are single threaded and fully determined by a
//! 64-bit seed; see [`rng::RngStream`].

pub mod algorithms;
pub mod benchmarks;
pub mod cli;
pub mod error;
pub mod harness;
pub mod plot;
pub mod rng;
pub mod space;
pub mod stats;
pub mod trace;

pub use algorithms::{run, AlgorithmConfig, AlgorithmId, DeConfig, SsoConfig};
pub use benchmarks::{Objective, ObjectiveSpec};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use space::{clip, uniform_init, Bounds, Candidate, SalpChain};
pub use trace::RunTrace;
