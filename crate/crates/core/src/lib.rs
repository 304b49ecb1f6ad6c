//! Discrete-time coined quantum walks on the diagonal two-dimensional lattice
//! with broken-link boundaries: barriers, slits, screens and the reference
//! oracles used to check the evolution.

pub mod cli;
pub mod coins;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod lattice;
pub mod measurement;
pub mod oracle;
pub mod topology;

pub use coins::{CoinKind, CoinOperator};
pub use error::{Error, Result};
pub use evolution::{evolve, step};
pub use experiments::{preset, run, superposition_deviation, ExperimentConfig, ExperimentResult};
pub use lattice::{AmplitudeField, CoinIndex, CoinState, Site, C64};
pub use measurement::{find_extrema, probability, ProbabilityField, ProfileExtrema, ScreenAccumulator};
pub use topology::{BarrierOrientation, BarrierSpec, LinkSet, LinkTopology, Slit, WallCut};
