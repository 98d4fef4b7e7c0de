//! Monte Carlo simulation of proof-of-stake blocktree growth under
//! exponential network delay, with ℓ-polling before each proposal, plus the
//! closed-form quantities the simulations are checked against.
//!
//! The crate is organised bottom-up:
//!
//! * [`tree`] and [`arrival`]: blocks, the global tree, arrival processes.
//! * [`network`]: delay models and the lazily sampled reception schedule.
//! * [`protocol`]: local views, merging, longest-chain choice, polling.
//! * [`engine`]: trials, throughput and shape estimates, threshold search.
//! * [`theory`]: closed forms and the balls-in-bins process.

pub mod arrival;
pub mod engine;
pub mod error;
pub mod network;
pub mod protocol;
pub mod rng;
pub mod theory;
pub mod tree;

pub use arrival::{generate_arrivals, ArrivalProcess};
pub use engine::{
    delta_at_threshold, estimate_shape_pmf, estimate_throughput, run_trial, DeltaSearch, PollingUnits, ProposalRecord,
    SearchSettings, ShapePmf, SimConfig, Simulator, SweepRow, SweepTable, ThroughputEstimate, TrialResult,
};
pub use error::{Error, Result};
pub use network::{DelayModel, Network, ReceptionSchedule};
pub use protocol::{ForkChoiceRule, LocalView, PollingVariant, SnapshotPolicy};
pub use tree::{longest_chain_length, shape_of, Block, BlockId, GlobalTree, NodeId, TreeShape};
