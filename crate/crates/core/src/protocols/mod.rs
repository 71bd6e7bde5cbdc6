//! State builders and executable activation protocols.
//!
//! Copies are consumed one at a time and only classical outcomes are passed
//! between them: every runner measures each copy separately and never acts
//! jointly on two copies.

mod builders;
mod config;
mod merge;
mod monte_carlo;
mod prop1;
mod prop2;
mod prop3;
mod report;
mod sigma;
mod steps;
mod teleport;

pub use builders::{
    build_prop1_example, build_prop1_general, build_prop2_state, build_prop3_state, build_sigma,
    build_sigma_prime, prop3_terms,
};
pub use config::{ProtocolConfig, SigmaMode, DEFAULT_SEED, DEFAULT_SHOTS};
pub use merge::{align_pair, merge_chain_to_ghz, Alignment, MergeBranch, MergeResult};
pub use monte_carlo::{
    monte_carlo, protocol_branches, BranchFrequency, MonteCarloSummary, PROTOCOL_NAMES,
};
pub use prop1::{run_prop1, run_prop1_step, run_prop1_with};
pub use prop2::run_prop2;
pub use prop3::run_prop3;
pub use report::{BranchRecord, FinalState, ProtocolReport, ResidualRecord, StepRecord};
pub use sigma::{analytic_pn, run_sigma_adaptive};
pub use teleport::{
    distribute_via_teleportation, move_party, teleport, DistributionBranch, TeleportBranch,
};
