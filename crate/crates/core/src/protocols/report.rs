use serde::Serialize;

use super::config::ProtocolConfig;
use super::merge::MergeResult;
use super::monte_carlo::MonteCarloSummary;
use crate::distill::DistillTrajectory;
use crate::entanglement::BipartitionReport;
use crate::qcore::{DensityOperator, PureState};
use crate::scalar::Real;

/// One outcome of one measurement performed during a run. All outcomes of
/// a measurement are recorded, so their probabilities sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord<T: Real> {
    pub copy_index: usize,
    pub acting_party: String,
    pub measurement: String,
    pub outcome_index: usize,
    /// Conditional on the preceding accepted outcomes.
    pub probability: T,
    /// The protocol keeps this outcome.
    pub accepted: bool,
    /// This outcome is the one taken on the reported path.
    pub realized: bool,
}

/// A terminal branch of a protocol's outcome tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord<T: Real> {
    pub label: String,
    pub probability: T,
    pub success: bool,
    pub copies_consumed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FinalState<T: Real> {
    Pure(PureState<T>),
    Density(DensityOperator<T>),
}

/// A two-party state left after a measurement step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRecord<T: Real> {
    /// For example "AB".
    pub parties: String,
    pub state: DensityOperator<T>,
    pub negativity: T,
    pub entangled: bool,
    pub phi_plus_fidelity: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport<T: Real> {
    pub protocol: String,
    pub config: ProtocolConfig<T>,
    pub steps: Vec<StepRecord<T>>,
    pub copies_consumed: usize,
    pub success: bool,
    pub analytic_success_prob: Option<T>,
    pub final_state: Option<FinalState<T>>,
    pub certificates: Option<BipartitionReport<T>>,
    /// Every terminal branch with its exact probability.
    pub branches: Vec<BranchRecord<T>>,
    pub residuals: Vec<ResidualRecord<T>>,
    pub distillation: Vec<DistillTrajectory<T>>,
    pub merge: Option<MergeResult<T>>,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub notes: Vec<String>,
}

impl<T: Real> ProtocolReport<T> {
    pub(crate) fn new(protocol: &str, config: &ProtocolConfig<T>) -> Self {
        Self {
            protocol: protocol.to_string(),
            config: config.clone(),
            steps: Vec::new(),
            copies_consumed: 0,
            success: false,
            analytic_success_prob: None,
            final_state: None,
            certificates: None,
            branches: Vec::new(),
            residuals: Vec::new(),
            distillation: Vec::new(),
            merge: None,
            monte_carlo: None,
            notes: Vec::new(),
        }
    }

    pub fn final_pure(&self) -> Option<&PureState<T>> {
        match &self.final_state {
            Some(FinalState::Pure(s)) => Some(s),
            _ => None,
        }
    }

    /// Sum of exact branch probabilities over successful branches.
    pub fn exact_success_prob(&self) -> T {
        self.branches
            .iter()
            .filter(|b| b.success)
            .map(|b| b.probability)
            .sum()
    }
}
