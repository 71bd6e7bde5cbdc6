//! Copy-by-copy bookkeeping shared by the fixed-copy runners.

use super::report::{BranchRecord, StepRecord};
use crate::error::{Error, Result};
use crate::qcore::{
    measure, relabel_subspace, DensityOperator, PartyDims, ProjectiveMeasurement, PureState,
};
use crate::scalar::Real;

/// A measurement on one party and the outcome the protocol keeps.
pub(crate) struct Action<T: Real> {
    pub party: usize,
    pub measurement: ProjectiveMeasurement<T>,
    pub accept: usize,
}

pub(crate) struct Terminal<T: Real> {
    pub label: String,
    pub probability: T,
    pub accepted: bool,
}

pub(crate) struct CopyRun<T: Real> {
    pub steps: Vec<StepRecord<T>>,
    pub terminals: Vec<Terminal<T>>,
    /// Post-measurement state on the all-accepted path.
    pub accepted_state: Option<DensityOperator<T>>,
}

/// Applies `actions` in order to a fresh copy, following the accepted outcome
/// and recording every outcome of every measurement performed on that path.
pub(crate) fn run_copy<T: Real>(
    copy_index: usize,
    rho: &DensityOperator<T>,
    actions: &[Action<T>],
) -> Result<CopyRun<T>> {
    let mut steps = Vec::new();
    let mut terminals = Vec::new();
    let mut state = Some(rho.clone());
    let mut path = String::new();
    let mut path_prob = T::one();
    for act in actions {
        let Some(current) = state.take() else { break };
        let party = PartyDims::label(act.party);
        let outcomes = measure(&current, &act.measurement)?;
        check_total(&outcomes.iter().map(|o| o.probability).collect::<Vec<_>>())?;
        for o in &outcomes {
            steps.push(StepRecord {
                copy_index,
                acting_party: party.clone(),
                measurement: act.measurement.label().to_string(),
                outcome_index: o.outcome_index,
                probability: o.probability,
                accepted: o.outcome_index == act.accept,
                realized: o.outcome_index == act.accept,
            });
        }
        let prefix = if path.is_empty() {
            String::new()
        } else {
            format!("{path},")
        };
        for o in &outcomes {
            if o.outcome_index != act.accept && !o.is_null() {
                terminals.push(Terminal {
                    label: format!("copy{copy_index}[{prefix}{party}={}]", o.outcome_index),
                    probability: path_prob * o.probability,
                    accepted: false,
                });
            }
        }
        let kept = &outcomes[act.accept];
        path = format!("{prefix}{party}={}", act.accept);
        path_prob *= kept.probability;
        state = kept.post_state.clone();
    }
    if state.is_some() {
        terminals.push(Terminal {
            label: format!("copy{copy_index}[{path}]"),
            probability: path_prob,
            accepted: true,
        });
    }
    Ok(CopyRun {
        steps,
        terminals,
        accepted_state: state,
    })
}

pub(crate) fn check_total<T: Real>(probs: &[T]) -> Result<()> {
    let s: T = probs.iter().copied().sum();
    if (s - T::one()).abs() > T::invariant_tol() {
        return Err(Error::Invariant(format!(
            "outcome probabilities sum to {s}"
        )));
    }
    Ok(())
}

/// Terminal branches of independent copies combined; when every copy is
/// accepted the branch is refined by `on_success` (label, probability).
pub(crate) fn combine<T: Real>(
    copies: &[CopyRun<T>],
    on_success: &[(String, T, bool)],
) -> Vec<BranchRecord<T>> {
    let n = copies.len();
    let mut partial: Vec<(Vec<String>, T, bool)> = vec![(Vec::new(), T::one(), true)];
    for c in copies {
        let mut next = Vec::new();
        for (labels, p, ok) in &partial {
            for t in &c.terminals {
                let mut l = labels.clone();
                l.push(t.label.clone());
                next.push((l, *p * t.probability, *ok && t.accepted));
            }
        }
        partial = next;
    }
    let mut out = Vec::new();
    for (labels, p, ok) in partial {
        let base = labels.join(" ");
        if ok && !on_success.is_empty() {
            for (l, q, success) in on_success {
                out.push(BranchRecord {
                    label: format!("{base} {l}"),
                    probability: p * *q,
                    success: *success,
                    copies_consumed: n,
                });
            }
        } else {
            out.push(BranchRecord {
                label: base,
                probability: p,
                success: ok && on_success.is_empty(),
                copies_consumed: n,
            });
        }
    }
    out
}

/// The pure bipartite residual on `keep` after the accepted path, with the
/// levels in `levels` mapped onto a qubit on both parties.
pub(crate) fn qubit_residual<T: Real>(
    state: &DensityOperator<T>,
    keep: [usize; 2],
    levels: [usize; 2],
) -> Result<PureState<T>> {
    let pure = state.reduced(&keep)?.to_pure()?;
    let map = [(levels[0], 0), (levels[1], 1)];
    let pure = relabel_subspace(&pure, 0, &map, 2)?;
    relabel_subspace(&pure, 1, &map, 2)
}

pub(crate) fn levels_measurement<T: Real>(
    party: usize,
    dim: usize,
    groups: &[&[usize]],
    label: &str,
) -> Result<ProjectiveMeasurement<T>> {
    Ok(
        ProjectiveMeasurement::level_groups(vec![party], dim, groups)?
            .with_label(format!("{}: {label}", PartyDims::label(party))),
    )
}
