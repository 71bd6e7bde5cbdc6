use rand::Rng;

use super::builders::{build_sigma, build_sigma_prime};
use super::config::{check_open_unit, ProtocolConfig, SigmaMode};
use super::merge::merge_chain_to_ghz;
use super::prop2::pure_residual_record;
use super::report::{BranchRecord, FinalState, ProtocolReport, StepRecord};
use super::steps::{check_total, levels_measurement};
use super::teleport::distribute_via_teleportation;
use crate::entanglement::certify_gme_pure;
use crate::error::{Error, Result};
use crate::qcore::states::{ghz, schmidt_pair};
use crate::qcore::{measure, relabel_subspace, DensityOperator, ProjectiveMeasurement, PureState};
use crate::scalar::Real;

/// `1 - (1 - p)^n`
pub fn analytic_pn<T: Real>(p: T, n: usize) -> Result<T> {
    check_open_unit("p", p)?;
    let n = i32::try_from(n).map_err(|_| Error::Domain(format!("n = {n} is too large")))?;
    Ok(T::one() - (T::one() - p).powi(n))
}

/// Which Bell pair a measurement outcome leaves behind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pair {
    Ab,
    Bc,
}

impl Pair {
    fn name(self) -> &'static str {
        match self {
            Pair::Ab => "AB",
            Pair::Bc => "BC",
        }
    }
}

pub(crate) struct FirstOutcome<T: Real> {
    pub pair: Pair,
    pub probability: T,
    /// Per-copy probability of the missing pair in the repeat phase.
    pub repeat_q: T,
}

/// Exact outcome structure of the adaptive protocol, built from measurements
/// on one copy of σ.
pub(crate) struct SigmaSetup<T: Real> {
    pub resource: PureState<T>,
    pub maximal: bool,
    pub alice: ProjectiveMeasurement<T>,
    pub charlie: ProjectiveMeasurement<T>,
    /// Probabilities of Alice's outcomes (P1, P2) and Charlie's (P1, P2).
    pub alice_probs: [T; 2],
    pub charlie_probs: [T; 2],
    pub first: Vec<FirstOutcome<T>>,
    pub max_copies: usize,
}

fn pair_from<T: Real>(post: &DensityOperator<T>, pair: Pair) -> Result<PureState<T>> {
    let embed = [(0, 0), (1, 1)];
    match pair {
        Pair::Ab => relabel_subspace(&post.reduced(&[0, 1])?.to_pure()?, 0, &embed, 2),
        Pair::Bc => relabel_subspace(&post.reduced(&[1, 2])?.to_pure()?, 1, &embed, 2),
    }
}

impl<T: Real> SigmaSetup<T> {
    pub fn new(config: &ProtocolConfig<T>) -> Result<Self> {
        config.validate()?;
        let c = config.schmidt_for(2)?;
        let resource = schmidt_pair(c[0], c[1]);
        let maximal = (c[0] - c[1]).abs() <= T::invariant_tol();
        let rho = if maximal {
            build_sigma(config.p)?
        } else {
            build_sigma_prime(&resource, config.p)?
        };
        let groups: [&[usize]; 2] = [&[0, 1], &[2]];
        let alice = levels_measurement(0, 3, &groups, "{|0⟩⟨0| + |1⟩⟨1|, |2⟩⟨2|}")?;
        let charlie = levels_measurement(2, 3, &groups, "{|0⟩⟨0| + |1⟩⟨1|, |2⟩⟨2|}")?;
        let oa = measure(&rho, &alice)?;
        let oc = measure(&rho, &charlie)?;
        let alice_probs = [oa[0].probability, oa[1].probability];
        let charlie_probs = [oc[0].probability, oc[1].probability];
        check_total(&alice_probs)?;
        check_total(&charlie_probs)?;
        // every outcome must leave exactly the resource pair
        for (o, pair) in [
            (&oa[0], Pair::Ab),
            (&oa[1], Pair::Bc),
            (&oc[0], Pair::Bc),
            (&oc[1], Pair::Ab),
        ] {
            let post = o
                .post_state
                .as_ref()
                .ok_or_else(|| Error::Invariant("null σ outcome".into()))?;
            let f = pair_from(post, pair)?.overlap(&resource)?;
            if (f - T::one()).abs() > T::invariant_tol() {
                return Err(Error::Invariant(format!(
                    "{} outcome does not leave the resource pair (fidelity {f})",
                    pair.name()
                )));
            }
        }
        let ab_first = FirstOutcome {
            pair: Pair::Ab,
            probability: alice_probs[0],
            repeat_q: charlie_probs[0],
        };
        let first = match config.sigma_mode {
            SigmaMode::ConditionedOnAb => vec![FirstOutcome {
                probability: T::one(),
                ..ab_first
            }],
            SigmaMode::Unconditioned => vec![
                ab_first,
                FirstOutcome {
                    pair: Pair::Bc,
                    probability: alice_probs[1],
                    repeat_q: alice_probs[0],
                },
            ],
        };
        Ok(Self {
            resource,
            maximal,
            alice,
            charlie,
            alice_probs,
            charlie_probs,
            first,
            max_copies: config.max_copies,
        })
    }

    /// Leaves in order: for each first outcome, success on repeat copy
    /// 1..max_copies-1, then exhaustion.
    pub fn branches(&self) -> Vec<BranchRecord<T>> {
        let repeats = self.max_copies - 1;
        let mut out = Vec::new();
        for f in &self.first {
            let miss = T::one() - f.repeat_q;
            let mut reach = f.probability;
            for k in 1..=repeats {
                out.push(BranchRecord {
                    label: format!("first={} success_on_repeat={k}", f.pair.name()),
                    probability: reach * f.repeat_q,
                    success: true,
                    copies_consumed: 1 + k,
                });
                reach *= miss;
            }
            out.push(BranchRecord {
                label: format!("first={} exhausted", f.pair.name()),
                probability: reach,
                success: false,
                copies_consumed: self.max_copies,
            });
        }
        out
    }

    /// Draws one run copy by copy. Returns (first outcome index, repeat copy
    /// that succeeded) and the index of the matching leaf in [`Self::branches`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Option<usize>, usize) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut fi = self.first.len() - 1;
        for (i, f) in self.first.iter().enumerate() {
            acc += f.probability.as_f64();
            if u < acc {
                fi = i;
                break;
            }
        }
        let q = self.first[fi].repeat_q.as_f64();
        let repeats = self.max_copies - 1;
        let base = fi * (repeats + 1);
        for k in 1..=repeats {
            if rng.gen::<f64>() < q {
                return (fi, Some(k), base + k - 1);
            }
        }
        (fi, None, base + repeats)
    }

    pub fn analytic_success(&self, config: &ProtocolConfig<T>) -> Result<T> {
        let n = self.max_copies - 1;
        let p = config.p;
        Ok(match config.sigma_mode {
            SigmaMode::ConditionedOnAb => analytic_pn(p, n)?,
            SigmaMode::Unconditioned => {
                (T::one() - p) * analytic_pn(p, n)? + p * analytic_pn(T::one() - p, n)?
            }
        })
    }
}

fn step_records<T: Real>(
    copy_index: usize,
    party: &str,
    m: &ProjectiveMeasurement<T>,
    probs: [T; 2],
    accepted: [bool; 2],
    realized: usize,
) -> Vec<StepRecord<T>> {
    (0..2)
        .map(|i| StepRecord {
            copy_index,
            acting_party: party.to_string(),
            measurement: m.label().to_string(),
            outcome_index: i,
            probability: probs[i],
            accepted: accepted[i],
            realized: i == realized,
        })
        .collect()
}

/// The adaptive protocol on copies of σ (or σ′ when the configured Schmidt
/// pair is not maximal), sampled once with `rng`.
///
/// Copy 1: Alice measures `{P1, P2}`; both outcomes leave a Bell pair (A–B or
/// B–C). Later copies: the party on the missing side measures and keeps only
/// the outcome giving the missing pair, up to `max_copies` in total. With
/// both pairs in hand Bob teleports a GHZ state (maximal pairs) or the pairs
/// are merged (non-maximal pairs).
pub fn run_sigma_adaptive<T: Real, R: Rng + ?Sized>(
    config: &ProtocolConfig<T>,
    rng: &mut R,
) -> Result<ProtocolReport<T>> {
    let setup = SigmaSetup::new(config)?;
    let (fi, success_at, _) = setup.sample(rng);
    let first = &setup.first[fi];

    let mut report = ProtocolReport::new("sigma", config);
    report.analytic_success_prob = Some(setup.analytic_success(config)?);
    report.branches = setup.branches();
    let realized_first = match first.pair {
        Pair::Ab => 0,
        Pair::Bc => 1,
    };
    report.steps.extend(step_records(
        1,
        "A",
        &setup.alice,
        setup.alice_probs,
        [true, true],
        realized_first,
    ));
    if config.sigma_mode == SigmaMode::ConditionedOnAb {
        report
            .notes
            .push("first copy conditioned on the A–B outcome".into());
    }
    let (party, m, probs, useful) = match first.pair {
        Pair::Ab => ("C", &setup.charlie, setup.charlie_probs, 0),
        Pair::Bc => ("A", &setup.alice, setup.alice_probs, 0),
    };
    let repeats_used = success_at.unwrap_or(setup.max_copies - 1);
    for k in 1..=repeats_used {
        let realized = if Some(k) == success_at {
            useful
        } else {
            1 - useful
        };
        let mut accepted = [false, false];
        accepted[useful] = true;
        report
            .steps
            .extend(step_records(1 + k, party, m, probs, accepted, realized));
    }
    report.copies_consumed = 1 + repeats_used;
    if success_at.is_none() {
        report.notes.push(format!(
            "no missing pair within {} copies",
            setup.max_copies
        ));
        return Ok(report);
    }

    let (ab, bc) = (setup.resource.clone(), setup.resource.clone());
    report.residuals.push(pure_residual_record("AB", &ab)?);
    report.residuals.push(pure_residual_record("BC", &bc)?);
    let final_state = if setup.maximal {
        let branches = distribute_via_teleportation(&ghz(3)?, &ab, &bc)?;
        report.notes.push(format!(
            "GHZ prepared by B and teleported to A and C; {} correction branches",
            branches.len()
        ));
        branches[0].state.clone()
    } else {
        let merged = merge_chain_to_ghz(&[ab, bc])?;
        let s = merged.branches[0].state.clone();
        report
            .notes
            .push("non-maximal pairs merged by B's parity measurement".into());
        report.merge = Some(merged);
        s
    };
    let (gme, cert) = certify_gme_pure(&final_state)?;
    report.success = gme;
    report.final_state = Some(FinalState::Pure(final_state));
    report.certificates = Some(cert);
    Ok(report)
}
