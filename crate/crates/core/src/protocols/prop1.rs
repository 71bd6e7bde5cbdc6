use super::builders::build_prop1_example;
use super::config::ProtocolConfig;
use super::report::{FinalState, ProtocolReport, ResidualRecord};
use super::steps::{combine, run_copy, Action};
use crate::distill::{bell_fidelity, distill_pipeline};
use crate::entanglement::{certify_entangled_all_cuts, negativity, Bipartition};
use crate::error::{Error, Result};
use crate::qcore::states::level;
use crate::qcore::{
    measure, DensityOperator, MeasurementOutcome, ProjectiveMeasurement, PureState, QuantumState,
};
use crate::scalar::Real;

fn reference_measurement<T: Real>(
    party: usize,
    reference: &PureState<T>,
) -> Result<ProjectiveMeasurement<T>> {
    if reference.dims().as_slice() != [2] {
        return Err(Error::PartyMismatch(
            "reference state must be a single qubit".into(),
        ));
    }
    let r = reference.renormalized()?;
    Ok(
        ProjectiveMeasurement::rank_one_and_complement(party, r.amplitudes())?.with_label(format!(
            "{}: {{|r⟩⟨r|, I - |r⟩⟨r|}}",
            crate::qcore::PartyDims::label(party)
        )),
    )
}

/// `party` measures `{|r⟩⟨r|, I - |r⟩⟨r|}` on a three-qubit state; each
/// outcome's post-state is returned with `party` traced out.
pub fn run_prop1_step<T: Real>(
    rho: &DensityOperator<T>,
    party: usize,
    reference: &PureState<T>,
) -> Result<Vec<MeasurementOutcome<T, DensityOperator<T>>>> {
    if rho.dims().as_slice() != [2, 2, 2] {
        return Err(Error::PartyMismatch("expected a three-qubit state".into()));
    }
    let m = reference_measurement(party, reference)?;
    measure(rho, &m)?
        .into_iter()
        .map(|o| {
            Ok(MeasurementOutcome {
                outcome_index: o.outcome_index,
                probability: o.probability,
                post_state: o
                    .post_state
                    .map(|s| s.partial_trace(&[party]))
                    .transpose()?,
            })
        })
        .collect()
}

fn residual_record<T: Real>(parties: &str, state: DensityOperator<T>) -> Result<ResidualRecord<T>> {
    let negativity = negativity(&state, &Bipartition::new(vec![0], 2)?)?;
    Ok(ResidualRecord {
        parties: parties.to_string(),
        negativity,
        entangled: negativity > T::invariant_tol(),
        phi_plus_fidelity: bell_fidelity(&state)?,
        state,
    })
}

/// The qubit protocol on `p|φ+⟩⟨φ+|⊗|0⟩⟨0| + (1-p)|1⟩⟨1|⊗|φ-⟩⟨φ-|`.
/// `charlie_outcome` selects which of Charlie's outcomes is followed.
pub fn run_prop1<T: Real>(
    config: &ProtocolConfig<T>,
    charlie_outcome: usize,
) -> Result<ProtocolReport<T>> {
    config.validate()?;
    let rho = build_prop1_example(config.p)?;
    run_prop1_with(config, &rho, &level(2, 0)?, &level(2, 1)?, charlie_outcome)
}

/// Copy 1: Charlie measures `{|φ⟩⟨φ|, I - |φ⟩⟨φ|}` and C is traced out.
/// Copy 2: Alice measures `{|ψ⟩⟨ψ|, I - |ψ⟩⟨ψ|}` and A is traced out.
/// Entangled residuals are handed to the distillation pipeline.
pub fn run_prop1_with<T: Real>(
    config: &ProtocolConfig<T>,
    rho: &DensityOperator<T>,
    charlie_ref: &PureState<T>,
    alice_ref: &PureState<T>,
    charlie_outcome: usize,
) -> Result<ProtocolReport<T>> {
    config.validate()?;
    rho.validate()?;
    if charlie_outcome > 1 {
        return Err(Error::Domain(format!(
            "Charlie's measurement has outcomes 0 and 1, got {charlie_outcome}"
        )));
    }
    let copy1 = run_copy(
        1,
        rho,
        &[Action {
            party: 2,
            measurement: reference_measurement(2, charlie_ref)?,
            accept: charlie_outcome,
        }],
    )?;
    let copy2 = run_copy(
        2,
        rho,
        &[Action {
            party: 0,
            measurement: reference_measurement(0, alice_ref)?,
            accept: 0,
        }],
    )?;

    let mut report = ProtocolReport::new("prop1", config);
    report.copies_consumed = 2;
    report.steps.extend(copy1.steps.iter().cloned());
    report.steps.extend(copy2.steps.iter().cloned());

    for (copy, parties, traced) in [(&copy1, "AB", 2), (&copy2, "BC", 0)] {
        match &copy.accepted_state {
            Some(s) => report
                .residuals
                .push(residual_record(parties, s.partial_trace(&[traced])?)?),
            None => report.notes.push(format!(
                "the followed outcome for the {parties} pair has zero probability"
            )),
        }
    }
    let all_entangled = report.residuals.len() == 2 && report.residuals.iter().all(|r| r.entangled);
    for r in &report.residuals {
        if r.entangled {
            report
                .distillation
                .push(distill_pipeline(&r.state, config.rounds)?);
        } else {
            report.notes.push(format!(
                "the {} residual is separable (negativity {}); no entanglement to distill",
                r.parties, r.negativity
            ));
        }
    }

    report.branches = combine(&[copy1, copy2], &[]);
    if !all_entangled {
        for b in &mut report.branches {
            b.success = false;
        }
    }
    report.success = all_entangled;
    if all_entangled {
        let ab = report.residuals[0].state.clone();
        report.certificates = Some(certify_entangled_all_cuts(&ab)?);
        report.final_state = Some(FinalState::Density(ab));
        report.notes.push(
            "both residual pairs are entangled; distilling them to Bell pairs and teleporting \
             a GHZ state from B completes the activation"
                .into(),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::{level, phi_plus};
    use crate::qcore::{mix, tensor};

    #[test]
    fn charlie_zero_branch_residual() {
        let rho = build_prop1_example(0.5f64).unwrap();
        let out = run_prop1_step(&rho, 2, &level(2, 0).unwrap()).unwrap();
        assert!((out[0].probability - 0.75).abs() < 1e-14);
        // (2/3)|φ+⟩⟨φ+| + (1/3)|10⟩⟨10|
        let ten = tensor(&level::<f64>(2, 1).unwrap(), &level(2, 0).unwrap()).unwrap();
        let expect = mix(&[
            (2.0 / 3.0, phi_plus().to_density()),
            (1.0 / 3.0, ten.to_density()),
        ])
        .unwrap();
        let got = out[0].post_state.as_ref().unwrap();
        assert!(got.matrix().max_abs_diff(expect.matrix()) < 1e-14);
        assert_eq!(got.rank(), 2);
    }

    #[test]
    fn charlie_one_branch_is_separable() {
        let c = ProtocolConfig::<f64>::default();
        let r = run_prop1(&c, 1).unwrap();
        assert!(!r.success);
        assert!(!r.residuals[0].entangled);
        assert!(r.residuals[0].negativity.abs() < 1e-14);
        assert!(r.branches.iter().all(|b| !b.success));
    }

    #[test]
    fn default_run() {
        let c = ProtocolConfig::<f64>::default();
        let r = run_prop1(&c, 0).unwrap();
        assert!(r.success);
        assert_eq!(r.residuals.len(), 2);
        assert!((r.residuals[0].phi_plus_fidelity - 2.0 / 3.0).abs() < 1e-14);
        let total: f64 = r.branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-14);
        // both copies accept with probability 3/4
        assert!((r.exact_success_prob() - 0.5625).abs() < 1e-14);
        for t in &r.distillation {
            let f = t.fidelities();
            assert!(f.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
