use super::builders::build_prop2_state;
use super::config::ProtocolConfig;
use super::merge::merge_chain_to_ghz;
use super::report::{FinalState, ProtocolReport, ResidualRecord};
use super::steps::{combine, levels_measurement, qubit_residual, run_copy, Action, CopyRun};
use crate::distill::bell_fidelity;
use crate::entanglement::{certify_gme_pure, negativity, Bipartition};
use crate::error::Result;
use crate::qcore::{PureState, QuantumState};
use crate::scalar::Real;

pub(crate) fn pure_residual_record<T: Real>(
    parties: &str,
    pair: &PureState<T>,
) -> Result<ResidualRecord<T>> {
    let state = pair.to_density();
    let negativity = negativity(&state, &Bipartition::new(vec![0], 2)?)?;
    Ok(ResidualRecord {
        parties: parties.to_string(),
        negativity,
        entangled: negativity > T::invariant_tol(),
        phi_plus_fidelity: bell_fidelity(&state)?,
        state,
    })
}

/// Finishes a fixed-copy run: merges the residual chain, certifies the
/// first merge branch and fills in the branch table.
pub(crate) fn finish_with_merge<T: Real>(
    report: &mut ProtocolReport<T>,
    copies: Vec<CopyRun<T>>,
    chain: Option<Vec<(&str, PureState<T>)>>,
) -> Result<()> {
    report.copies_consumed = copies.len();
    for c in &copies {
        report.steps.extend(c.steps.iter().cloned());
    }
    let Some(chain) = chain else {
        report.branches = combine(&copies, &[]);
        for b in &mut report.branches {
            b.success = false;
        }
        report
            .notes
            .push("an accepted outcome has zero probability".into());
        return Ok(());
    };
    for (parties, pair) in &chain {
        report.residuals.push(pure_residual_record(parties, pair)?);
    }
    let pairs: Vec<PureState<T>> = chain.into_iter().map(|(_, p)| p).collect();
    let merged = merge_chain_to_ghz(&pairs)?;
    let mut refinements = Vec::new();
    for b in &merged.branches {
        let gme = certify_gme_pure(&b.state)?.0;
        refinements.push((format!("merge[{}]", b.label), b.probability, gme));
    }
    report.branches = combine(&copies, &refinements);
    let first = &merged.branches[0];
    let (gme, cert) = certify_gme_pure(&first.state)?;
    report.success = gme;
    report.final_state = Some(FinalState::Pure(first.state.clone()));
    report.certificates = Some(cert);
    report.merge = Some(merged);
    Ok(())
}

/// Two copies of the three-qutrit state: on copy 1 Charlie measures
/// `{|0⟩⟨0|, I - |0⟩⟨0|}` and keeps the second outcome (B–C residual); on
/// copy 2 Alice does the same (A–B residual). The residuals live on
/// span{|1⟩, |2⟩}, are relabeled to qubits and merged.
pub fn run_prop2<T: Real>(config: &ProtocolConfig<T>) -> Result<ProtocolReport<T>> {
    config.validate()?;
    let a = config.schmidt_for(3)?;
    let rho = build_prop2_state(&a, config.p)?;
    let groups: [&[usize]; 2] = [&[0], &[1, 2]];
    let label = "{|0⟩⟨0|, I - |0⟩⟨0|}";
    let copy1 = run_copy(
        1,
        &rho,
        &[Action {
            party: 2,
            measurement: levels_measurement(2, 3, &groups, label)?,
            accept: 1,
        }],
    )?;
    let copy2 = run_copy(
        2,
        &rho,
        &[Action {
            party: 0,
            measurement: levels_measurement(0, 3, &groups, label)?,
            accept: 1,
        }],
    )?;

    let mut report = ProtocolReport::new("prop2", config);
    let s = a[1] * a[1] + a[2] * a[2];
    report.analytic_success_prob = Some((T::one() - config.p) * config.p * s * s);
    let chain = match (&copy2.accepted_state, &copy1.accepted_state) {
        (Some(c2), Some(c1)) => Some(vec![
            ("AB", qubit_residual(c2, [0, 1], [1, 2])?),
            ("BC", qubit_residual(c1, [1, 2], [1, 2])?),
        ]),
        _ => None,
    };
    finish_with_merge(&mut report, vec![copy1, copy2], chain)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::ghz_type;

    #[test]
    fn uniform_run() {
        let c = ProtocolConfig::<f64>::default();
        let r = run_prop2(&c).unwrap();
        assert!(r.success);
        let charlie_accept = r
            .steps
            .iter()
            .find(|s| s.copy_index == 1 && s.outcome_index == 1)
            .unwrap()
            .probability;
        assert!((charlie_accept - 1.0 / 3.0).abs() < 1e-14);
        let total: f64 = r.branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((r.exact_success_prob() - r.analytic_success_prob.unwrap()).abs() < 1e-14);
        let g = ghz_type(3, 1.0f64, 1.0).unwrap();
        assert!((r.final_pure().unwrap().overlap(&g).unwrap() - 1.0).abs() < 1e-12);
        assert!(r
            .certificates
            .as_ref()
            .unwrap()
            .cuts
            .iter()
            .all(|c| c.schmidt_rank == Some(2)));
    }

    #[test]
    fn unequal_coefficients() {
        let a = [0.6f64, 0.64f64.sqrt(), 0.0];
        let a = [a[0], a[1] * 0.6, a[1] * 0.8];
        let c = ProtocolConfig::default()
            .with_p(0.3)
            .with_schmidt(a.to_vec());
        let r = run_prop2(&c).unwrap();
        assert!(r.success);
        // relabeled pairs are (a1|00⟩ + a2|11⟩)/√(a1² + a2²)
        let n = (a[1] * a[1] + a[2] * a[2]).sqrt();
        let (x, y) = (a[2] / n, a[1] / n);
        let target = ghz_type(3, x * x, y * y).unwrap();
        assert!((r.final_pure().unwrap().overlap(&target).unwrap() - 1.0).abs() < 1e-12);
    }
}
