use super::builders::build_prop3_state;
use super::config::ProtocolConfig;
use super::prop2::finish_with_merge;
use super::report::ProtocolReport;
use super::steps::{levels_measurement, qubit_residual, run_copy, Action};
use crate::error::Result;
use crate::scalar::Real;

/// Three copies of the four-ququart state. On each copy two adjacent parties
/// measure `{|0⟩⟨0|, |1⟩⟨1|, I - |0⟩⟨0| - |1⟩⟨1|}` one after the other and
/// keep the third outcome: C then D (copy 1), A then B (copy 2), B then C
/// (copy 3). The residual pairs on span{|2⟩, |3⟩} form the chain A–B, B–C,
/// C–D, which is merged.
pub fn run_prop3<T: Real>(config: &ProtocolConfig<T>) -> Result<ProtocolReport<T>> {
    config.validate()?;
    let a = config.schmidt_for(4)?;
    let rho = build_prop3_state(&a, config.weights)?;
    let groups: [&[usize]; 3] = [&[0], &[1], &[2, 3]];
    let label = "{|0⟩⟨0|, |1⟩⟨1|, I - |0⟩⟨0| - |1⟩⟨1|}";
    let act = |party: usize| -> Result<Action<T>> {
        Ok(Action {
            party,
            measurement: levels_measurement(party, 4, &groups, label)?,
            accept: 2,
        })
    };
    let copy1 = run_copy(1, &rho, &[act(2)?, act(3)?])?;
    let copy2 = run_copy(2, &rho, &[act(0)?, act(1)?])?;
    let copy3 = run_copy(3, &rho, &[act(1)?, act(2)?])?;

    let mut report = ProtocolReport::new("prop3", config);
    let s = a[2] * a[2] + a[3] * a[3];
    let w = config.weights;
    report.analytic_success_prob = Some(w[0] * w[1] * w[2] * s * s * s);
    let chain = match (
        &copy2.accepted_state,
        &copy3.accepted_state,
        &copy1.accepted_state,
    ) {
        (Some(ab), Some(bc), Some(cd)) => Some(vec![
            ("AB", qubit_residual(ab, [0, 1], [2, 3])?),
            ("BC", qubit_residual(bc, [1, 2], [2, 3])?),
            ("CD", qubit_residual(cd, [2, 3], [2, 3])?),
        ]),
        _ => None,
    };
    finish_with_merge(&mut report, vec![copy1, copy2, copy3], chain)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::ghz_type;

    #[test]
    fn uniform_run() {
        let r = run_prop3(&ProtocolConfig::<f64>::default()).unwrap();
        assert!(r.success);
        assert_eq!(r.copies_consumed, 3);
        let target = ghz_type(4, 1.0f64, 1.0).unwrap();
        assert!((r.final_pure().unwrap().overlap(&target).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.certificates.as_ref().unwrap().cuts.len(), 7);
        let total: f64 = r.branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-13);
        // p1 p2 p3 (a2² + a3²)³ = (1/27)(1/8)
        assert!((r.exact_success_prob() - 1.0 / 216.0).abs() < 1e-15);
    }
}
