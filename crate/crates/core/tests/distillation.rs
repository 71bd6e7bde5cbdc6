use gme_core::distill::{
    bell_fidelity, distill_pipeline, isotropic, recurrence_round, twirl_to_isotropic, DistillStatus,
};
use gme_core::protocols::{build_prop1_example, run_prop1_step};
use gme_core::qcore::states::level;
use gme_core::qcore::{apply_local_unitary, CMatrix, QuantumState};
use gme_core::C;
use proptest::prelude::*;

/// Bilateral-CNOT recurrence on a Werner-form input, written out in the
/// Bell-diagonal coefficients (F, r, r, r) with r = (1 - F)/3.
fn closed_form(f: f64) -> (f64, f64) {
    let r = (1.0 - f) / 3.0;
    let norm = f * f + 2.0 * f * r + 5.0 * r * r;
    ((f * f + r * r) / norm, norm)
}

#[test]
fn recurrence_matches_closed_form_on_grid() {
    for i in 0..9 {
        let f = 0.55 + 0.05 * i as f64;
        let out = recurrence_round(&isotropic(f).unwrap()).unwrap();
        let (f_next, norm) = closed_form(f);
        assert!(
            (bell_fidelity(&out.state).unwrap() - f_next).abs() < 1e-9,
            "F = {f}"
        );
        assert!((out.success_probability - norm).abs() < 1e-9, "F = {f}");
    }
}

#[test]
fn pure_bell_input_is_a_fixed_point() {
    let out = recurrence_round(&isotropic(1.0f64).unwrap()).unwrap();
    assert!((out.success_probability - 1.0).abs() < 1e-12);
    assert!((bell_fidelity(&out.state).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn residual_trajectory_follows_iterated_map() {
    let rho = build_prop1_example(0.5f64).unwrap();
    let out = run_prop1_step(&rho, 2, &level(2, 0).unwrap()).unwrap();
    let residual = out[0].post_state.clone().unwrap();
    let t = distill_pipeline(&residual, 3).unwrap();
    assert_eq!(t.status, DistillStatus::Distilled);
    let f = t.fidelities();
    assert!((f[0] - 2.0 / 3.0).abs() < 1e-12);
    let mut expect = 2.0 / 3.0;
    let mut prob = 1.0;
    for (k, point) in t.points.iter().enumerate().skip(1) {
        let (next, norm) = closed_form(expect);
        expect = next;
        prob *= norm;
        assert!((point.fidelity - expect).abs() < 1e-9, "round {k}");
        assert!(point.fidelity > f[k - 1]);
        assert!(
            (point.cumulative_probability - prob).abs() < 1e-9,
            "round {k}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn twirl_preserves_fidelity_and_is_idempotent(f in 0.3f64..1.0, theta in 0.0f64..3.2) {
        // a non-isotropic state with known fidelity: rotate one side of a Werner state
        let rz = CMatrix::from_vec(2, 2, vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::from_polar(1.0, theta)]);
        let rho = apply_local_unitary(&isotropic(f).unwrap(), &rz, &[0]).unwrap();
        let t = twirl_to_isotropic(&rho).unwrap();
        prop_assert!((bell_fidelity(&t).unwrap() - bell_fidelity(&rho).unwrap()).abs() < 1e-10);
        let tt = twirl_to_isotropic(&t).unwrap();
        prop_assert!(tt.matrix().max_abs_diff(t.matrix()) < 1e-10);
        let iso = isotropic(bell_fidelity(&t).unwrap()).unwrap();
        prop_assert!(t.matrix().max_abs_diff(iso.matrix()) < 1e-10);
    }

    #[test]
    fn recurrence_improves_above_half(f in 0.51f64..0.999) {
        let out = recurrence_round(&isotropic(f).unwrap()).unwrap();
        prop_assert!(bell_fidelity(&out.state).unwrap() > f);
        prop_assert!(out.state.is_normalized());
    }
}
