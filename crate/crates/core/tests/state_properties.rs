use gme_core::entanglement::{enumerate_bipartitions, negativity, schmidt, Bipartition};
use gme_core::qcore::linalg::eigvalsh;
use gme_core::qcore::{
    apply_local_unitary, measure, mix, partial_trace, tensor, CMatrix, DensityOperator, PartyDims,
    ProjectiveMeasurement, PureState, QuantumState,
};
use gme_core::C;
use proptest::prelude::*;

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<C<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| v.into_iter().map(|(a, b)| C::new(a, b)).collect())
}

fn pure(dims: &[usize]) -> impl Strategy<Value = PureState<f64>> {
    let dims = PartyDims::new(dims.to_vec()).unwrap();
    amplitudes(dims.total()).prop_map(move |a| PureState::ket(a, dims.clone()).unwrap())
}

fn mixed(dims: &[usize], terms: usize) -> impl Strategy<Value = DensityOperator<f64>> {
    (
        prop::collection::vec(pure(dims), terms),
        prop::collection::vec(0.05f64..1.0, terms),
    )
        .prop_map(|(states, w)| {
            let total: f64 = w.iter().sum();
            let parts: Vec<_> = states
                .iter()
                .zip(&w)
                .map(|(s, &x)| (x / total, s.to_density()))
                .collect();
            mix(&parts).unwrap()
        })
}

/// Random 2×2 unitary from Euler angles and a global phase.
fn qubit_unitary() -> impl Strategy<Value = CMatrix<f64>> {
    (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3).prop_map(|(t, a, b, g)| {
        let (c, s) = (t.cos(), t.sin());
        let e = |x: f64| C::from_polar(1.0, x);
        CMatrix::from_vec(
            2,
            2,
            vec![e(g + a) * c, -e(g + b) * s, e(g - b) * s, e(g - a) * c],
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measurement_probabilities_sum_to_one(rho in mixed(&[2, 3], 3), party in 0usize..2) {
        let d = rho.dims().dim(party);
        let groups: Vec<Vec<usize>> = (0..d).map(|l| vec![l]).collect();
        let refs: Vec<&[usize]> = groups.iter().map(|g| g.as_slice()).collect();
        let m = ProjectiveMeasurement::level_groups(vec![party], d, &refs).unwrap();
        let total: f64 = measure(&rho, &m).unwrap().iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_commutes_with_mixing(x in mixed(&[2, 2, 2], 2), y in mixed(&[2, 2, 2], 2), w in 0.01f64..0.99) {
        let both = mix(&[(w, x.clone()), (1.0 - w, y.clone())]).unwrap();
        let lhs = partial_trace(&both, &[1]).unwrap();
        let rhs = mix(&[(w, partial_trace(&x, &[1]).unwrap()), (1.0 - w, partial_trace(&y, &[1]).unwrap())]).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn tracing_out_a_factor_recovers_the_other(x in mixed(&[2, 3], 2), y in mixed(&[2], 2)) {
        let joint = tensor(&x, &y).unwrap();
        let back = partial_trace(&joint, &[2]).unwrap();
        prop_assert!(back.matrix().max_abs_diff(x.matrix()) < 1e-12);
    }

    #[test]
    fn negativity_is_local_unitary_invariant(rho in mixed(&[2, 2, 2], 2), u in qubit_unitary(), v in qubit_unitary()) {
        let moved = apply_local_unitary(&apply_local_unitary(&rho, &u, &[0]).unwrap(), &v, &[2]).unwrap();
        for cut in enumerate_bipartitions(3).unwrap() {
            let a = negativity(&rho, &cut).unwrap();
            let b = negativity(&moved, &cut).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn negativity_is_symmetric_under_complement(rho in mixed(&[2, 3], 3)) {
        let left = negativity(&rho, &Bipartition::new(vec![0], 2).unwrap()).unwrap();
        let right = negativity(&rho, &Bipartition::new(vec![1], 2).unwrap()).unwrap();
        prop_assert!((left - right).abs() < 1e-9);
    }

    #[test]
    fn schmidt_squares_are_reduced_spectrum(psi in pure(&[2, 3, 2]), side in 0usize..3) {
        let cut = Bipartition::new(vec![side], 3).unwrap();
        let s = schmidt(&psi, &cut).unwrap();
        let mut spectrum = eigvalsh(psi.reduced(&[side]).unwrap().matrix());
        spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (k, lam) in spectrum.iter().enumerate() {
            let sq = s.coefficients.get(k).map_or(0.0, |c| c * c);
            prop_assert!((sq - lam).abs() < 1e-9);
        }
        let total: f64 = s.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_negativity_matches_schmidt_formula(psi in pure(&[2, 3])) {
        let cut = Bipartition::new(vec![0], 2).unwrap();
        let s = schmidt(&psi, &cut).unwrap().coefficients;
        // independent oracle: N = Σ_{i<j} s_i s_j
        let mut expect = 0.0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                expect += s[i] * s[j];
            }
        }
        let n = negativity(&psi.to_density(), &cut).unwrap();
        prop_assert!((n - expect).abs() < 1e-9);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let amps = [0.3, -0.1, 0.7, 0.2, 0.0, 0.5, -0.4, 0.1];
    let d64 = PureState::<f64>::ket_real(&amps, PartyDims::qubits(3).unwrap()).unwrap();
    let a32: Vec<f32> = amps.iter().map(|&x| x as f32).collect();
    let d32 = PureState::<f32>::ket_real(&a32, PartyDims::qubits(3).unwrap()).unwrap();
    for cut in enumerate_bipartitions(3).unwrap() {
        let a = negativity(&d64.to_density(), &cut).unwrap();
        let b = negativity(
            &d32.to_density(),
            &Bipartition::new(cut.left().to_vec(), 3).unwrap(),
        )
        .unwrap();
        assert!((a - b as f64).abs() < 1e-4, "{cut}: {a} vs {b}");
    }
}
