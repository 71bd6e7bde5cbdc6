use serde::Serialize;

use crate::entanglement::{schmidt, Bipartition};
use crate::error::{Error, Result};
use crate::qcore::{
    apply_local_unitary, gates, measure, CMatrix, ProjectiveMeasurement, PureState, QuantumState,
};
use crate::scalar::{cr, Real, C};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportBranch<T: Real> {
    /// Bell outcome: 0 φ+, 1 φ−, 2 ψ+, 3 ψ−.
    pub outcome: usize,
    pub probability: T,
    /// Pauli applied by the receiver: "I", "Z", "X" or "ZX" (X first).
    pub correction: String,
    /// The input state with the teleported qubit now held by the receiver,
    /// in the position the input qubit had.
    pub state: PureState<T>,
}

/// Unitary `W` with `|resource⟩ = (I ⊗ W)|φ+⟩`, or an error when the
/// resource is not maximally entangled.
fn resource_frame<T: Real>(resource: &PureState<T>) -> Result<CMatrix<T>> {
    if resource.dims().as_slice() != [2, 2] {
        return Err(Error::PartyMismatch(
            "teleportation resource must be two qubits".into(),
        ));
    }
    let r = resource.renormalized()?;
    let s = schmidt(&r, &Bipartition::new(vec![0], 2)?)?;
    let half = T::one() / T::lit(2.0).sqrt();
    if (s.coefficients[0] - half).abs() > T::invariant_tol() {
        return Err(Error::NonMaximalResource(s.coefficients[0].as_f64()));
    }
    // M_ij = W_ji / √2
    let w = r
        .cut_matrix(&[0])?
        .transpose()
        .scale_real(T::lit(2.0).sqrt());
    Ok(w)
}

fn bell_basis<T: Real>() -> Vec<Vec<C<T>>> {
    let h = T::one() / T::lit(2.0).sqrt();
    let (p, m, z) = (cr(h), cr(-h), cr(T::zero()));
    vec![
        vec![p, z, z, p],
        vec![p, z, z, m],
        vec![z, p, p, z],
        vec![z, p, m, z],
    ]
}

/// Teleports qubit `qubit` of `state` through `resource`, whose first qubit
/// is held by the sender. All four Bell outcomes are returned with the
/// receiver's correction applied. Non-maximal resources are rejected; merge
/// non-maximal pairs with `merge_chain_to_ghz` instead.
pub fn teleport<T: Real>(
    state: &PureState<T>,
    qubit: usize,
    resource: &PureState<T>,
) -> Result<Vec<TeleportBranch<T>>> {
    state.dims().check_parties(&[qubit])?;
    if state.dims().dim(qubit) != 2 {
        return Err(Error::PartyMismatch(format!(
            "party {qubit} is not a qubit"
        )));
    }
    let w = resource_frame(resource)?;
    let state = state.renormalized()?;
    let n = state.dims().n_parties();
    let (sender, receiver) = (n, n + 1);
    let joint = state.tensor(&resource.renormalized()?)?;
    let joint = apply_local_unitary(&joint, &w.adjoint(), &[receiver])?;
    let bell = ProjectiveMeasurement::basis(vec![qubit, sender], &bell_basis())?
        .with_label("Bell basis {φ+, φ−, ψ+, ψ−}");
    let (x, z) = (gates::pauli_x::<T>(), gates::pauli_z::<T>());
    let mut out = Vec::new();
    for o in measure(&joint, &bell)? {
        let Some(post) = o.post_state else { continue };
        let rest = post.trace_out_product_parties(&[qubit, sender])?;
        // the receiver is now the last party
        let r = rest.dims().n_parties() - 1;
        let (fixed, correction) = match o.outcome_index {
            0 => (rest, "I"),
            1 => (apply_local_unitary(&rest, &z, &[r])?, "Z"),
            2 => (apply_local_unitary(&rest, &x, &[r])?, "X"),
            _ => {
                let t = apply_local_unitary(&rest, &x, &[r])?;
                (apply_local_unitary(&t, &z, &[r])?, "ZX")
            }
        };
        out.push(TeleportBranch {
            outcome: o.outcome_index,
            probability: o.probability,
            correction: correction.to_string(),
            state: move_party(&fixed, r, qubit)?,
        });
    }
    Ok(out)
}

/// Reorders parties so that party `from` ends up at position `to`.
pub fn move_party<T: Real>(state: &PureState<T>, from: usize, to: usize) -> Result<PureState<T>> {
    let dims = state.dims();
    dims.check_parties(&[from])?;
    dims.check_parties(&[to])?;
    let mut order: Vec<usize> = (0..dims.n_parties()).filter(|&p| p != from).collect();
    order.insert(to, from);
    let new_dims = dims.select(&order)?;
    let mut amps = vec![cr(T::zero()); dims.total()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let d = dims.digits(i);
        let nd: Vec<usize> = order.iter().map(|&p| d[p]).collect();
        amps[new_dims.index_of(&nd)] = *a;
    }
    let out = PureState::unnormalized(amps, new_dims)?;
    if state.is_normalized() {
        out.renormalized()
    } else {
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionBranch<T: Real> {
    pub outcomes: [usize; 2],
    pub corrections: [String; 2],
    pub probability: T,
    pub state: PureState<T>,
}

/// Bob holds all three qubits of `prepared`, shares `ab` (Alice first) and
/// `bc` (Bob first) with the others, and teleports qubit 0 to Alice and
/// qubit 2 to Charlie. Returns the sixteen correction branches; each state
/// is ordered A, B, C.
pub fn distribute_via_teleportation<T: Real>(
    prepared: &PureState<T>,
    ab: &PureState<T>,
    bc: &PureState<T>,
) -> Result<Vec<DistributionBranch<T>>> {
    if prepared.dims().as_slice() != [2, 2, 2] {
        return Err(Error::PartyMismatch(
            "Bob's prepared state must be three qubits".into(),
        ));
    }
    // Bob is the sender on both pairs; swap A–B so that Bob's qubit comes first.
    let ba = move_party(ab, 1, 0)?;
    let mut out = Vec::new();
    for first in teleport(prepared, 0, &ba)? {
        for second in teleport(&first.state, 2, bc)? {
            out.push(DistributionBranch {
                outcomes: [first.outcome, second.outcome],
                corrections: [first.correction.clone(), second.correction.clone()],
                probability: first.probability * second.probability,
                state: second.state,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::certify_gme_pure;
    use crate::qcore::states::{ghz, level, phi_minus, phi_plus, psi_minus, schmidt_pair};
    use crate::qcore::PartyDims;
    use crate::scalar::c;

    fn plus() -> PureState<f64> {
        PureState::ket_real(&[1.0, 1.0], PartyDims::qubits(1).unwrap()).unwrap()
    }

    #[test]
    fn single_qubit_inputs() {
        let inputs = [
            plus(),
            level(2, 0).unwrap(),
            level(2, 1).unwrap(),
            PureState::ket(
                vec![c(0.6, 0.0), c(0.0, 0.8)],
                PartyDims::qubits(1).unwrap(),
            )
            .unwrap(),
        ];
        for psi in &inputs {
            let branches = teleport(psi, 0, &phi_plus()).unwrap();
            assert_eq!(branches.len(), 4);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for b in &branches {
                assert!((b.probability - 0.25).abs() < 1e-14);
                assert!(
                    (b.state.overlap(psi).unwrap() - 1.0).abs() < 1e-12,
                    "{}",
                    b.correction
                );
            }
        }
    }

    #[test]
    fn other_bell_resources_are_reframed() {
        for r in [phi_minus::<f64>(), psi_minus()] {
            for b in teleport(&plus(), 0, &r).unwrap() {
                assert!((b.state.overlap(&plus()).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_maximal_resource() {
        let r = schmidt_pair(2.0f64, 1.0);
        assert!(matches!(
            teleport(&plus(), 0, &r),
            Err(Error::NonMaximalResource(_))
        ));
    }

    #[test]
    fn ghz_distribution() {
        let g = ghz::<f64>(3).unwrap();
        let branches = distribute_via_teleportation(&g, &phi_plus(), &phi_plus()).unwrap();
        assert_eq!(branches.len(), 16);
        for b in &branches {
            assert!((b.state.overlap(&g).unwrap() - 1.0).abs() < 1e-12);
            assert!(certify_gme_pure(&b.state).unwrap().0);
        }
    }

    #[test]
    fn move_party_roundtrip() {
        let s =
            PureState::<f64>::basis(PartyDims::new(vec![2, 3, 2]).unwrap(), &[1, 2, 0]).unwrap();
        let moved = move_party(&s, 2, 0).unwrap();
        assert_eq!(moved.dims().as_slice(), &[2, 2, 3]);
        let expect = PureState::basis(PartyDims::new(vec![2, 2, 3]).unwrap(), &[0, 1, 2]).unwrap();
        assert!((moved.overlap(&expect).unwrap() - 1.0).abs() < 1e-15);
        let back = move_party(&moved, 0, 2).unwrap();
        assert_eq!(back, s);
    }
}
