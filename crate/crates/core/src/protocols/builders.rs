//! The biseparable state families the protocols start from.

use super::config::{check_open_unit, check_schmidt};
use crate::entanglement::{schmidt, Bipartition};
use crate::error::{Error, Result};
use crate::qcore::states::{level, phi_minus, phi_plus, schmidt_form};
use crate::qcore::{mix, relabel_subspace, DensityOperator, PureState, QuantumState};
use crate::scalar::Real;

fn require_entangled_pair<T: Real>(name: &str, s: &PureState<T>) -> Result<PureState<T>> {
    if s.dims().as_slice() != [2, 2] {
        return Err(Error::PartyMismatch(format!(
            "{name} must be a two-qubit state"
        )));
    }
    let s = s.renormalized()?;
    let rank = schmidt(&s, &Bipartition::new(vec![0], 2)?)?.rank;
    if rank < 2 {
        return Err(Error::Premise(format!("{name} is a product state")));
    }
    Ok(s)
}

fn require_qubit<T: Real>(name: &str, s: &PureState<T>) -> Result<PureState<T>> {
    if s.dims().as_slice() != [2] {
        return Err(Error::PartyMismatch(format!(
            "{name} must be a single-qubit state"
        )));
    }
    s.renormalized()
}

fn product<T: Real>(parts: &[&PureState<T>]) -> Result<DensityOperator<T>> {
    let mut acc = parts[0].clone();
    for s in &parts[1..] {
        acc = acc.tensor(s)?;
    }
    Ok(acc.to_density())
}

/// `p |Φ⟩⟨Φ|_AB ⊗ |φ⟩⟨φ|_C + (1-p) |ψ⟩⟨ψ|_A ⊗ |Ψ⟩⟨Ψ|_BC`
pub fn build_prop1_general<T: Real>(
    big_phi: &PureState<T>,
    phi: &PureState<T>,
    psi: &PureState<T>,
    big_psi: &PureState<T>,
    p: T,
) -> Result<DensityOperator<T>> {
    check_open_unit("p", p)?;
    let big_phi = require_entangled_pair("Φ", big_phi)?;
    let big_psi = require_entangled_pair("Ψ", big_psi)?;
    let phi = require_qubit("φ", phi)?;
    let psi = require_qubit("ψ", psi)?;
    mix(&[
        (p, product(&[&big_phi, &phi])?),
        (T::one() - p, product(&[&psi, &big_psi])?),
    ])
}

/// `p |φ+⟩⟨φ+| ⊗ |0⟩⟨0| + (1-p) |1⟩⟨1| ⊗ |φ-⟩⟨φ-|`
pub fn build_prop1_example<T: Real>(p: T) -> Result<DensityOperator<T>> {
    build_prop1_general(&phi_plus(), &level(2, 0)?, &level(2, 1)?, &phi_minus(), p)
}

fn schmidt_block<T: Real>(coeffs: &[T], d: usize) -> Result<PureState<T>> {
    if coeffs.len() != d {
        return Err(Error::Domain(format!(
            "expected {d} Schmidt coefficients, got {}",
            coeffs.len()
        )));
    }
    check_schmidt(coeffs)?;
    schmidt_form(coeffs)
}

/// `p |ψ⟩⟨ψ|_AB ⊗ |0⟩⟨0|_C + (1-p) |0⟩⟨0|_A ⊗ |ψ⟩⟨ψ|_BC` with
/// `|ψ⟩ = Σ a_i |ii⟩` on qutrits.
pub fn build_prop2_state<T: Real>(coeffs: &[T], p: T) -> Result<DensityOperator<T>> {
    check_open_unit("p", p)?;
    let psi = schmidt_block(coeffs, 3)?;
    let zero = level(3, 0)?;
    mix(&[
        (p, product(&[&psi, &zero])?),
        (T::one() - p, product(&[&zero, &psi])?),
    ])
}

/// `p |2⟩⟨2|_A ⊗ |φ+⟩⟨φ+|_BC + (1-p) |φ+⟩⟨φ+|_AB ⊗ |2⟩⟨2|_C` on C³⊗C²⊗C³.
pub fn build_sigma<T: Real>(p: T) -> Result<DensityOperator<T>> {
    sigma_family(&phi_plus(), p)
}

/// σ with a non-maximally entangled two-qubit state in place of |φ+⟩.
pub fn build_sigma_prime<T: Real>(phi_prime: &PureState<T>, p: T) -> Result<DensityOperator<T>> {
    let pair = require_entangled_pair("φ′", phi_prime)?;
    let coeffs = schmidt(&pair, &Bipartition::new(vec![0], 2)?)?.coefficients;
    let half = T::one() / T::lit(2.0).sqrt();
    if (coeffs[0] - half).abs() <= T::invariant_tol() {
        return Err(Error::Premise(
            "φ′ is maximally entangled; use build_sigma".into(),
        ));
    }
    sigma_family(&pair, p)
}

fn sigma_family<T: Real>(pair: &PureState<T>, p: T) -> Result<DensityOperator<T>> {
    check_open_unit("p", p)?;
    let pair = require_entangled_pair("pair", pair)?;
    let embed = [(0, 0), (1, 1)];
    let two = level(3, 2)?;
    // pair on (B, C) with C a qutrit, and on (A, B) with A a qutrit
    let bc = relabel_subspace(&pair, 1, &embed, 3)?;
    let ab = relabel_subspace(&pair, 0, &embed, 3)?;
    mix(&[
        (p, product(&[&two, &bc])?),
        (T::one() - p, product(&[&ab, &two])?),
    ])
}

/// `p1 |ψ⟩⟨ψ|_AB ⊗ |0⟩⟨0|_C ⊗ |0⟩⟨0|_D + p2 |0⟩⟨0|_A ⊗ |ψ⟩⟨ψ|_BC ⊗ |1⟩⟨1|_D
///  + p3 |1⟩⟨1|_A ⊗ |1⟩⟨1|_B ⊗ |ψ⟩⟨ψ|_CD` on four ququarts.
pub fn build_prop3_state<T: Real>(coeffs: &[T], weights: [T; 3]) -> Result<DensityOperator<T>> {
    for (i, &w) in weights.iter().enumerate() {
        check_open_unit(&format!("weight p{}", i + 1), w)?;
    }
    let psi = schmidt_block(coeffs, 4)?;
    let (l0, l1) = (level(4, 0)?, level(4, 1)?);
    mix(&[
        (weights[0], product(&[&psi, &l0, &l0])?),
        (weights[1], product(&[&l0, &psi, &l1])?),
        (weights[2], product(&[&l1, &l1, &psi])?),
    ])
}

/// The three pure terms of [`build_prop3_state`], in order.
pub fn prop3_terms<T: Real>(coeffs: &[T]) -> Result<[DensityOperator<T>; 3]> {
    let psi = schmidt_block(coeffs, 4)?;
    let (l0, l1) = (level(4, 0)?, level(4, 1)?);
    Ok([
        product(&[&psi, &l0, &l0])?,
        product(&[&l0, &psi, &l1])?,
        product(&[&l1, &l1, &psi])?,
    ])
}
