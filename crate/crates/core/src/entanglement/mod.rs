//! Entanglement certificates: Schmidt data for pure states, partial-transpose
//! negativity for mixed states, all-cut reports and a Svetlichny evaluation.

mod bipartition;
mod svetlichny;

use rayon::prelude::*;
use serde::Serialize;

pub use bipartition::{enumerate_bipartitions, Bipartition};
pub use svetlichny::{
    svetlichny_value, SvetlichnySettings, SVETLICHNY_CLASSICAL_BOUND, SVETLICHNY_QUANTUM_BOUND,
};

use crate::error::{Error, Result};
use crate::qcore::linalg::{eigvalsh, svd};
use crate::qcore::{DensityOperator, PureState, QuantumState};
use crate::scalar::Real;

/// Schmidt coefficients of a pure state across one cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtData<T: Real> {
    /// Nonincreasing.
    pub coefficients: Vec<T>,
    pub rank: usize,
}

/// Negativity and (for pure inputs) Schmidt data of one cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutRecord<T: Real> {
    pub bipartition: Bipartition,
    pub negativity: T,
    pub schmidt_rank: Option<usize>,
    pub schmidt_coefficients: Option<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionReport<T: Real> {
    pub n_parties: usize,
    pub cuts: Vec<CutRecord<T>>,
    /// Every cut has negativity above the invariant tolerance.
    pub all_cuts_entangled: bool,
    /// Present for pure inputs: Schmidt rank ≥ 2 in every cut.
    pub is_gme: Option<bool>,
}

impl<T: Real> BipartitionReport<T> {
    pub fn min_negativity(&self) -> T {
        self.cuts
            .iter()
            .map(|c| c.negativity)
            .fold(T::infinity(), T::min)
    }
}

fn require_normalized_pure<T: Real>(state: &PureState<T>) -> Result<()> {
    let n = state.norm();
    if !state.is_normalized() || (n - T::one()).abs() > T::invariant_tol() {
        return Err(Error::NotNormalized(n.as_f64()));
    }
    Ok(())
}

fn check_cut(dims_parties: usize, cut: &Bipartition) -> Result<()> {
    if cut.n_parties() != dims_parties {
        return Err(Error::InvalidParties(format!(
            "cut {cut} is for {} parties, state has {dims_parties}",
            cut.n_parties()
        )));
    }
    Ok(())
}

/// Singular values of the amplitude matrix reshaped along `cut`.
pub fn schmidt<T: Real>(state: &PureState<T>, cut: &Bipartition) -> Result<SchmidtData<T>> {
    require_normalized_pure(state)?;
    check_cut(state.dims().n_parties(), cut)?;
    let m = state.cut_matrix(cut.left())?;
    let coefficients = svd(&m).singular_values;
    let rank = coefficients.iter().filter(|&&s| s > T::rank_tol()).count();
    Ok(SchmidtData { coefficients, rank })
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose on
/// the left side of `cut`.
pub fn negativity<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    if !rho.is_normalized() {
        return Err(Error::InvalidDensity(
            "negativity needs a trace-one operator".into(),
        ));
    }
    check_cut(rho.dims().n_parties(), cut)?;
    let pt = rho.partial_transpose(cut.left())?;
    Ok(negative_part(&eigvalsh(&pt)))
}

fn negative_part<T: Real>(spectrum: &[T]) -> T {
    spectrum
        .iter()
        .filter(|&&x| x < T::zero())
        .fold(T::zero(), |acc, &x| acc - x)
}

/// Negativity for every bipartition; the flag is set when all of them
/// exceed the invariant tolerance.
pub fn certify_entangled_all_cuts<T: Real>(
    rho: &DensityOperator<T>,
) -> Result<BipartitionReport<T>> {
    rho.validate()?;
    let n = rho.dims().n_parties();
    let cuts = enumerate_bipartitions(n)?;
    let records = cuts
        .into_par_iter()
        .map(|cut| {
            let negativity = negativity(rho, &cut)?;
            Ok(CutRecord {
                bipartition: cut,
                negativity,
                schmidt_rank: None,
                schmidt_coefficients: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all = records.iter().all(|r| r.negativity > T::invariant_tol());
    Ok(BipartitionReport {
        n_parties: n,
        cuts: records,
        all_cuts_entangled: all,
        is_gme: None,
    })
}

/// GME test for pure states: Schmidt rank ≥ 2 across every bipartition.
///
/// The negativity column uses the pure-state identity
/// `N = ((Σ s_i)^2 - 1) / 2` on the Schmidt coefficients.
pub fn certify_gme_pure<T: Real>(state: &PureState<T>) -> Result<(bool, BipartitionReport<T>)> {
    require_normalized_pure(state)?;
    let n = state.dims().n_parties();
    let cuts = enumerate_bipartitions(n)?;
    let records = cuts
        .into_par_iter()
        .map(|cut| {
            let data = schmidt(state, &cut)?;
            let l1: T = data.coefficients.iter().copied().sum();
            let negativity = ((l1 * l1 - T::one()) / T::lit(2.0)).max(T::zero());
            Ok(CutRecord {
                bipartition: cut,
                negativity,
                schmidt_rank: Some(data.rank),
                schmidt_coefficients: Some(data.coefficients),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let is_gme = records.iter().all(|r| r.schmidt_rank.unwrap_or(0) >= 2);
    let all = records.iter().all(|r| r.negativity > T::invariant_tol());
    Ok((
        is_gme,
        BipartitionReport {
            n_parties: n,
            cuts: records,
            all_cuts_entangled: all,
            is_gme: Some(is_gme),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::{ghz, ghz_type, level, phi_plus, schmidt_pair};
    use crate::qcore::{tensor, PartyDims};

    #[test]
    fn schmidt_examples() {
        let cut = Bipartition::new(vec![0], 2).unwrap();
        let s = schmidt(&phi_plus::<f64>(), &cut).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.rank, 2);
        assert!((s.coefficients[0] - h).abs() < 1e-15 && (s.coefficients[1] - h).abs() < 1e-15);

        let s00 = PureState::<f64>::basis(PartyDims::qubits(2).unwrap(), &[0, 0]).unwrap();
        let s = schmidt(&s00, &cut).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.coefficients, vec![1.0, 0.0]);

        let (a, b) = (0.8f64, 0.6f64);
        let psi = ghz_type(3, a * a, b * b).unwrap();
        for cut in enumerate_bipartitions(3).unwrap() {
            assert_eq!(schmidt(&psi, &cut).unwrap().rank, 2);
        }

        let raw = PureState::<f64>::unnormalized(
            phi_plus::<f64>().amplitudes().to_vec(),
            PartyDims::qubits(2).unwrap(),
        )
        .unwrap();
        assert!(matches!(schmidt(&raw, &cut), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn negativity_examples() {
        let cut = Bipartition::new(vec![0], 2).unwrap();
        let n = negativity(&phi_plus::<f64>().to_density(), &cut).unwrap();
        assert!((n - 0.5).abs() < 1e-14);

        let prod = tensor(
            &schmidt_pair(0.8f64, 0.6).reduced(&[0]).unwrap(),
            &level::<f64>(3, 1).unwrap().to_density(),
        )
        .unwrap();
        assert!(negativity(&prod, &cut).unwrap().abs() < 1e-14);
    }

    #[test]
    fn gme_examples() {
        let (ok, rep) = certify_gme_pure(&ghz::<f64>(3).unwrap()).unwrap();
        assert!(ok);
        assert_eq!(rep.cuts.len(), 3);
        let prod = tensor(&phi_plus::<f64>(), &level(2, 0).unwrap()).unwrap();
        let (ok, rep) = certify_gme_pure(&prod).unwrap();
        assert!(!ok);
        let c_cut = rep
            .cuts
            .iter()
            .find(|c| c.bipartition.label() == "AB|C")
            .unwrap();
        assert_eq!(c_cut.schmidt_rank, Some(1));
        let (a, b) = (0.9f64, (1.0f64 - 0.81).sqrt());
        let (ok, rep) = certify_gme_pure(&ghz_type(4, a.powi(3), b.powi(3)).unwrap()).unwrap();
        assert!(ok);
        assert_eq!(rep.cuts.len(), 7);
    }

    #[test]
    fn fully_separable_has_zero_negativity_everywhere() {
        let s = PureState::<f64>::basis(PartyDims::qubits(3).unwrap(), &[0, 0, 0]).unwrap();
        let rep = certify_entangled_all_cuts(&s.to_density()).unwrap();
        assert!(rep.cuts.iter().all(|c| c.negativity.abs() < 1e-14));
        assert!(!rep.all_cuts_entangled);
    }
}
