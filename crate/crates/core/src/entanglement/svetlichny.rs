use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{gates, CMatrix, PureState, QuantumState};
use crate::scalar::Real;

/// Hybrid-local bound of the Svetlichny functional.
pub const SVETLICHNY_CLASSICAL_BOUND: f64 = 4.0;
/// Quantum maximum, 4√2.
pub const SVETLICHNY_QUANTUM_BOUND: f64 = 4.0 * std::f64::consts::SQRT_2;

/// Two dichotomic observables per party (unprimed, primed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvetlichnySettings<T: Real> {
    #[serde(skip)]
    pub a: [CMatrix<T>; 2],
    #[serde(skip)]
    pub b: [CMatrix<T>; 2],
    #[serde(skip)]
    pub c: [CMatrix<T>; 2],
    /// Equatorial angles `[a, a', b, b', c, c']` when built from angles.
    pub angles: Option<[T; 6]>,
}

impl<T: Real> SvetlichnySettings<T> {
    pub fn new(a: [CMatrix<T>; 2], b: [CMatrix<T>; 2], c: [CMatrix<T>; 2]) -> Result<Self> {
        for (name, o) in [
            ("a", &a[0]),
            ("a'", &a[1]),
            ("b", &b[0]),
            ("b'", &b[1]),
            ("c", &c[0]),
            ("c'", &c[1]),
        ] {
            check_observable(name, o)?;
        }
        Ok(Self {
            a,
            b,
            c,
            angles: None,
        })
    }

    /// Observables `cos φ X + sin φ Y` for angles `[a, a', b, b', c, c']`.
    pub fn from_equatorial_angles(angles: [T; 6]) -> Self {
        let o = |k: usize| gates::equatorial(angles[k]);
        Self {
            a: [o(0), o(1)],
            b: [o(2), o(3)],
            c: [o(4), o(5)],
            angles: Some(angles),
        }
    }

    /// Settings reaching 4√2 on (|000⟩ + |111⟩)/√2:
    /// A ∈ {X, Y}, B ∈ {5π/4, 7π/4}, C ∈ {X, Y}.
    pub fn ghz_optimal() -> Self {
        let pi = T::PI();
        let q = pi / T::lit(4.0);
        Self::from_equatorial_angles([
            T::zero(),
            pi / T::lit(2.0),
            T::lit(5.0) * q,
            T::lit(7.0) * q,
            T::zero(),
            pi / T::lit(2.0),
        ])
    }
}

fn check_observable<T: Real>(name: &str, o: &CMatrix<T>) -> Result<()> {
    let tol = T::invariant_tol();
    let bad = |why: &str| Err(Error::Domain(format!("setting {name} {why}")));
    if o.rows() != 2 || o.cols() != 2 {
        return bad("is not a single-qubit operator");
    }
    if !o.is_hermitian(tol) {
        return bad("is not Hermitian");
    }
    if o.trace().norm() > tol {
        return bad("is not traceless");
    }
    if (o * o).max_abs_diff(&CMatrix::identity(2)) > tol {
        return bad("does not have eigenvalues ±1");
    }
    Ok(())
}

/// Svetlichny combination `M + M'` with
/// `M = E(abc') + E(ab'c) + E(a'bc) - E(a'b'c')` and `M'` its primed swap.
pub fn svetlichny_value<T: Real>(
    state: &PureState<T>,
    settings: &SvetlichnySettings<T>,
) -> Result<T> {
    if state.dims().as_slice() != [2, 2, 2] {
        return Err(Error::PartyMismatch(format!(
            "Svetlichny functional needs three qubits, got {:?}",
            state.dims().as_slice()
        )));
    }
    let psi = state.renormalized()?;
    let e = |x: usize, y: usize, z: usize| -> T {
        let op = settings.a[x].kron(&settings.b[y]).kron(&settings.c[z]);
        op.expectation(psi.amplitudes()).re
    };
    let m = e(0, 0, 1) + e(0, 1, 0) + e(1, 0, 0) - e(1, 1, 1);
    let m_prime = e(1, 1, 0) + e(1, 0, 1) + e(0, 1, 1) - e(0, 0, 0);
    Ok(m + m_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::ghz;
    use crate::qcore::PartyDims;

    #[test]
    fn ghz_reaches_quantum_bound() {
        let v =
            svetlichny_value(&ghz::<f64>(3).unwrap(), &SvetlichnySettings::ghz_optimal()).unwrap();
        assert!((v - SVETLICHNY_QUANTUM_BOUND).abs() < 1e-12);
    }

    #[test]
    fn degenerate_z_settings_vanish_on_ghz() {
        let z = gates::pauli_z::<f64>();
        let s = SvetlichnySettings::new(
            [z.clone(), z.clone()],
            [z.clone(), z.clone()],
            [z.clone(), z],
        )
        .unwrap();
        let v = svetlichny_value(&ghz::<f64>(3).unwrap(), &s).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn invalid_inputs() {
        let half = CMatrix::<f64>::from_real_diagonal(&[0.5, -0.5]);
        let x = gates::pauli_x::<f64>();
        assert!(SvetlichnySettings::new(
            [half, x.clone()],
            [x.clone(), x.clone()],
            [x.clone(), x.clone()]
        )
        .is_err());
        let id = CMatrix::<f64>::identity(2);
        assert!(
            SvetlichnySettings::new([id, x.clone()], [x.clone(), x.clone()], [x.clone(), x])
                .is_err()
        );
        let two = PureState::<f64>::basis(PartyDims::qubits(2).unwrap(), &[0, 0]).unwrap();
        assert!(svetlichny_value(&two, &SvetlichnySettings::ghz_optimal()).is_err());
    }
}
