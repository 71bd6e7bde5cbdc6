use crate::error::{Error, Result};
use crate::qcore::dims::PartyDims;
use crate::qcore::matrix::CMatrix;
use crate::qcore::state::{DensityOperator, PureState, QuantumState};
use crate::scalar::{Real, C};

/// Normalized state from raw amplitudes.
pub fn ket<T: Real>(amplitudes: Vec<C<T>>, dims: PartyDims) -> Result<PureState<T>> {
    PureState::ket(amplitudes, dims)
}

/// Kronecker product; the parties of `y` follow those of `x`.
pub fn tensor<T: Real, S: QuantumState<T>>(x: &S, y: &S) -> Result<S> {
    x.tensor(y)
}

/// Convex combination of normalized density operators over the same space.
pub fn mix<T: Real>(terms: &[(T, DensityOperator<T>)]) -> Result<DensityOperator<T>> {
    let tol = T::invariant_tol();
    let Some((_, first)) = terms.first() else {
        return Err(Error::InvalidWeights("no terms".into()));
    };
    let dims = first.dims().clone();
    let mut total = T::zero();
    let n = dims.total();
    let mut acc = CMatrix::zeros(n, n);
    for (w, rho) in terms {
        if *w <= T::zero() || w.is_nan() {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        if rho.dims() != &dims {
            return Err(Error::PartyMismatch(format!(
                "{:?} vs {:?}",
                rho.dims().as_slice(),
                dims.as_slice()
            )));
        }
        if !rho.is_normalized() {
            return Err(Error::InvalidWeights("mixture term is unnormalized".into()));
        }
        total += *w;
        acc = &acc + &rho.matrix().scale_real(*w);
    }
    if (total - T::one()).abs() > tol {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(DensityOperator::from_parts(dims, acc, true))
}

pub fn partial_trace<T: Real>(
    rho: &DensityOperator<T>,
    discard: &[usize],
) -> Result<DensityOperator<T>> {
    rho.partial_trace(discard)
}

/// Applies a unitary on the joint space of `targets`. Norm and trace are
/// preserved, and so is the normalized flag.
pub fn apply_local_unitary<T: Real, S: QuantumState<T>>(
    state: &S,
    u: &CMatrix<T>,
    targets: &[usize],
) -> Result<S> {
    let dev = u.unitary_deviation();
    if dev > T::invariant_tol() {
        return Err(Error::NotUnitary(dev.as_f64()));
    }
    Ok(state
        .apply_operator(u, targets)?
        .with_normalized_flag(state.is_normalized()))
}

/// Moves the populated levels of `party` into a space of dimension `new_dim`
/// according to `basis_map` (old level, new level).
pub fn relabel_subspace<T: Real, S: QuantumState<T>>(
    state: &S,
    party: usize,
    basis_map: &[(usize, usize)],
    new_dim: usize,
) -> Result<S> {
    let dims = state.dims();
    dims.check_parties(&[party])?;
    let old_dim = dims.dim(party);
    let mut map = vec![None; old_dim];
    let mut used = vec![false; new_dim];
    for &(old, new) in basis_map {
        if old >= old_dim || new >= new_dim {
            return Err(Error::InvalidMap(format!(
                "{old}->{new} out of range ({old_dim}->{new_dim})"
            )));
        }
        if map[old].is_some() || used[new] {
            return Err(Error::InvalidMap(format!("{old}->{new} is not injective")));
        }
        map[old] = Some(new);
        used[new] = true;
    }
    let outside = state.population_where(party, &|l| map[l].is_none()) / state.weight();
    if outside > T::null_prob_tol() {
        return Err(Error::PopulationOutsideMap(outside.as_f64()));
    }
    state.remap_levels(party, &map, new_dim)
}

/// ⟨ψ|ρ|ψ⟩
pub fn fidelity_pure<T: Real>(rho: &DensityOperator<T>, target: &PureState<T>) -> Result<T> {
    if rho.dims() != target.dims() {
        return Err(Error::PartyMismatch(format!(
            "{:?} vs {:?}",
            rho.dims().as_slice(),
            target.dims().as_slice()
        )));
    }
    let t = target.renormalized()?;
    Ok(rho.matrix().expectation(t.amplitudes()).re / rho.trace())
}

/// Frequently used fixed states.
pub mod states {
    use super::*;
    use crate::scalar::cr;

    fn qubits(n: usize) -> PartyDims {
        PartyDims::qubits(n).expect("small qubit register")
    }

    /// (|00⟩ + |11⟩)/√2
    pub fn phi_plus<T: Real>() -> PureState<T> {
        schmidt_pair(T::one(), T::one())
    }

    /// (|00⟩ - |11⟩)/√2
    pub fn phi_minus<T: Real>() -> PureState<T> {
        schmidt_pair(T::one(), -T::one())
    }

    /// (|01⟩ + |10⟩)/√2
    pub fn psi_plus<T: Real>() -> PureState<T> {
        PureState::ket_real(&[T::zero(), T::one(), T::one(), T::zero()], qubits(2)).expect("valid")
    }

    /// (|01⟩ - |10⟩)/√2
    pub fn psi_minus<T: Real>() -> PureState<T> {
        PureState::ket_real(&[T::zero(), T::one(), -T::one(), T::zero()], qubits(2)).expect("valid")
    }

    /// a|00⟩ + b|11⟩, normalized.
    pub fn schmidt_pair<T: Real>(a: T, b: T) -> PureState<T> {
        PureState::ket_real(&[a, T::zero(), T::zero(), b], qubits(2)).expect("nonzero pair")
    }

    /// α|0…0⟩ + β|1…1⟩ on `n` qubits, normalized.
    pub fn ghz_type<T: Real>(n: usize, alpha: T, beta: T) -> Result<PureState<T>> {
        let dims = PartyDims::qubits(n)?;
        let mut amps = vec![cr(T::zero()); dims.total()];
        amps[0] = cr(alpha);
        amps[dims.total() - 1] = cr(beta);
        PureState::ket(amps, dims)
    }

    pub fn ghz<T: Real>(n: usize) -> Result<PureState<T>> {
        ghz_type(n, T::one(), T::one())
    }

    /// (|100⟩ + |010⟩ + |001⟩)/√3
    pub fn w3<T: Real>() -> PureState<T> {
        let mut amps = vec![T::zero(); 8];
        amps[1] = T::one();
        amps[2] = T::one();
        amps[4] = T::one();
        PureState::ket_real(&amps, qubits(3)).expect("valid")
    }

    /// Single-party computational basis state |level⟩ in dimension `dim`.
    pub fn level<T: Real>(dim: usize, level: usize) -> Result<PureState<T>> {
        PureState::basis(PartyDims::new(vec![dim])?, &[level])
    }

    /// Σ_i a_i |ii⟩ on two parties of dimension `coeffs.len()`, normalized.
    pub fn schmidt_form<T: Real>(coeffs: &[T]) -> Result<PureState<T>> {
        let d = coeffs.len();
        let dims = PartyDims::new(vec![d, d])?;
        let mut amps = vec![cr(T::zero()); d * d];
        for (i, &a) in coeffs.iter().enumerate() {
            amps[i * d + i] = cr(a);
        }
        PureState::ket(amps, dims)
    }
}
