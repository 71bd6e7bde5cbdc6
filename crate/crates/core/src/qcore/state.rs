use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::dims::{Layout, PartyDims};
use crate::qcore::linalg::{eigh, eigvalsh, fix_global_phase};
use crate::qcore::matrix::CMatrix;
use crate::scalar::{cone, cr, czero, Real, C};

/// Behaviour shared by state vectors and density operators so that the
/// generic operations (`tensor`, `measure`, `apply_local_unitary`,
/// `relabel_subspace`) accept either kind.
pub trait QuantumState<T: Real>: Clone + Sized {
    fn dims(&self) -> &PartyDims;

    /// ⟨ψ|ψ⟩ for vectors, tr ρ for operators.
    fn weight(&self) -> T;

    fn is_normalized(&self) -> bool;

    fn tensor(&self, other: &Self) -> Result<Self>;

    /// `O|ψ⟩` or `OρO†` with `O` acting on `targets` (in the listed order).
    /// No unitarity is assumed; the result is flagged unnormalized.
    fn apply_operator(&self, op: &CMatrix<T>, targets: &[usize]) -> Result<Self>;

    /// Divides by the weight and sets the normalized flag.
    fn renormalized(&self) -> Result<Self>;

    fn to_density(&self) -> DensityOperator<T>;

    /// Population carried by basis states whose level on `party` satisfies `pred`.
    fn population_where(&self, party: usize, pred: &dyn Fn(usize) -> bool) -> T;

    /// Re-indexes `party` through `map` (old level -> new level) into a space
    /// of local dimension `new_dim`, dropping every other level.
    fn remap_levels(&self, party: usize, map: &[Option<usize>], new_dim: usize) -> Result<Self>;

    #[doc(hidden)]
    fn with_normalized_flag(self, normalized: bool) -> Self;
}

/// State vector over a multiparty space, party 0 most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState<T: Real> {
    dims: PartyDims,
    amplitudes: Vec<C<T>>,
    normalized: bool,
}

impl<T: Real> PureState<T> {
    /// Normalized state proportional to `amplitudes`.
    pub fn ket(amplitudes: Vec<C<T>>, dims: PartyDims) -> Result<Self> {
        Self::unnormalized(amplitudes, dims)?.renormalized()
    }

    /// Real-amplitude convenience constructor; normalizes.
    pub fn ket_real(amplitudes: &[T], dims: PartyDims) -> Result<Self> {
        Self::ket(amplitudes.iter().map(|&a| cr(a)).collect(), dims)
    }

    /// Keeps `amplitudes` as given and flags the state unnormalized.
    pub fn unnormalized(amplitudes: Vec<C<T>>, dims: PartyDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            dims,
            amplitudes,
            normalized: false,
        })
    }

    /// Computational basis state with the given per-party levels.
    pub fn basis(dims: PartyDims, levels: &[usize]) -> Result<Self> {
        if levels.len() != dims.n_parties() {
            return Err(Error::DimensionMismatch {
                expected: dims.n_parties(),
                found: levels.len(),
            });
        }
        for (p, (&l, &d)) in levels.iter().zip(dims.as_slice()).enumerate() {
            if l >= d {
                return Err(Error::InvalidParties(format!(
                    "level {l} out of range for party {p} of dimension {d}"
                )));
            }
        }
        let mut amplitudes = vec![czero(); dims.total()];
        amplitudes[dims.index_of(levels)] = cone();
        Ok(Self {
            dims,
            amplitudes,
            normalized: true,
        })
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.weight().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dims != other.dims {
            return Err(Error::PartyMismatch(format!(
                "{:?} vs {:?}",
                self.dims.as_slice(),
                other.dims.as_slice()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(czero(), |acc, (a, &b)| acc + a.conj() * b))
    }

    /// |⟨self|other⟩|² for normalized states, normalizing either side if needed.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        let ip = self.inner(other)?;
        Ok(ip.norm_sqr() / (self.weight() * other.weight()))
    }

    /// Reduced operator on `keep` (ascending order of the result's parties
    /// follows `keep`).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator<T>> {
        let layout = Layout::new(&self.dims, keep)?;
        let dims = self.dims.select(keep)?;
        let d = layout.target_dim;
        let mut m = CMatrix::zeros(d, d);
        for r in 0..layout.rest_dim {
            for t1 in 0..d {
                let a = self.amplitudes[layout.global(t1, r)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for t2 in 0..d {
                    m[(t1, t2)] = m[(t1, t2)] + a * self.amplitudes[layout.global(t2, r)].conj();
                }
            }
        }
        Ok(DensityOperator {
            dims,
            matrix: m,
            normalized: self.normalized,
        })
    }

    /// Removes `parties` from a state in which they are in a pure product with
    /// the remaining parties. Errors with [`Error::NotPure`] when they are entangled.
    pub fn trace_out_product_parties(&self, parties: &[usize]) -> Result<PureState<T>> {
        let keep = self.dims.complement(parties);
        if keep.is_empty() {
            return Err(Error::InvalidParties("cannot trace out every party".into()));
        }
        let local = self.reduced(parties)?.renormalized()?.to_pure()?;
        let layout = Layout::new(&self.dims, parties)?;
        let phi = local.amplitudes();
        let amplitudes = (0..layout.rest_dim)
            .map(|r| {
                (0..layout.target_dim).fold(czero(), |acc, t| {
                    acc + phi[t].conj() * self.amplitudes[layout.global(t, r)]
                })
            })
            .collect();
        Ok(PureState {
            dims: self.dims.select(&keep)?,
            amplitudes,
            normalized: self.normalized,
        })
    }

    /// Amplitudes reshaped into a `left x rest` matrix for a cut.
    pub fn cut_matrix(&self, left: &[usize]) -> Result<CMatrix<T>> {
        let layout = Layout::new(&self.dims, left)?;
        Ok(CMatrix::from_fn(
            layout.target_dim,
            layout.rest_dim,
            |t, r| self.amplitudes[layout.global(t, r)],
        ))
    }
}

impl<T: Real> QuantumState<T> for PureState<T> {
    fn dims(&self) -> &PartyDims {
        &self.dims
    }

    fn weight(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = self.dims.concat(&other.dims)?;
        let mut amplitudes = Vec::with_capacity(dims.total());
        for &a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|&b| a * b));
        }
        Ok(Self {
            dims,
            amplitudes,
            normalized: self.normalized && other.normalized,
        })
    }

    fn apply_operator(&self, op: &CMatrix<T>, targets: &[usize]) -> Result<Self> {
        let layout = Layout::new(&self.dims, targets)?;
        check_op_shape(op, layout.target_dim)?;
        let mut out = vec![czero(); self.dims.total()];
        let d = layout.target_dim;
        let mut buf = vec![czero(); d];
        for r in 0..layout.rest_dim {
            for (t, slot) in buf.iter_mut().enumerate() {
                *slot = self.amplitudes[layout.global(t, r)];
            }
            for t2 in 0..d {
                let row = op.row(t2);
                out[layout.global(t2, r)] = row
                    .iter()
                    .zip(&buf)
                    .fold(czero(), |acc, (&o, &x)| acc + o * x);
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes: out,
            normalized: false,
        })
    }

    fn renormalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.iter().map(|z| z.unscale(n)).collect(),
            normalized: true,
        })
    }

    fn to_density(&self) -> DensityOperator<T> {
        DensityOperator {
            dims: self.dims.clone(),
            matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes),
            normalized: self.normalized,
        }
    }

    fn population_where(&self, party: usize, pred: &dyn Fn(usize) -> bool) -> T {
        (0..self.dims.total())
            .filter(|&g| pred(self.dims.digits(g)[party]))
            .map(|g| self.amplitudes[g].norm_sqr())
            .sum()
    }

    fn remap_levels(&self, party: usize, map: &[Option<usize>], new_dim: usize) -> Result<Self> {
        let (new_dims, index_map) = remap_indices(&self.dims, party, map, new_dim)?;
        let mut amplitudes = vec![czero(); new_dims.total()];
        for (g, slot) in index_map.iter().enumerate() {
            if let Some(ng) = *slot {
                amplitudes[ng] = self.amplitudes[g];
            }
        }
        Ok(Self {
            dims: new_dims,
            amplitudes,
            normalized: self.normalized,
        })
    }

    fn with_normalized_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }
}

/// Hermitian positive semidefinite operator over a multiparty space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOperator<T: Real> {
    dims: PartyDims,
    matrix: CMatrix<T>,
    normalized: bool,
}

impl<T: Real> DensityOperator<T> {
    /// Validated trace-one density operator.
    pub fn new(dims: PartyDims, matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self {
            dims,
            matrix,
            normalized: true,
        };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitian PSD operator with arbitrary positive trace.
    pub fn unnormalized(dims: PartyDims, matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self {
            dims,
            matrix,
            normalized: false,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(dims: PartyDims, matrix: CMatrix<T>, normalized: bool) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total());
        Self {
            dims,
            matrix,
            normalized,
        }
    }

    pub fn maximally_mixed(dims: PartyDims) -> Self {
        let n = dims.total();
        let w = T::one() / T::from_usize(n).expect("dimension fits");
        Self {
            matrix: CMatrix::identity(n).scale_real(w),
            dims,
            normalized: true,
        }
    }

    /// Checks shape, Hermiticity, PSD, and unit trace when flagged normalized.
    pub fn validate(&self) -> Result<()> {
        let tol = T::invariant_tol();
        let n = self.dims.total();
        if self.matrix.rows() != n || self.matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.matrix.rows(),
            });
        }
        let herm = self.matrix.hermitian_deviation();
        if herm > tol {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm})"
            )));
        }
        let tr = self.matrix.trace();
        if tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("complex trace {tr}")));
        }
        if self.normalized && (tr.re - T::one()).abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {} != 1", tr.re)));
        }
        if !self.normalized && tr.re <= T::zero() {
            return Err(Error::InvalidDensity(format!(
                "nonpositive trace {}",
                tr.re
            )));
        }
        let scale = tr.re.max(T::one());
        let min = self.min_eigenvalue();
        if min < -tol * scale {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or(T::zero())
    }

    /// Number of eigenvalues above the rank cutoff (relative to the trace).
    pub fn rank(&self) -> usize {
        let cut = T::rank_tol() * self.trace().max(T::one());
        self.eigenvalues().iter().filter(|&&x| x > cut).count()
    }

    /// tr ρ² / (tr ρ)²
    pub fn purity(&self) -> T {
        let m = &self.matrix;
        let mut s = T::zero();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                s += (m[(i, j)] * m[(j, i)]).re;
            }
        }
        let tr = self.trace();
        s / (tr * tr)
    }

    /// Extracts the state vector of a pure operator. The global phase is fixed
    /// so the largest amplitude is real positive.
    pub fn to_pure(&self) -> Result<PureState<T>> {
        let purity = self.purity();
        if (purity - T::one()).abs() > T::invariant_tol() {
            return Err(Error::NotPure(purity.as_f64()));
        }
        let e = eigh(&self.matrix);
        let n = e.values.len();
        let lam = e.values[n - 1];
        let mut v = e.vector(n - 1);
        let s = lam.max(T::zero()).sqrt();
        for z in v.iter_mut() {
            *z = z.scale(s);
        }
        fix_global_phase(&mut v);
        Ok(PureState {
            dims: self.dims.clone(),
            amplitudes: v,
            normalized: self.normalized,
        })
    }

    /// Reduced operator after tracing out `discard`.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        self.dims.check_parties(discard)?;
        let keep = self.dims.complement(discard);
        if keep.is_empty() {
            return Err(Error::InvalidParties("cannot trace out every party".into()));
        }
        self.reduced(&keep)
    }

    /// Reduced operator on `keep`, result parties in the listed order.
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let layout = Layout::new(&self.dims, keep)?;
        let d = layout.target_dim;
        let mut m = CMatrix::zeros(d, d);
        for r in 0..layout.rest_dim {
            for t1 in 0..d {
                let g1 = layout.global(t1, r);
                for t2 in 0..d {
                    m[(t1, t2)] = m[(t1, t2)] + self.matrix[(g1, layout.global(t2, r))];
                }
            }
        }
        Ok(Self {
            dims: self.dims.select(keep)?,
            matrix: m,
            normalized: self.normalized,
        })
    }

    /// Partial transpose on the `parties` side.
    pub fn partial_transpose(&self, parties: &[usize]) -> Result<CMatrix<T>> {
        let layout = Layout::new(&self.dims, parties)?;
        let n = self.dims.total();
        let mut out = CMatrix::zeros(n, n);
        for g1 in 0..n {
            let (t1, r1) = layout.split[g1];
            for g2 in 0..n {
                let (t2, r2) = layout.split[g2];
                out[(layout.global(t2, r1), layout.global(t1, r2))] = self.matrix[(g1, g2)];
            }
        }
        Ok(out)
    }
}

impl<T: Real> QuantumState<T> for DensityOperator<T> {
    fn dims(&self) -> &PartyDims {
        &self.dims
    }

    fn weight(&self) -> T {
        self.trace()
    }

    fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(Self {
            dims,
            matrix: self.matrix.kron(&other.matrix),
            normalized: self.normalized && other.normalized,
        })
    }

    fn apply_operator(&self, op: &CMatrix<T>, targets: &[usize]) -> Result<Self> {
        let layout = Layout::new(&self.dims, targets)?;
        check_op_shape(op, layout.target_dim)?;
        let n = self.dims.total();
        let d = layout.target_dim;
        // X = (O ⊗ I) M, column by column
        let mut x = CMatrix::zeros(n, n);
        let mut buf = vec![czero(); d];
        for col in 0..n {
            for r in 0..layout.rest_dim {
                for (t, slot) in buf.iter_mut().enumerate() {
                    *slot = self.matrix[(layout.global(t, r), col)];
                }
                for t2 in 0..d {
                    x[(layout.global(t2, r), col)] = op
                        .row(t2)
                        .iter()
                        .zip(&buf)
                        .fold(czero(), |acc, (&o, &v)| acc + o * v);
                }
            }
        }
        // Y = X (O ⊗ I)†, row by row
        let mut y = CMatrix::zeros(n, n);
        for row in 0..n {
            for r in 0..layout.rest_dim {
                for (t, slot) in buf.iter_mut().enumerate() {
                    *slot = x[(row, layout.global(t, r))];
                }
                for t2 in 0..d {
                    y[(row, layout.global(t2, r))] = op
                        .row(t2)
                        .iter()
                        .zip(&buf)
                        .fold(czero(), |acc, (&o, &v)| acc + o.conj() * v);
                }
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: y,
            normalized: false,
        })
    }

    fn renormalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= T::zero() || !tr.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: self.matrix.scale_real(T::one() / tr),
            normalized: true,
        })
    }

    fn to_density(&self) -> DensityOperator<T> {
        self.clone()
    }

    fn population_where(&self, party: usize, pred: &dyn Fn(usize) -> bool) -> T {
        (0..self.dims.total())
            .filter(|&g| pred(self.dims.digits(g)[party]))
            .map(|g| self.matrix[(g, g)].re)
            .sum()
    }

    fn remap_levels(&self, party: usize, map: &[Option<usize>], new_dim: usize) -> Result<Self> {
        let (new_dims, index_map) = remap_indices(&self.dims, party, map, new_dim)?;
        let mut m = CMatrix::zeros(new_dims.total(), new_dims.total());
        for (g1, s1) in index_map.iter().enumerate() {
            let Some(n1) = *s1 else { continue };
            for (g2, s2) in index_map.iter().enumerate() {
                if let Some(n2) = *s2 {
                    m[(n1, n2)] = self.matrix[(g1, g2)];
                }
            }
        }
        Ok(Self {
            dims: new_dims,
            matrix: m,
            normalized: self.normalized,
        })
    }

    fn with_normalized_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }
}

fn check_op_shape<T: Real>(op: &CMatrix<T>, d: usize) -> Result<()> {
    if op.rows() != d || op.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.rows(),
        });
    }
    Ok(())
}

fn remap_indices(
    dims: &PartyDims,
    party: usize,
    map: &[Option<usize>],
    new_dim: usize,
) -> Result<(PartyDims, Vec<Option<usize>>)> {
    dims.check_parties(&[party])?;
    let mut new = dims.as_slice().to_vec();
    new[party] = new_dim;
    let new_dims = PartyDims::new(new)?;
    let index_map = (0..dims.total())
        .map(|g| {
            let mut digits = dims.digits(g);
            map.get(digits[party]).copied().flatten().map(|l| {
                digits[party] = l;
                new_dims.index_of(&digits)
            })
        })
        .collect();
    Ok((new_dims, index_map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn dims(d: &[usize]) -> PartyDims {
        PartyDims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn ket_errors() {
        assert!(matches!(
            PureState::<f64>::ket(vec![cone(); 3], dims(&[2, 2])),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
        assert_eq!(
            PureState::<f64>::ket(vec![czero(); 2], dims(&[2])),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn validate_rejects_bad_operators() {
        let d = dims(&[2]);
        let not_herm = CMatrix::from_vec(2, 2, vec![cr(0.5), c(0.0, 0.1), cr(0.0), cr(0.5)]);
        assert!(matches!(
            DensityOperator::<f64>::new(d.clone(), not_herm),
            Err(Error::InvalidDensity(_))
        ));
        let neg = CMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityOperator::<f64>::new(d.clone(), neg),
            Err(Error::InvalidDensity(_))
        ));
        let trace2 = CMatrix::from_real_diagonal(&[1.0, 1.0]);
        assert!(DensityOperator::<f64>::new(d.clone(), trace2.clone()).is_err());
        assert!(DensityOperator::<f64>::unnormalized(d, trace2).is_ok());
    }

    #[test]
    fn partial_transpose_of_bell_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::ket_real(&[s, 0.0, 0.0, s], dims(&[2, 2])).unwrap();
        let pt = bell.to_density().partial_transpose(&[0]).unwrap();
        // swap operator / 2
        assert!((pt[(1, 2)].re - 0.5).abs() < 1e-15);
        assert!((pt[(0, 3)].re).abs() < 1e-15);
    }

    #[test]
    fn purity_and_to_pure() {
        let psi = PureState::ket(
            vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, -0.4), c(0.6, 0.0)],
            dims(&[2, 2]),
        )
        .unwrap();
        let rho = psi.to_density();
        assert!((rho.purity() - 1.0f64).abs() < 1e-14);
        let back = rho.to_pure().unwrap();
        assert!((back.overlap(&psi).unwrap() - 1.0f64).abs() < 1e-12);
        let mixed = DensityOperator::<f64>::maximally_mixed(dims(&[2]));
        assert!(matches!(mixed.to_pure(), Err(Error::NotPure(_))));
    }

    #[test]
    fn trace_out_product_party() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::ket_real(&[s, 0.0, 0.0, s], dims(&[2, 2])).unwrap();
        let plus = PureState::ket_real(&[s, s], dims(&[2])).unwrap();
        let joint = plus.tensor(&bell).unwrap();
        let back = joint.trace_out_product_parties(&[0]).unwrap();
        assert!((back.overlap(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            bell.trace_out_product_parties(&[0]),
            Err(Error::NotPure(_))
        ));
    }
}
