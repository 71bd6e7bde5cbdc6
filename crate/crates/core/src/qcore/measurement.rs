use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::matrix::CMatrix;
use crate::qcore::state::QuantumState;
use crate::scalar::{cone, Real, C};

/// Complete set of orthogonal projectors acting on an ordered list of parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveMeasurement<T: Real> {
    targets: Vec<usize>,
    #[serde(skip)]
    projectors: Vec<CMatrix<T>>,
    label: String,
}

impl<T: Real> ProjectiveMeasurement<T> {
    pub fn new(targets: Vec<usize>, projectors: Vec<CMatrix<T>>) -> Result<Self> {
        let tol = T::invariant_tol();
        let bad = |msg: String| Err(Error::MalformedMeasurement(msg));
        if targets.is_empty() {
            return bad("no target parties".into());
        }
        let Some(first) = projectors.first() else {
            return bad("no projectors".into());
        };
        let d = first.rows();
        let mut sum = CMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return bad(format!("projector {i} has shape {}x{}", p.rows(), p.cols()));
            }
            if !p.is_hermitian(tol) {
                return bad(format!("projector {i} is not Hermitian"));
            }
            if (p * p).max_abs_diff(p) > tol {
                return bad(format!("projector {i} is not idempotent"));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                if (p * q).frobenius_norm() > tol {
                    return bad(format!("projectors {i} and {j} are not orthogonal"));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&CMatrix::identity(d)) > tol {
            return bad("projectors do not sum to the identity".into());
        }
        Ok(Self {
            targets,
            projectors,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `{|v⟩⟨v|, I - |v⟩⟨v|}` on one party; `v` is normalized here.
    pub fn rank_one_and_complement(party: usize, v: &[C<T>]) -> Result<Self> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n == T::zero() {
            return Err(Error::ZeroVector);
        }
        let v: Vec<C<T>> = v.iter().map(|z| z.unscale(n)).collect();
        let p = CMatrix::outer(&v, &v);
        let q = &CMatrix::identity(v.len()) - &p;
        Self::new(vec![party], vec![p, q])
    }

    /// Diagonal projectors onto groups of joint computational levels of the
    /// targets. `groups` must partition `0..joint_dim`.
    pub fn level_groups(
        targets: Vec<usize>,
        joint_dim: usize,
        groups: &[&[usize]],
    ) -> Result<Self> {
        let mut seen = vec![false; joint_dim];
        let mut projectors = Vec::with_capacity(groups.len());
        for g in groups {
            let mut p = CMatrix::zeros(joint_dim, joint_dim);
            for &l in *g {
                if l >= joint_dim || seen[l] {
                    return Err(Error::MalformedMeasurement(format!(
                        "level {l} repeated or out of range"
                    )));
                }
                seen[l] = true;
                p[(l, l)] = cone();
            }
            projectors.push(p);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedMeasurement(
                "level groups do not cover the space".into(),
            ));
        }
        Self::new(targets, projectors)
    }

    /// Rank-one projectors onto the given (orthonormal) vectors.
    pub fn basis(targets: Vec<usize>, vectors: &[Vec<C<T>>]) -> Result<Self> {
        let projectors = vectors.iter().map(|v| CMatrix::outer(v, v)).collect();
        Self::new(targets, projectors)
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// One branch of a measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementOutcome<T: Real, S> {
    pub outcome_index: usize,
    pub probability: T,
    /// `None` for null outcomes (probability at or below the null threshold).
    pub post_state: Option<S>,
}

impl<T: Real, S> MeasurementOutcome<T, S> {
    pub fn is_null(&self) -> bool {
        self.post_state.is_none()
    }
}

/// Born-rule measurement. Probabilities are relative to the input weight, so
/// unnormalized inputs are handled as if renormalized first.
pub fn measure<T: Real, S: QuantumState<T>>(
    state: &S,
    m: &ProjectiveMeasurement<T>,
) -> Result<Vec<MeasurementOutcome<T, S>>> {
    let dims = state.dims();
    dims.check_parties(&m.targets)?;
    let joint = dims.joint_dim(&m.targets);
    if m.projectors[0].rows() != joint {
        return Err(Error::MalformedMeasurement(format!(
            "projectors act on dimension {}, targets span {joint}",
            m.projectors[0].rows()
        )));
    }
    let total = state.weight();
    if total <= T::zero() {
        return Err(Error::ZeroVector);
    }
    m.projectors
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let projected = state.apply_operator(p, &m.targets)?;
            let probability = (projected.weight() / total).max(T::zero());
            let post_state = if probability > T::null_prob_tol() {
                Some(projected.renormalized()?)
            } else {
                None
            };
            Ok(MeasurementOutcome {
                outcome_index: i,
                probability,
                post_state,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::dims::PartyDims;
    use crate::qcore::state::{DensityOperator, PureState};
    use crate::scalar::{cr, czero};

    #[test]
    fn malformed_measurements_rejected() {
        let half = CMatrix::<f64>::from_real_diagonal(&[0.5, 0.5]);
        assert!(ProjectiveMeasurement::new(vec![0], vec![half]).is_err());
        let p0 = CMatrix::<f64>::from_real_diagonal(&[1.0, 0.0]);
        // incomplete
        assert!(ProjectiveMeasurement::new(vec![0], vec![p0.clone()]).is_err());
        // overlapping
        assert!(ProjectiveMeasurement::new(
            vec![0],
            vec![
                p0.clone(),
                p0.clone(),
                CMatrix::from_real_diagonal(&[-1.0, 1.0])
            ]
        )
        .is_err());
        assert!(
            ProjectiveMeasurement::<f64>::level_groups(vec![0], 3, &[&[0, 1], &[1, 2]]).is_err()
        );
        assert!(ProjectiveMeasurement::<f64>::level_groups(vec![0], 3, &[&[0, 1]]).is_err());
    }

    #[test]
    fn computational_measurement_of_zero() {
        let zero = PureState::<f64>::basis(PartyDims::new(vec![2]).unwrap(), &[0]).unwrap();
        let m = ProjectiveMeasurement::level_groups(vec![0], 2, &[&[0], &[1]]).unwrap();
        let out = measure(&zero.to_density(), &m).unwrap();
        assert_eq!(out[0].probability, 1.0);
        assert_eq!(out[1].probability, 0.0);
        assert!(out[1].is_null());
        assert!(!out[0].is_null());
    }

    #[test]
    fn wrong_target_size_rejected() {
        let rho = DensityOperator::<f64>::maximally_mixed(PartyDims::new(vec![3, 2]).unwrap());
        let m = ProjectiveMeasurement::level_groups(vec![1], 3, &[&[0], &[1, 2]]).unwrap();
        assert!(matches!(
            measure(&rho, &m),
            Err(Error::MalformedMeasurement(_))
        ));
        let m = ProjectiveMeasurement::level_groups(vec![4], 2, &[&[0], &[1]]).unwrap();
        assert!(matches!(measure(&rho, &m), Err(Error::InvalidParties(_))));
    }

    #[test]
    fn rank_one_complement_normalizes() {
        let m =
            ProjectiveMeasurement::<f64>::rank_one_and_complement(0, &[cr(2.0), czero()]).unwrap();
        assert_eq!(m.projectors()[0][(0, 0)], cr(1.0));
    }
}
