//! Merging a chain of bipartite pure pairs into a GHZ-type state with parity
//! measurements at the internal parties.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::svd;
use crate::qcore::{
    apply_local_unitary, gates, measure, CMatrix, PartyDims, ProjectiveMeasurement, PureState,
    QuantumState,
};
use crate::scalar::{cr, Real};

/// Local unitaries that bring one pair into `a|00⟩ + b|11⟩`, `a ≥ b > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alignment<T: Real> {
    pub pair_index: usize,
    pub left_unitary: CMatrix<T>,
    pub right_unitary: CMatrix<T>,
    /// `[a, b]`
    pub schmidt: [T; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeBranch<T: Real> {
    pub label: String,
    /// Per internal party: 0 for `|00⟩⟨00| + |11⟩⟨11|`, 1 for `|01⟩⟨01| + |10⟩⟨10|`.
    pub parity_outcomes: Vec<usize>,
    /// Per internal party: 0 for `|+⟩`, 1 for `|−⟩`.
    pub sign_outcomes: Vec<usize>,
    pub probability: T,
    /// Pauli corrections applied to `uncorrected`, e.g. "X on C".
    pub corrections: Vec<String>,
    pub uncorrected: PureState<T>,
    /// Outcome and diagonal of the Kraus operator applied on A when the
    /// branch had to be reshaped.
    pub filter: Option<(usize, [T; 2])>,
    /// `a^m|0…0⟩ + b^m|1…1⟩` up to a global phase, in the aligned frame.
    pub state: PureState<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeResult<T: Real> {
    pub n_pairs: usize,
    pub alignments: Vec<Alignment<T>>,
    pub branches: Vec<MergeBranch<T>>,
}

impl<T: Real> MergeResult<T> {
    pub fn total_probability(&self) -> T {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

/// Rotates a two-qubit pure state into Schmidt form with real coefficients.
pub fn align_pair<T: Real>(
    pair: &PureState<T>,
    pair_index: usize,
) -> Result<(PureState<T>, Alignment<T>)> {
    if pair.dims().as_slice() != [2, 2] {
        return Err(Error::PartyMismatch(format!(
            "pair {pair_index} is not a two-qubit state: {:?}",
            pair.dims().as_slice()
        )));
    }
    let pair = pair.renormalized()?;
    // |ψ⟩ = Σ_k s_k |u_k⟩|conj v_k⟩ for M = U S V†
    let d = svd(&pair.cut_matrix(&[0])?);
    if d.singular_values[1] <= T::rank_tol() {
        return Err(Error::Premise(format!(
            "pair {pair_index} is a product state"
        )));
    }
    let left = d.u.adjoint();
    let right = d.v.transpose();
    let aligned = apply_local_unitary(&pair, &left, &[0])?;
    let aligned = apply_local_unitary(&aligned, &right, &[1])?;
    Ok((
        aligned,
        Alignment {
            pair_index,
            left_unitary: left,
            right_unitary: right,
            schmidt: [d.singular_values[0], d.singular_values[1]],
        },
    ))
}

struct Partial<T: Real> {
    probability: T,
    state: PureState<T>,
    parities: Vec<usize>,
    signs: Vec<usize>,
}

fn expand<T: Real>(
    partials: Vec<Partial<T>>,
    m: &ProjectiveMeasurement<T>,
    record: impl Fn(&mut Partial<T>, usize),
) -> Result<Vec<Partial<T>>> {
    let mut out = Vec::new();
    for part in partials {
        for o in measure(&part.state, m)? {
            let Some(post) = o.post_state else { continue };
            let mut next = Partial {
                probability: part.probability * o.probability,
                state: post,
                parities: part.parities.clone(),
                signs: part.signs.clone(),
            };
            record(&mut next, o.outcome_index);
            out.push(next);
        }
    }
    Ok(out)
}

/// Merges pairs shared along the chain `0–1, 1–2, …, m-1–m` into an
/// `(m+1)`-party state.
///
/// Each pair is first Schmidt-aligned. Every internal party measures the
/// parity of its two qubits, then measures the qubit that came from the pair
/// on its left in the `|±⟩` basis and discards it. In the returned branches
/// the qubit order is one qubit per party, left to right. After the recorded
/// Pauli corrections a branch with `k` pairs of unflipped parity reads
/// `a^k b^(m-k) |0…0⟩ + a^(m-k) b^k |1…1⟩`; when that differs from
/// `a^m|0…0⟩ + b^m|1…1⟩` a two-outcome filter on A (see the branch `filter`)
/// reshapes it, so every branch ends in the same normalized state.
pub fn merge_chain_to_ghz<T: Real>(pairs: &[PureState<T>]) -> Result<MergeResult<T>> {
    let m = pairs.len();
    if m == 0 {
        return Err(Error::InvalidParties(
            "a chain needs at least two parties".into(),
        ));
    }
    let mut alignments = Vec::with_capacity(m);
    let mut joint: Option<PureState<T>> = None;
    for (i, pair) in pairs.iter().enumerate() {
        let (aligned, al) = align_pair(pair, i)?;
        alignments.push(al);
        joint = Some(match joint {
            None => aligned,
            Some(j) => j.tensor(&aligned)?,
        });
    }
    let joint = joint.expect("nonempty chain");

    let mut partials = vec![Partial {
        probability: T::one(),
        state: joint,
        parities: Vec::new(),
        signs: Vec::new(),
    }];
    let parity = ProjectiveMeasurement::level_groups(vec![0, 1], 4, &[&[0, 3], &[1, 2]])?;
    for j in 1..m {
        let mj = retarget(&parity, vec![2 * j - 1, 2 * j])?;
        partials = expand(partials, &mj, |p, o| p.parities.push(o))?;
    }
    let h = T::one() / T::lit(2.0).sqrt();
    let plus_minus = vec![vec![cr(h), cr(h)], vec![cr(h), cr(-h)]];
    for j in 1..m {
        let mj = ProjectiveMeasurement::basis(vec![2 * j - 1], &plus_minus)?;
        partials = expand(partials, &mj, |p, o| p.signs.push(o))?;
    }

    let discard: Vec<usize> = (1..m).map(|j| 2 * j - 1).collect();
    let x = gates::pauli_x::<T>();
    let z = gates::pauli_z::<T>();
    let gamma = alignments
        .iter()
        .fold(T::one(), |acc, a| acc * a.schmidt[0]);
    let delta = alignments
        .iter()
        .fold(T::one(), |acc, a| acc * a.schmidt[1]);
    let norm = (gamma * gamma + delta * delta).sqrt();
    let target = [gamma / norm, delta / norm];

    let mut branches = Vec::new();
    for part in partials {
        let uncorrected = if discard.is_empty() {
            part.state.clone()
        } else {
            part.state.trace_out_product_parties(&discard)?
        };
        let mut state = uncorrected.clone();
        let mut corrections = Vec::new();
        let mut cumulative = 0;
        for k in 1..=m {
            if k < m {
                cumulative ^= part.parities[k - 1];
            }
            if cumulative == 1 {
                state = apply_local_unitary(&state, &x, &[k])?;
                corrections.push(format!("X on {}", PartyDims::label(k)));
            }
        }
        if part.signs.iter().sum::<usize>() % 2 == 1 {
            state = apply_local_unitary(&state, &z, &[0])?;
            corrections.push("Z on A".to_string());
        }
        let label = (1..m)
            .map(|j| {
                format!(
                    "{}:P{},{}",
                    PartyDims::label(j),
                    part.parities[j - 1] + 1,
                    if part.signs[j - 1] == 0 { "+" } else { "-" }
                )
            })
            .collect::<Vec<_>>()
            .join(" ");
        let label = if label.is_empty() {
            "direct".to_string()
        } else {
            label
        };
        for (weight, fixed, extra, filter) in reshape(&state, target)? {
            let mut corrections = corrections.clone();
            corrections.extend(extra);
            branches.push(MergeBranch {
                label: match filter {
                    Some((o, _)) => format!("{label} A:f{o}"),
                    None => label.clone(),
                },
                parity_outcomes: part.parities.clone(),
                sign_outcomes: part.signs.clone(),
                probability: part.probability * weight,
                corrections,
                uncorrected: uncorrected.clone(),
                filter,
                state: fixed,
            });
        }
    }
    Ok(MergeResult {
        n_pairs: m,
        alignments,
        branches,
    })
}

type Reshaped<T> = (T, PureState<T>, Vec<String>, Option<(usize, [T; 2])>);

/// Turns `α|0…0⟩ + β|1…1⟩` into `γ|0…0⟩ + δ|1…1⟩` (`γ ≥ δ`) with a
/// two-outcome diagonal filter on A; the second outcome leaves the
/// coefficients swapped and is fixed by X on every party. Possible whenever
/// `γ/δ ≥ max(α/β, β/α)`, which holds for every merge branch.
fn reshape<T: Real>(state: &PureState<T>, target: [T; 2]) -> Result<Vec<Reshaped<T>>> {
    let amps = state.amplitudes();
    let (alpha, beta) = (amps[0].norm(), amps[amps.len() - 1].norm());
    let [gamma, delta] = target;
    let tol = T::invariant_tol();
    if (alpha - gamma).abs() <= tol && (beta - delta).abs() <= tol {
        return Ok(vec![(T::one(), state.clone(), Vec::new(), None)]);
    }
    let (g2, d2, a2, b2) = (gamma * gamma, delta * delta, alpha * alpha, beta * beta);
    let den = g2 * g2 - d2 * d2;
    let c0 = (g2 * a2 - d2 * b2) / den;
    let c1 = (g2 * b2 - d2 * a2) / den;
    if den <= tol || c0 < -tol || c1 < -tol {
        return Err(Error::Invariant(format!(
            "cannot reshape ({alpha}, {beta}) into ({gamma}, {delta}) deterministically"
        )));
    }
    let (c0, c1) = (c0.max(T::zero()).sqrt(), c1.max(T::zero()).sqrt());
    let kraus = [
        [c0 * gamma / alpha, c0 * delta / beta],
        [c1 * delta / alpha, c1 * gamma / beta],
    ];
    let n = state.dims().n_parties();
    let x = gates::pauli_x::<T>();
    let mut out = Vec::new();
    for (o, k) in kraus.into_iter().enumerate() {
        let op = CMatrix::from_real_diagonal(&k);
        let raw = state.apply_operator(&op, &[0])?;
        let weight = raw.weight();
        if weight <= T::null_prob_tol() {
            continue;
        }
        let mut fixed = raw.renormalized()?;
        let mut extra = vec![format!("filter f{o} on A")];
        if o == 1 {
            for party in 0..n {
                fixed = apply_local_unitary(&fixed, &x, &[party])?;
                extra.push(format!("X on {}", PartyDims::label(party)));
            }
        }
        out.push((weight, fixed, extra, Some((o, k))));
    }
    Ok(out)
}

fn retarget<T: Real>(
    m: &ProjectiveMeasurement<T>,
    targets: Vec<usize>,
) -> Result<ProjectiveMeasurement<T>> {
    Ok(ProjectiveMeasurement::new(targets, m.projectors().to_vec())?.with_label(m.label()))
}
