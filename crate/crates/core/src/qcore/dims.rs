use serde::Serialize;

use crate::error::{Error, Result};

/// Local dimension of every party. Party 0 is the most significant tensor index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PartyDims {
    dims: Vec<usize>,
    #[serde(skip)]
    total: usize,
}

impl PartyDims {
    pub const DEFAULT_CAP: usize = 4096;

    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        Self::with_cap(dims, Self::DEFAULT_CAP)
    }

    pub fn with_cap(dims: impl Into<Vec<usize>>, cap: usize) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one party is required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "local dimension {d} < 2 in {dims:?}"
            )));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(Error::CapExceeded {
                    total: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                    cap,
                })?;
        }
        Ok(Self { dims, total })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn concat(&self, other: &PartyDims) -> Result<PartyDims> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PartyDims::new(dims)
    }

    /// Dimensions of the listed parties, in the listed order.
    pub fn select(&self, parties: &[usize]) -> Result<PartyDims> {
        self.check_parties(parties)?;
        PartyDims::new(parties.iter().map(|&p| self.dims[p]).collect::<Vec<_>>())
    }

    /// Product of the local dimensions of `parties`.
    pub fn joint_dim(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&p| self.dims[p]).product()
    }

    /// Validates that `parties` are distinct, in range and nonempty.
    pub fn check_parties(&self, parties: &[usize]) -> Result<()> {
        if parties.is_empty() {
            return Err(Error::InvalidParties("empty party list".into()));
        }
        for (i, &p) in parties.iter().enumerate() {
            if p >= self.n_parties() {
                return Err(Error::InvalidParties(format!(
                    "party {p} out of range for {} parties",
                    self.n_parties()
                )));
            }
            if parties[..i].contains(&p) {
                return Err(Error::InvalidParties(format!("party {p} repeated")));
            }
        }
        Ok(())
    }

    /// Parties not listed in `parties`, ascending.
    pub fn complement(&self, parties: &[usize]) -> Vec<usize> {
        (0..self.n_parties())
            .filter(|p| !parties.contains(p))
            .collect()
    }

    /// Per-party digits of a global index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Party label used in reports: A, B, C, ...
    pub fn label(party: usize) -> String {
        if party < 26 {
            ((b'A' + party as u8) as char).to_string()
        } else {
            format!("P{party}")
        }
    }
}

/// Splits global indices into a (target, rest) pair for a chosen ordered set
/// of target parties. `rest` enumerates the remaining parties in ascending order.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub target_dim: usize,
    pub rest_dim: usize,
    /// global index -> (target index, rest index)
    pub split: Vec<(usize, usize)>,
    /// rest * target_dim + target -> global index
    pub join: Vec<usize>,
}

impl Layout {
    pub fn new(dims: &PartyDims, targets: &[usize]) -> Result<Self> {
        dims.check_parties(targets)?;
        let rest = dims.complement(targets);
        let target_dim = dims.joint_dim(targets);
        let rest_dim = if rest.is_empty() {
            1
        } else {
            dims.joint_dim(&rest)
        };
        let total = dims.total();
        let mut split = Vec::with_capacity(total);
        let mut join = vec![0; total];
        for g in 0..total {
            let digits = dims.digits(g);
            let t = targets
                .iter()
                .fold(0, |acc, &p| acc * dims.dim(p) + digits[p]);
            let r = rest.iter().fold(0, |acc, &p| acc * dims.dim(p) + digits[p]);
            split.push((t, r));
            join[r * target_dim + t] = g;
        }
        Ok(Self {
            target_dim,
            rest_dim,
            split,
            join,
        })
    }

    #[inline]
    pub fn global(&self, target: usize, rest: usize) -> usize {
        self.join[rest * self.target_dim + target]
    }
}
