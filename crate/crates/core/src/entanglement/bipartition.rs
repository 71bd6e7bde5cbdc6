use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::PartyDims;

/// A split of `n_parties` into `left` and its complement.
///
/// Stored canonically: `left` never contains the highest-index party, so each
/// split has exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
    n_parties: usize,
    label: String,
}

impl Bipartition {
    pub fn new(mut side: Vec<usize>, n_parties: usize) -> Result<Self> {
        if n_parties < 2 {
            return Err(Error::InvalidParties(format!(
                "a bipartition needs at least 2 parties, got {n_parties}"
            )));
        }
        side.sort_unstable();
        side.dedup();
        if side.is_empty() || side.len() >= n_parties || side.iter().any(|&p| p >= n_parties) {
            return Err(Error::InvalidParties(format!(
                "{side:?} is not a nonempty proper subset of {n_parties} parties"
            )));
        }
        let other: Vec<usize> = (0..n_parties).filter(|p| !side.contains(p)).collect();
        let (left, right) = if side.contains(&(n_parties - 1)) {
            (other, side)
        } else {
            (side, other)
        };
        let name = |v: &[usize]| v.iter().map(|&p| PartyDims::label(p)).collect::<String>();
        let label = format!("{}|{}", name(&left), name(&right));
        Ok(Self {
            left,
            right,
            n_parties,
            label,
        })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// All `2^(n-1) - 1` bipartitions of `n` parties, smaller left sides first.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::InvalidParties(format!(
            "bipartitions need at least 2 parties, got {n}"
        )));
    }
    if n > 20 {
        return Err(Error::InvalidParties(format!(
            "{n} parties is too many to enumerate"
        )));
    }
    let mut masks: Vec<u32> = (1..(1u32 << (n - 1))).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
        .into_iter()
        .map(|m| Bipartition::new((0..n).filter(|&p| m & (1 << p) != 0).collect(), n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(enumerate_bipartitions(2).unwrap().len(), 1);
        let three = enumerate_bipartitions(3).unwrap();
        let labels: Vec<&str> = three.iter().map(|b| b.label()).collect();
        assert_eq!(labels, vec!["A|BC", "B|AC", "AB|C"]);
        assert_eq!(enumerate_bipartitions(4).unwrap().len(), 7);
        assert!(enumerate_bipartitions(1).is_err());
        assert!(enumerate_bipartitions(0).is_err());
    }

    #[test]
    fn no_duplicates_up_to_eight() {
        for n in 2..=8 {
            let all = enumerate_bipartitions(n).unwrap();
            assert_eq!(all.len(), (1 << (n - 1)) - 1);
            let set: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            assert!(all.iter().all(|b| !b.left().contains(&(n - 1))));
        }
    }

    #[test]
    fn canonical_form() {
        let a = Bipartition::new(vec![2], 3).unwrap();
        let b = Bipartition::new(vec![1, 0], 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.left(), &[0, 1]);
        assert_eq!(a.right(), &[2]);
        assert!(Bipartition::new(vec![], 3).is_err());
        assert!(Bipartition::new(vec![0, 1, 2], 3).is_err());
        assert!(Bipartition::new(vec![3], 3).is_err());
    }
}
