use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which first-copy outcomes the adaptive σ protocol keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// Both outcomes of Alice's first measurement are followed.
    Unconditioned,
    /// The first copy is conditioned on the A–B Bell pair, so the repeat
    /// phase succeeds with probability `p` per copy.
    ConditionedOnAb,
}

/// Parameters shared by every runner. Fields a runner does not use are
/// ignored by it but still validated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig<T: Real> {
    /// Mixing weight of the two-term states.
    pub p: T,
    /// Weights of the three terms of the four-party state.
    pub weights: [T; 3],
    /// Schmidt coefficients of the bipartite building block; `None` means
    /// uniform for whatever local dimension the protocol uses.
    pub schmidt_coeffs: Option<Vec<T>>,
    pub shots: u64,
    pub seed: u64,
    /// Upper bound on copies consumed by the adaptive σ protocol.
    pub max_copies: usize,
    /// Recurrence rounds for the two-qubit residuals of the qubit protocol.
    pub rounds: usize,
    pub sigma_mode: SigmaMode,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SHOTS: u64 = 100_000;

impl<T: Real> Default for ProtocolConfig<T> {
    fn default() -> Self {
        let third = T::one() / T::lit(3.0);
        Self {
            p: T::lit(0.5),
            weights: [third; 3],
            schmidt_coeffs: None,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            max_copies: 21,
            rounds: 3,
            sigma_mode: SigmaMode::Unconditioned,
        }
    }
}

impl<T: Real> ProtocolConfig<T> {
    pub fn with_p(mut self, p: T) -> Self {
        self.p = p;
        self
    }

    pub fn with_weights(mut self, weights: [T; 3]) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_schmidt(mut self, coeffs: Vec<T>) -> Self {
        self.schmidt_coeffs = Some(coeffs);
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_copies(mut self, max_copies: usize) -> Self {
        self.max_copies = max_copies;
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn with_sigma_mode(mut self, mode: SigmaMode) -> Self {
        self.sigma_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_open_unit("p", self.p)?;
        for (i, &w) in self.weights.iter().enumerate() {
            check_open_unit(&format!("weight p{}", i + 1), w)?;
        }
        let sum: T = self.weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::invariant_tol() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        if let Some(c) = &self.schmidt_coeffs {
            check_schmidt(c)?;
        }
        if self.shots == 0 {
            return Err(Error::Domain("shots must be positive".into()));
        }
        if self.max_copies == 0 {
            return Err(Error::Domain("max_copies must be positive".into()));
        }
        Ok(())
    }

    /// Schmidt coefficients for local dimension `d`: the configured ones
    /// (which must have length `d`) or the uniform vector.
    pub fn schmidt_for(&self, d: usize) -> Result<Vec<T>> {
        match &self.schmidt_coeffs {
            Some(c) if c.len() != d => Err(Error::Domain(format!(
                "expected {d} Schmidt coefficients, got {}",
                c.len()
            ))),
            Some(c) => {
                check_schmidt(c)?;
                Ok(c.clone())
            }
            None => {
                let u = T::one() / T::from_usize(d).expect("small dimension").sqrt();
                Ok(vec![u; d])
            }
        }
    }
}

pub(crate) fn check_open_unit<T: Real>(name: &str, x: T) -> Result<()> {
    if !(x > T::zero() && x < T::one()) {
        return Err(Error::Domain(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

pub(crate) fn check_schmidt<T: Real>(c: &[T]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::Domain("empty Schmidt coefficient list".into()));
    }
    if let Some(x) = c.iter().find(|x| **x <= T::zero() || x.is_nan()) {
        return Err(Error::Premise(format!(
            "Schmidt coefficient {x} is not positive"
        )));
    }
    let s: T = c.iter().map(|x| *x * *x).sum();
    if (s - T::one()).abs() > T::invariant_tol() {
        return Err(Error::NotNormalized(s.sqrt().as_f64()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ProtocolConfig::<f64>::default();
        c.validate().unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.shots, 100_000);
        let u = c.schmidt_for(3).unwrap();
        assert!((u[0] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_values() {
        let c = ProtocolConfig::<f64>::default();
        assert!(c.clone().with_p(0.0).validate().is_err());
        assert!(c.clone().with_p(1.0).validate().is_err());
        assert!(c.clone().with_weights([0.5, 0.5, 0.0]).validate().is_err());
        assert!(c.clone().with_weights([0.4, 0.4, 0.4]).validate().is_err());
        assert!(c.clone().with_schmidt(vec![0.6, 0.6]).validate().is_err());
        assert!(c.clone().with_schmidt(vec![1.0, 0.0]).validate().is_err());
        assert!(c.clone().with_shots(0).validate().is_err());
        assert!(c.clone().with_max_copies(0).validate().is_err());
        assert!(c.with_schmidt(vec![0.6, 0.8]).schmidt_for(3).is_err());
    }
}
