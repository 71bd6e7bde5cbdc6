//! Seeded Monte Carlo over a protocol's exact outcome tree.
//!
//! Shot `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so
//! the result does not depend on how shots are split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ProtocolConfig;
use super::prop1::run_prop1;
use super::prop2::run_prop2;
use super::prop3::run_prop3;
use super::report::BranchRecord;
use super::sigma::SigmaSetup;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const PROTOCOL_NAMES: [&str; 4] = ["prop1", "prop2", "prop3", "sigma"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchFrequency {
    pub label: String,
    pub exact_probability: f64,
    pub count: u64,
    pub frequency: f64,
    pub success: bool,
    pub copies_consumed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub protocol: String,
    pub shots: u64,
    pub seed: u64,
    pub success_rate: f64,
    pub exact_success_prob: f64,
    pub mean_copies_consumed: f64,
    pub branches: Vec<BranchFrequency>,
}

impl MonteCarloSummary {
    /// Empirical and exact probability of the branches matching `pred`.
    pub fn frequency_where(&self, pred: impl Fn(&BranchFrequency) -> bool) -> (f64, f64) {
        self.branches
            .iter()
            .filter(|b| pred(b))
            .fold((0.0, 0.0), |(f, e), b| {
                (f + b.frequency, e + b.exact_probability)
            })
    }

    /// Fraction of shots that succeeded using at most `copies` copies.
    pub fn success_within(&self, copies: usize) -> f64 {
        self.frequency_where(|b| b.success && b.copies_consumed <= copies)
            .0
    }
}

enum Sampler {
    Leaves(Vec<f64>),
    Sigma(Box<SigmaSetup<f64>>),
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Sampler::Leaves(cdf) => {
                let u: f64 = rng.gen::<f64>() * cdf[cdf.len() - 1];
                cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
            }
            Sampler::Sigma(s) => s.sample(rng).2,
        }
    }
}

/// Exact terminal branches of a named protocol.
pub fn protocol_branches<T: Real>(
    protocol: &str,
    config: &ProtocolConfig<T>,
) -> Result<Vec<BranchRecord<T>>> {
    match protocol {
        "prop1" => Ok(run_prop1(config, 0)?.branches),
        "prop2" => Ok(run_prop2(config)?.branches),
        "prop3" => Ok(run_prop3(config)?.branches),
        "sigma" => Ok(SigmaSetup::new(config)?.branches()),
        other => Err(Error::UnknownProtocol(other.to_string())),
    }
}

fn to_f64_config<T: Real>(c: &ProtocolConfig<T>) -> ProtocolConfig<f64> {
    ProtocolConfig {
        p: c.p.as_f64(),
        weights: c.weights.map(|w| w.as_f64()),
        schmidt_coeffs: c
            .schmidt_coeffs
            .as_ref()
            .map(|v| v.iter().map(|x| x.as_f64()).collect()),
        shots: c.shots,
        seed: c.seed,
        max_copies: c.max_copies,
        rounds: c.rounds,
        sigma_mode: c.sigma_mode,
    }
}

/// Runs `shots` independent shots of `protocol` (one of [`PROTOCOL_NAMES`]).
pub fn monte_carlo<T: Real>(
    protocol: &str,
    config: &ProtocolConfig<T>,
    shots: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    if !PROTOCOL_NAMES.contains(&protocol) {
        return Err(Error::UnknownProtocol(protocol.to_string()));
    }
    // sampling runs in double precision whatever the simulation scalar
    let branches = protocol_branches(protocol, config)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.probability.as_f64()).collect();
    let sampler = if protocol == "sigma" {
        Sampler::Sigma(Box::new(SigmaSetup::new(&to_f64_config(config))?))
    } else {
        let mut acc = 0.0;
        Sampler::Leaves(
            probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect(),
        )
    };

    let n = branches.len();
    let counts = (0..shots)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, shot| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shot);
                acc[sampler.draw(&mut rng)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let total = shots as f64;
    let rows: Vec<BranchFrequency> = branches
        .iter()
        .zip(&probs)
        .zip(&counts)
        .map(|((b, &p), &c)| BranchFrequency {
            label: b.label.clone(),
            exact_probability: p,
            count: c,
            frequency: c as f64 / total,
            success: b.success,
            copies_consumed: b.copies_consumed,
        })
        .collect();
    let successes: u64 = rows.iter().filter(|r| r.success).map(|r| r.count).sum();
    let copies: u64 = rows
        .iter()
        .map(|r| r.count * r.copies_consumed as u64)
        .sum();
    Ok(MonteCarloSummary {
        protocol: protocol.to_string(),
        shots,
        seed,
        success_rate: successes as f64 / total,
        exact_success_prob: rows
            .iter()
            .filter(|r| r.success)
            .map(|r| r.exact_probability)
            .sum(),
        mean_copies_consumed: copies as f64 / total,
        branches: rows,
    })
}
