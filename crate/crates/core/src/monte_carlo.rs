//! Seeded simulation of strategies, used as an oracle for the exact
//! evaluators.
//!
//! Trials run in blocks of [`BLOCK_SIZE`]. Block `b` draws from ChaCha8
//! keyed by the seed with stream id `b`, so a report depends only on
//! `(seed, trials, problem, strategy)` and never on how blocks are
//! scheduled across threads. Per-block results are destination counts,
//! merged in block order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classical::DestinationDistribution;
use crate::error::{Error, Result};
use crate::model::{exit_probability, DriveProblem, Strategy};
use crate::quantum::first_zero_destination;

pub const BLOCK_SIZE: u64 = 1 << 16;

/// Generator name, for reports and docs.
pub const RNG_NAME: &str = "ChaCha8 (key = seed, stream = block index)";

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub trials: u64,
    pub mean_payoff: f64,
    pub std_error: f64,
    pub empirical_distribution: DestinationDistribution,
    pub seed: u64,
}

/// A strategy prepared for repeated sampling.
#[derive(Debug, Clone)]
enum Sampler {
    Walk { exit_probs: Vec<f64> },
    Basis { cdf: Vec<f64>, destinations: Vec<usize> },
}

impl Sampler {
    fn new(problem: &DriveProblem, strategy: &Strategy) -> Result<Self> {
        let m = problem.num_intersections();
        strategy.check_dimensions(m)?;
        let k = problem.num_destinations();
        match strategy {
            Strategy::Quantum { state } => {
                let mut acc = 0.0;
                let cdf = state
                    .probabilities()
                    .into_iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                let destinations = (0..1usize << m).map(|i| first_zero_destination(i, m)).collect();
                Ok(Sampler::Basis { cdf, destinations })
            }
            _ => {
                let exit_probs = (1..=m).map(|i| exit_probability(strategy, i, k)).collect::<Result<_>>()?;
                Ok(Sampler::Walk { exit_probs })
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            Sampler::Walk { exit_probs } => {
                for (i, &p) in exit_probs.iter().enumerate() {
                    if rng.random::<f64>() < p {
                        return i + 1;
                    }
                }
                exit_probs.len() + 1
            }
            Sampler::Basis { cdf, destinations } => {
                let total = *cdf.last().expect("non-empty state");
                let u = rng.random::<f64>() * total;
                let index = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                destinations[index]
            }
        }
    }
}

/// Drives once and returns the 1-based destination reached.
///
/// Classical strategies walk the intersections drawing an exit decision at
/// each. Quantum strategies draw one basis string with probability
/// `|amplitude|^2` and apply the first-zero rule.
pub fn simulate_drive<R: RngCore + ?Sized>(problem: &DriveProblem, strategy: &Strategy, rng: &mut R) -> Result<usize> {
    Ok(Sampler::new(problem, strategy)?.sample(rng))
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn run_block(sampler: &Sampler, k: usize, seed: u64, block: u64, trials: u64) -> Vec<u64> {
    let mut rng = block_rng(seed, block);
    let mut counts = vec![0u64; k];
    for _ in 0..trials {
        counts[sampler.sample(&mut rng) - 1] += 1;
    }
    counts
}

/// Monte Carlo estimate of the expected payoff, run across threads.
pub fn estimate_payoff(problem: &DriveProblem, strategy: &Strategy, trials: u64, seed: u64) -> Result<SimulationReport> {
    estimate_payoff_with(problem, strategy, trials, seed, true)
}

/// As [`estimate_payoff`], choosing whether blocks run in parallel. Both
/// modes give bit-identical reports.
pub fn estimate_payoff_with(
    problem: &DriveProblem,
    strategy: &Strategy,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let sampler = Sampler::new(problem, strategy)?;
    let k = problem.num_destinations();
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let block_len = |b: u64| BLOCK_SIZE.min(trials - b * BLOCK_SIZE);

    let per_block: Vec<Vec<u64>> = if parallel {
        (0..blocks).into_par_iter().map(|b| run_block(&sampler, k, seed, b, block_len(b))).collect()
    } else {
        (0..blocks).map(|b| run_block(&sampler, k, seed, b, block_len(b))).collect()
    };
    let counts = per_block.iter().fold(vec![0u64; k], |mut acc, block| {
        acc.iter_mut().zip(block).for_each(|(a, c)| *a += c);
        acc
    });

    let payoffs = problem.payoffs();
    let n = trials as f64;
    let mean_payoff = counts.iter().zip(&payoffs).map(|(&c, v)| c as f64 * v).sum::<f64>() / n;
    let variance = if trials > 1 {
        counts.iter().zip(&payoffs).map(|(&c, v)| c as f64 * (v - mean_payoff).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(SimulationReport {
        trials,
        mean_payoff,
        std_error: (variance / n).sqrt(),
        empirical_distribution: DestinationDistribution::from_counts(&counts)?,
        seed,
    })
}
