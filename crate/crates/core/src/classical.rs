//! Exact evaluation of classical strategies.

use crate::error::{Error, Result};
use crate::model::{exit_probability, DriveProblem, Strategy};

/// Slack allowed outside `[0, 1]` before a computed probability is treated
/// as a bug rather than rounding.
const CLAMP_SLACK: f64 = 1e-15;
const SUM_TOLERANCE: f64 = 1e-9;

/// Probability of ending at each of the `k` destinations.
#[derive(Debug, Clone, PartialEq)]
pub struct DestinationDistribution {
    probs: Vec<f64>,
}

impl DestinationDistribution {
    /// Validates entries and normalization. Entries within `1e-15` outside
    /// `[0, 1]` are clamped.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Internal("empty distribution".into()));
        }
        for p in probs.iter_mut() {
            if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(p) {
                return Err(Error::Internal(format!("probability {p} out of range")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Internal(format!("distribution sums to {total}")));
        }
        Ok(DestinationDistribution { probs })
    }

    /// Builds the empirical distribution of destination counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::NoTrials);
        }
        DestinationDistribution::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of the 1-based destination `d`.
    pub fn prob(&self, d: usize) -> f64 {
        self.probs[d - 1]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Expected value of `payoffs` under this distribution.
    pub fn expectation(&self, payoffs: &[f64]) -> Result<f64> {
        if payoffs.len() != self.probs.len() {
            return Err(Error::Mismatch { strategy: self.probs.len() - 1, problem: payoffs.len() - 1 });
        }
        Ok(self.probs.iter().zip(payoffs).map(|(p, v)| p * v).sum())
    }

    pub fn total_variation(&self, other: &DestinationDistribution) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// Destination distribution of a classical strategy.
///
/// Destination `i <= m` is reached with `prod_{j<i}(1 - p_j) * p_i` and the
/// terminal with `prod_j (1 - p_j)`.
pub fn destination_distribution(problem: &DriveProblem, strategy: &Strategy) -> Result<DestinationDistribution> {
    if !strategy.is_classical() {
        return Err(Error::NoStepwiseMarginal);
    }
    let m = problem.num_intersections();
    strategy.check_dimensions(m)?;
    let k = problem.num_destinations();

    let mut probs = Vec::with_capacity(k);
    let mut reach = 1.0;
    for i in 1..=m {
        let p = exit_probability(strategy, i, k)?;
        probs.push(reach * p);
        reach *= 1.0 - p;
    }
    probs.push(reach);
    DestinationDistribution::new(probs)
}

/// Expected payoff of a classical strategy.
pub fn expected_payoff(problem: &DriveProblem, strategy: &Strategy) -> Result<f64> {
    destination_distribution(problem, strategy)?.expectation(&problem.payoffs())
}

/// A polynomial `sum_j coeffs[j] * alpha^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffPolynomial {
    coeffs: Vec<f64>,
}

impl PayoffPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PayoffPolynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        PayoffPolynomial { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree ignoring exactly-zero leading coefficients. The zero
    /// polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> PayoffPolynomial {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect::<Vec<_>>();
        if coeffs.is_empty() {
            PayoffPolynomial::constant(0.0)
        } else {
            PayoffPolynomial { coeffs }
        }
    }

    pub fn add(&self, other: &PayoffPolynomial) -> PayoffPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|j| self.coeffs.get(j).copied().unwrap_or(0.0) + other.coeffs.get(j).copied().unwrap_or(0.0))
            .collect();
        PayoffPolynomial { coeffs }
    }

    pub fn scale(&self, factor: f64) -> PayoffPolynomial {
        PayoffPolynomial { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn mul(&self, other: &PayoffPolynomial) -> PayoffPolynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PayoffPolynomial { coeffs }
    }

    /// True when every coefficient (zero-padded) is within `tol`.
    pub fn approx_eq(&self, other: &PayoffPolynomial, tol: f64) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|j| {
            let a = self.coeffs.get(j).copied().unwrap_or(0.0);
            let b = other.coeffs.get(j).copied().unwrap_or(0.0);
            (a - b).abs() <= tol
        })
    }
}

/// Expected payoff of `Stationary(alpha)` as a polynomial in `alpha`:
/// `sum_i v_i (1 - alpha)^(i-1) alpha + v_terminal (1 - alpha)^m`.
///
/// The result always has `m + 1` coefficients, even when the top ones
/// cancel to zero.
pub fn stationary_payoff_polynomial(problem: &DriveProblem) -> PayoffPolynomial {
    let m = problem.num_intersections();
    let stay = PayoffPolynomial::new(vec![1.0, -1.0]);
    let exit = PayoffPolynomial::new(vec![0.0, 1.0]);

    let mut total = PayoffPolynomial::new(vec![0.0; m + 1]);
    // (1 - alpha)^(i-1)
    let mut stay_pow = PayoffPolynomial::constant(1.0);
    for &v in problem.exit_payoffs() {
        total = total.add(&stay_pow.mul(&exit).scale(v));
        stay_pow = stay_pow.mul(&stay);
    }
    total.add(&stay_pow.scale(problem.terminal_payoff()))
}
