//! Problem instances and strategy descriptions.
//!
//! Destinations are numbered from 1. Destination `i <= m` means "exit at
//! intersection `i`"; destination `k = m + 1` is the terminal reached by
//! driving past every exit.

use std::fmt;

use crate::error::{Error, Result};
use crate::quantum::StateVector;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(Error::InvalidProbability(p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Probability::new(p)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_payoffs(payoffs: &[f64]) -> Result<()> {
    match payoffs.iter().find(|v| !v.is_finite()) {
        Some(&v) => Err(Error::InvalidPayoff(v)),
        None => Ok(()),
    }
}

/// A linear highway: one payoff per intersection plus the terminal payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProblem {
    exit_payoffs: Vec<f64>,
    terminal_payoff: f64,
}

impl DriveProblem {
    pub fn new(exit_payoffs: Vec<f64>, terminal_payoff: f64) -> Result<Self> {
        if exit_payoffs.is_empty() {
            return Err(Error::DegenerateProblem);
        }
        check_payoffs(&exit_payoffs)?;
        check_payoffs(&[terminal_payoff])?;
        Ok(DriveProblem { exit_payoffs, terminal_payoff })
    }

    /// Treats the last payoff as the terminal and the rest as exits.
    pub fn from_destinations(payoffs: &[f64]) -> Result<Self> {
        match payoffs.split_last() {
            Some((&terminal, exits)) => DriveProblem::new(exits.to_vec(), terminal),
            None => Err(Error::DegenerateProblem),
        }
    }

    pub fn exit_payoffs(&self) -> &[f64] {
        &self.exit_payoffs
    }

    pub fn terminal_payoff(&self) -> f64 {
        self.terminal_payoff
    }

    /// Number of intersections `m`.
    pub fn num_intersections(&self) -> usize {
        self.exit_payoffs.len()
    }

    /// Number of destinations `k = m + 1`.
    pub fn num_destinations(&self) -> usize {
        self.exit_payoffs.len() + 1
    }

    /// Payoffs of all `k` destinations in order, terminal last.
    pub fn payoffs(&self) -> Vec<f64> {
        let mut all = self.exit_payoffs.clone();
        all.push(self.terminal_payoff);
        all
    }

    /// Payoff of the 1-based destination `d`.
    pub fn destination_payoff(&self, d: usize) -> Result<f64> {
        let k = self.num_destinations();
        match d {
            d if d >= 1 && d < k => Ok(self.exit_payoffs[d - 1]),
            d if d == k => Ok(self.terminal_payoff),
            _ => Err(Error::BadDestination { index: d, destinations: k }),
        }
    }

    /// Multiplies every payoff by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        DriveProblem::new(
            self.exit_payoffs.iter().map(|v| v * factor).collect(),
            self.terminal_payoff * factor,
        )
    }
}

/// Validating constructor for [`DriveProblem`].
pub fn make_drive_problem(exit_payoffs: &[f64], terminal_payoff: f64) -> Result<DriveProblem> {
    DriveProblem::new(exit_payoffs.to_vec(), terminal_payoff)
}

/// The "choose two of n" problem. Exactly two rounds are played.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionProblem {
    destination_payoffs: Vec<f64>,
}

impl SelectionProblem {
    pub const ROUNDS: usize = 2;

    pub fn new(destination_payoffs: Vec<f64>) -> Result<Self> {
        if destination_payoffs.len() < 2 {
            return Err(Error::DegenerateProblem);
        }
        check_payoffs(&destination_payoffs)?;
        Ok(SelectionProblem { destination_payoffs })
    }

    pub fn destination_payoffs(&self) -> &[f64] {
        &self.destination_payoffs
    }

    /// Number of destinations `n`.
    pub fn len(&self) -> usize {
        self.destination_payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.destination_payoffs.is_empty()
    }

    /// The first round as a highway: the last destination is the terminal.
    pub fn as_drive_problem(&self) -> DriveProblem {
        DriveProblem::from_destinations(&self.destination_payoffs)
            .expect("selection problems have at least two finite payoffs")
    }
}

/// How the driver decides at each intersection.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Exit with the same probability everywhere.
    Stationary { alpha: Probability },
    /// Exit at intersection `i` with probability `1 / (k - i + 1)`. Needs the
    /// intersection count, which the evaluator supplies.
    Counting,
    /// One exit probability per intersection.
    PerStep { exit_probs: Vec<Probability> },
    /// Measure qubit `i` at intersection `i` and exit on the first 0.
    Quantum { state: StateVector },
}

impl Strategy {
    pub fn stationary(alpha: f64) -> Result<Self> {
        Ok(Strategy::Stationary { alpha: Probability::new(alpha)? })
    }

    pub fn per_step(exit_probs: &[f64]) -> Result<Self> {
        let exit_probs = exit_probs.iter().map(|&p| Probability::new(p)).collect::<Result<_>>()?;
        Ok(Strategy::PerStep { exit_probs })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Strategy::Stationary { .. } => "stationary",
            Strategy::Counting => "counting",
            Strategy::PerStep { .. } => "per_step",
            Strategy::Quantum { .. } => "quantum",
        }
    }

    pub fn is_classical(&self) -> bool {
        !matches!(self, Strategy::Quantum { .. })
    }

    /// Checks that the strategy fits a problem with `m` intersections.
    pub fn check_dimensions(&self, m: usize) -> Result<()> {
        let steps = match self {
            Strategy::Stationary { .. } | Strategy::Counting => return Ok(()),
            Strategy::PerStep { exit_probs } => exit_probs.len(),
            Strategy::Quantum { state } => state.num_qubits(),
        };
        if steps == m {
            Ok(())
        } else {
            Err(Error::Mismatch { strategy: steps, problem: m })
        }
    }
}

/// Exit probability at the 1-based intersection `i` when there are `k`
/// destinations.
pub fn exit_probability(strategy: &Strategy, i: usize, k: usize) -> Result<f64> {
    if i == 0 || i >= k {
        return Err(Error::BadIndex { index: i, destinations: k });
    }
    match strategy {
        Strategy::Stationary { alpha } => Ok(alpha.get()),
        Strategy::Counting => Ok(1.0 / (k - i + 1) as f64),
        Strategy::PerStep { exit_probs } => {
            if exit_probs.len() != k - 1 {
                return Err(Error::Mismatch { strategy: exit_probs.len(), problem: k - 1 });
            }
            Ok(exit_probs[i - 1].get())
        }
        Strategy::Quantum { .. } => Err(Error::NoStepwiseMarginal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::product_state;

    #[test]
    fn worked_examples_have_expected_destination_counts() {
        let ex1 = make_drive_problem(&[0.0, 4.0], 1.0).unwrap();
        assert_eq!(ex1.num_destinations(), 3);
        let ex2 = make_drive_problem(&[0.0, 4.0, 1.0], 1.0).unwrap();
        assert_eq!(ex2.num_destinations(), 4);
        assert_eq!(ex2.payoffs(), vec![0.0, 4.0, 1.0, 1.0]);
        assert_eq!(ex2.destination_payoff(4).unwrap(), 1.0);
        assert!(ex2.destination_payoff(5).is_err());
    }

    #[test]
    fn rejects_bad_problems() {
        let err = make_drive_problem(&[], 1.0).unwrap_err();
        assert_eq!(err, Error::DegenerateProblem);
        assert_eq!(err.to_string(), "degenerate problem");
        assert!(matches!(make_drive_problem(&[f64::NAN], 1.0), Err(Error::InvalidPayoff(_))));
        assert!(matches!(make_drive_problem(&[1.0], f64::INFINITY), Err(Error::InvalidPayoff(_))));
        assert!(SelectionProblem::new(vec![1.0]).is_err());
    }

    #[test]
    fn counting_exit_probabilities() {
        assert_eq!(exit_probability(&Strategy::Counting, 1, 4).unwrap(), 0.25);
        assert_eq!(exit_probability(&Strategy::Counting, 3, 4).unwrap(), 0.5);
        assert_eq!(exit_probability(&Strategy::Counting, 2, 4).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn stationary_zero_never_exits() {
        let s = Strategy::stationary(0.0).unwrap();
        for i in 1..6 {
            assert_eq!(exit_probability(&s, i, 6).unwrap(), 0.0);
        }
    }

    #[test]
    fn exit_probability_errors() {
        let q = Strategy::Quantum { state: product_state(Probability::new(0.5).unwrap(), 2).unwrap() };
        assert_eq!(exit_probability(&q, 1, 3), Err(Error::NoStepwiseMarginal));
        assert!(matches!(exit_probability(&Strategy::Counting, 0, 3), Err(Error::BadIndex { .. })));
        assert!(matches!(exit_probability(&Strategy::Counting, 3, 3), Err(Error::BadIndex { .. })));
        let p = Strategy::per_step(&[0.1, 0.2]).unwrap();
        assert_eq!(exit_probability(&p, 2, 3).unwrap(), 0.2);
        assert!(matches!(exit_probability(&p, 1, 4), Err(Error::Mismatch { .. })));
    }

    #[test]
    fn probability_bounds() {
        assert!(Probability::new(-0.01).is_err());
        assert!(Probability::new(1.01).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert!(Strategy::per_step(&[0.5, 2.0]).is_err());
    }

    #[test]
    fn counting_product_is_uniform() {
        for k in 2..=12usize {
            for i in 1..=k {
                let mut reach = 1.0;
                for j in 1..i {
                    reach *= 1.0 - exit_probability(&Strategy::Counting, j, k).unwrap();
                }
                let take = if i < k { exit_probability(&Strategy::Counting, i, k).unwrap() } else { 1.0 };
                assert!((reach * take - 1.0 / k as f64).abs() < 1e-12, "k={k} i={i}");
            }
        }
    }
}
