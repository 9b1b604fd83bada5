//! Two-round selection: choose two of `n` destinations in sequence.
//!
//! The first round's choice is averaged with weight `1/n` for every
//! destination, whatever strategy is used. The chosen destination is then
//! removed and the second round is played as a highway over the rest, with
//! the last remaining destination as the terminal.

use crate::classical::{destination_distribution, stationary_payoff_polynomial, PayoffPolynomial};
use crate::error::{Error, Result};
use crate::model::{DriveProblem, SelectionProblem, Strategy};
use crate::optimize::{maximize_polynomial, OptimizationResult};

/// The second-round problem after removing one destination.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Drive(DriveProblem),
    /// Only one destination is left, so the outcome is forced.
    Forced { payoff: f64 },
}

impl Residual {
    pub fn payoffs(&self) -> Vec<f64> {
        match self {
            Residual::Drive(p) => p.payoffs(),
            Residual::Forced { payoff } => vec![*payoff],
        }
    }

    pub fn stationary_polynomial(&self) -> PayoffPolynomial {
        match self {
            Residual::Drive(p) => stationary_payoff_polynomial(p),
            Residual::Forced { payoff } => PayoffPolynomial::constant(*payoff),
        }
    }

    /// Expected payoff of the counting strategy, which reaches every
    /// remaining destination with equal probability.
    pub fn counting_payoff(&self) -> Result<f64> {
        match self {
            Residual::Drive(p) => destination_distribution(p, &Strategy::Counting)?.expectation(&p.payoffs()),
            Residual::Forced { payoff } => Ok(*payoff),
        }
    }
}

/// Removes the 1-based destination `removed` and keeps the others in order.
pub fn residual_problem(problem: &DriveProblem, removed: usize) -> Result<Residual> {
    let k = problem.num_destinations();
    if removed == 0 || removed > k {
        return Err(Error::BadDestination { index: removed, destinations: k });
    }
    let mut rest = problem.payoffs();
    rest.remove(removed - 1);
    match rest.as_slice() {
        [only] => Ok(Residual::Forced { payoff: *only }),
        _ => Ok(Residual::Drive(DriveProblem::from_destinations(&rest)?)),
    }
}

/// Totals for one first-round choice.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundBreakdown {
    pub first_choice: usize,
    pub first_payoff: f64,
    pub second_round_polynomial: PayoffPolynomial,
    /// `first_payoff + second_round_polynomial`.
    pub total_polynomial: PayoffPolynomial,
}

/// Per-first-choice totals under the stationary strategy.
pub fn two_round_breakdown(sel: &SelectionProblem) -> Vec<RoundBreakdown> {
    let problem = sel.as_drive_problem();
    sel.destination_payoffs()
        .iter()
        .enumerate()
        .map(|(i, &first_payoff)| {
            let residual = residual_problem(&problem, i + 1).expect("index in range");
            let second = residual.stationary_polynomial();
            let total = second.add(&PayoffPolynomial::constant(first_payoff));
            RoundBreakdown { first_choice: i + 1, first_payoff, second_round_polynomial: second, total_polynomial: total }
        })
        .collect()
}

/// `(1/n) sum_i [v_i + P_i(alpha)]` where `P_i` is the stationary payoff
/// polynomial of the problem left after removing destination `i`.
pub fn two_round_average_polynomial(sel: &SelectionProblem) -> PayoffPolynomial {
    let n = sel.len() as f64;
    two_round_breakdown(sel)
        .iter()
        .fold(PayoffPolynomial::constant(0.0), |acc, b| acc.add(&b.total_polynomial))
        .scale(1.0 / n)
}

pub fn optimize_two_round(sel: &SelectionProblem) -> OptimizationResult {
    maximize_polynomial(&two_round_average_polynomial(sel))
}

/// First-round payoff and the counting strategy's expected second-round
/// payoff for one first choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingChoice {
    pub first_choice: usize,
    pub first_payoff: f64,
    pub second_payoff: f64,
}

impl CountingChoice {
    pub fn total(&self) -> f64 {
        self.first_payoff + self.second_payoff
    }
}

pub fn two_round_counting_breakdown(sel: &SelectionProblem) -> Result<Vec<CountingChoice>> {
    let problem = sel.as_drive_problem();
    sel.destination_payoffs()
        .iter()
        .enumerate()
        .map(|(i, &first_payoff)| {
            let second_payoff = residual_problem(&problem, i + 1)?.counting_payoff()?;
            Ok(CountingChoice { first_choice: i + 1, first_payoff, second_payoff })
        })
        .collect()
}

/// Average two-round total when the second round uses the counting strategy.
pub fn two_round_counting_total(sel: &SelectionProblem) -> Result<f64> {
    let choices = two_round_counting_breakdown(sel)?;
    Ok(choices.iter().map(CountingChoice::total).sum::<f64>() / sel.len() as f64)
}

/// Counting total minus the optimized stationary total. Negative when the
/// stationary strategy wins.
pub fn selection_improvement(sel: &SelectionProblem) -> Result<f64> {
    Ok(two_round_counting_total(sel)? - optimize_two_round(sel).payoff_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_drive_problem;

    fn example() -> SelectionProblem {
        SelectionProblem::new(vec![0.0, 4.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn residuals_of_example2() {
        let p = example().as_drive_problem();
        let b = residual_problem(&p, 2).unwrap();
        assert_eq!(b, Residual::Drive(make_drive_problem(&[0.0, 1.0], 1.0).unwrap()));
        let d = residual_problem(&p, 4).unwrap();
        assert_eq!(d, Residual::Drive(make_drive_problem(&[0.0, 4.0], 1.0).unwrap()));
        assert!(matches!(residual_problem(&p, 0), Err(Error::BadDestination { .. })));
        assert!(matches!(residual_problem(&p, 5), Err(Error::BadDestination { .. })));
    }

    #[test]
    fn two_destinations_leave_a_forced_outcome() {
        let p = make_drive_problem(&[3.0], 8.0).unwrap();
        let r = residual_problem(&p, 1).unwrap();
        assert_eq!(r, Residual::Forced { payoff: 8.0 });
        assert_eq!(r.stationary_polynomial().coeffs(), &[8.0]);
        assert_eq!(r.counting_payoff().unwrap(), 8.0);
    }

    #[test]
    fn per_choice_totals() {
        let b = two_round_breakdown(&example());
        assert_eq!(b[0].total_polynomial.coeffs(), &[1.0, 3.0, 0.0]);
        assert_eq!(b[1].total_polynomial.coeffs(), &[5.0, -1.0, 0.0]);
        assert_eq!(b[2].total_polynomial.coeffs(), &[2.0, 2.0, -3.0]);
        assert_eq!(b[3].total_polynomial.coeffs(), &[2.0, 2.0, -3.0]);
        for x in &b {
            assert!(x
                .total_polynomial
                .approx_eq(&x.second_round_polynomial.add(&PayoffPolynomial::constant(x.first_payoff)), 0.0));
        }
    }

    #[test]
    fn averaged_polynomial_and_optimum() {
        let avg = two_round_average_polynomial(&example());
        assert!(avg.approx_eq(&PayoffPolynomial::new(vec![2.5, 1.5, -1.5]), 1e-12));
        let r = optimize_two_round(&example());
        assert!((r.alpha_star - 0.5).abs() < 1e-12);
        assert!((r.payoff_star - 23.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn counting_totals() {
        let c = two_round_counting_breakdown(&example()).unwrap();
        let want = [(0.0, 2.0), (4.0, 2.0 / 3.0), (1.0, 5.0 / 3.0), (1.0, 5.0 / 3.0)];
        for (got, (first, second)) in c.iter().zip(want) {
            assert_eq!(got.first_payoff, first);
            assert!((got.second_payoff - second).abs() < 1e-12);
        }
        assert!((two_round_counting_total(&example()).unwrap() - 3.0).abs() < 1e-12);
        assert!((selection_improvement(&example()).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn equal_payoffs() {
        let sel = SelectionProblem::new(vec![1.5; 5]).unwrap();
        let r = optimize_two_round(&sel);
        assert_eq!(r.alpha_star, 0.0);
        assert!((r.payoff_star - 3.0).abs() < 1e-12);
        assert!((two_round_counting_total(&sel).unwrap() - 3.0).abs() < 1e-12);
        assert!(selection_improvement(&sel).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_payoffs_give_zero_polynomial() {
        let sel = SelectionProblem::new(vec![0.0; 4]).unwrap();
        assert!(two_round_average_polynomial(&sel).coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn two_destination_selection() {
        let sel = SelectionProblem::new(vec![2.0, 6.0]).unwrap();
        assert_eq!(two_round_average_polynomial(&sel).coeffs(), &[8.0]);
        assert_eq!(two_round_counting_total(&sel).unwrap(), 8.0);
    }
}
