//! Absent-minded driver decision problems.
//!
//! A driver on a highway passes `m` intersections that all look the same.
//! At each one the driver either exits or continues. Missing every exit
//! ends the trip at the terminal destination. That gives `k = m + 1`
//! destinations in total. This crate evaluates and optimizes strategies
//! for that setting:
//!
//! * [`model`]: problem instances and strategy descriptions.
//! * [`classical`]: exact destination distributions, expected payoffs, and
//!   the stationary payoff polynomial in the exit probability `alpha`.
//! * [`quantum`]: a dense statevector with the first-zero exit rule.
//! * [`optimize`]: maximization over `alpha` in `[0, 1]`.
//! * [`selection`]: the two-round "pick two of n" generalization.
//! * [`monte_carlo`]: a seeded simulation oracle.
//! * [`scenario`]: scenario documents, presets, CSV output and the
//!   command runner behind the `amdriver` binary.

pub mod classical;
pub mod error;
pub mod model;
pub mod monte_carlo;
pub mod optimize;
pub mod quantum;
pub mod scenario;
pub mod selection;

pub use classical::{
    destination_distribution, expected_payoff, stationary_payoff_polynomial,
    DestinationDistribution, PayoffPolynomial,
};
pub use error::{Error, Result};
pub use model::{exit_probability, make_drive_problem, DriveProblem, Probability, SelectionProblem, Strategy};
pub use monte_carlo::{estimate_payoff, simulate_drive, SimulationReport};
pub use optimize::{maximize_polynomial, numeric_maximize, optimize_stationary, Method, OptimizationResult};
pub use quantum::{build_state, first_zero_distribution, product_state, quantum_expected_payoff, BasisTerm, StateVector};
pub use selection::{
    optimize_two_round, residual_problem, selection_improvement, two_round_average_polynomial,
    two_round_counting_total, Residual, RoundBreakdown,
};
