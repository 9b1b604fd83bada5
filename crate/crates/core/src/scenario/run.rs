use std::fmt::Write as _;

use super::format::{emit_csv, fmt_exact, fmt_num, fmt_polynomial, fmt_value, Cell, Table};
use super::{ProblemSpec, Scenario};
use crate::classical::{destination_distribution, stationary_payoff_polynomial, DestinationDistribution, PayoffPolynomial};
use crate::error::Error;
use crate::model::{DriveProblem, SelectionProblem, Strategy};
use crate::monte_carlo::{estimate_payoff, RNG_NAME};
use crate::optimize::{maximize_polynomial, numeric_maximize, OptimizationResult};
use crate::quantum::first_zero_distribution;
use crate::selection::{
    two_round_average_polynomial, two_round_breakdown, two_round_counting_breakdown, two_round_counting_total,
};

const NUMERIC_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Optimize,
    Select,
    Simulate,
    Curve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Optimize => "optimize",
            Command::Select => "select",
            Command::Simulate => "simulate",
            Command::Curve => "curve",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    /// Human-readable report.
    pub text: String,
    /// Machine-readable table.
    pub csv: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// The command cannot run on this kind of problem.
    #[error("`{command}` needs a {needed} problem")]
    ProblemKind { command: &'static str, needed: &'static str },
    #[error(transparent)]
    Eval(#[from] Error),
}

pub fn run_command(command: Command, scenario: &Scenario) -> Result<CommandOutput, RunError> {
    match (command, &scenario.problem) {
        (Command::Eval, ProblemSpec::Drive(p)) => eval(p, scenario),
        (Command::Optimize, ProblemSpec::Drive(p)) => optimize_drive(p, scenario),
        (Command::Optimize, ProblemSpec::Selection(s)) => optimize_selection(s),
        (Command::Select, ProblemSpec::Selection(s)) => select(s),
        (Command::Simulate, ProblemSpec::Drive(p)) => simulate(p, scenario),
        (Command::Curve, problem) => curve(problem, scenario.options.grid_step),
        (Command::Select, ProblemSpec::Drive(_)) => {
            Err(RunError::ProblemKind { command: command.name(), needed: "selection" })
        }
        (Command::Eval | Command::Simulate, ProblemSpec::Selection(_)) => {
            Err(RunError::ProblemKind { command: command.name(), needed: "drive" })
        }
    }
}

fn strategy_distribution(problem: &DriveProblem, strategy: &Strategy) -> Result<DestinationDistribution, Error> {
    match strategy {
        Strategy::Quantum { state } => {
            strategy.check_dimensions(problem.num_intersections())?;
            first_zero_distribution(state)
        }
        _ => destination_distribution(problem, strategy),
    }
}

fn describe_drive(problem: &DriveProblem) -> String {
    let exits: Vec<String> = problem.exit_payoffs().iter().map(|&v| fmt_num(v)).collect();
    format!(
        "highway: exit payoffs [{}], terminal payoff {} (k = {} destinations)\n",
        exits.join(", "),
        fmt_num(problem.terminal_payoff()),
        problem.num_destinations()
    )
}

fn dest_headers(k: usize) -> Vec<String> {
    (1..=k).map(|d| format!("p{d}")).collect()
}

fn eval(problem: &DriveProblem, scenario: &Scenario) -> Result<CommandOutput, RunError> {
    let k = problem.num_destinations();
    let header = || ["strategy".to_string(), "kind".into()].into_iter().chain(dest_headers(k)).chain(["expected_payoff".into()]);
    let mut shown = Table::new(header());
    let mut csv = Table::new(header());
    let payoffs = problem.payoffs();
    for ns in &scenario.strategies {
        let dist = strategy_distribution(problem, &ns.strategy)?;
        let payoff = dist.expectation(&payoffs)?;
        let mut row: Vec<Cell> = vec![ns.name.clone().into(), ns.strategy.kind().into()];
        row.extend(dist.probs().iter().map(|&p| Cell::Num(p)));
        let mut text_row = row.clone();
        text_row.push(fmt_value(payoff).into());
        row.push(payoff.into());
        shown.push(text_row);
        csv.push(row);
    }
    let text = format!("{}\n{}", describe_drive(problem), shown.render_text());
    Ok(CommandOutput { text, csv: emit_csv(&csv) })
}

fn optimum_line(label: &str, r: &OptimizationResult) -> String {
    format!(
        "{label} ({}): alpha* = {}, payoff* = {}\n",
        r.method,
        fmt_value(r.alpha_star),
        fmt_value(r.payoff_star)
    )
}

fn optimization_rows(results: &[(&str, OptimizationResult)]) -> Table {
    let mut t = Table::new(["objective", "method", "alpha_star", "payoff_star"]);
    for (name, r) in results {
        t.push(vec![(*name).into(), r.method.to_string().into(), r.alpha_star.into(), r.payoff_star.into()]);
    }
    t
}

fn optimize_polynomial_report(poly: &PayoffPolynomial, label: &str) -> Result<(String, Vec<OptimizationResult>), Error> {
    let closed = maximize_polynomial(poly);
    let numeric = numeric_maximize(|a| poly.eval(a), NUMERIC_TOLERANCE)?;
    let mut text = String::new();
    let _ = writeln!(text, "{label}: P(α) = {}", fmt_polynomial(poly));
    text.push_str(&optimum_line("optimum", &closed));
    text.push_str(&optimum_line("cross-check", &numeric));
    Ok((text, vec![closed, numeric]))
}

fn optimize_drive(problem: &DriveProblem, scenario: &Scenario) -> Result<CommandOutput, RunError> {
    let poly = stationary_payoff_polynomial(problem);
    let (mut text, results) = optimize_polynomial_report(&poly, "stationary strategy")?;
    text.insert_str(0, &describe_drive(problem));
    let best = results[0].payoff_star;

    let mut compare = Table::new(["strategy", "kind", "expected_payoff", "minus_stationary_optimum"]);
    for ns in &scenario.strategies {
        let payoff = strategy_distribution(problem, &ns.strategy)?.expectation(&problem.payoffs())?;
        compare.push(vec![ns.name.clone().into(), ns.strategy.kind().into(), fmt_value(payoff).into(), fmt_value(snap_zero(payoff - best, best)).into()]);
    }
    text.push('\n');
    text.push_str(&compare.render_text());
    let csv = optimization_rows(&[("stationary", results[0]), ("stationary", results[1])]);
    Ok(CommandOutput { text, csv: emit_csv(&csv) })
}

/// Differences within rounding noise of `scale` print as 0.
fn snap_zero(d: f64, scale: f64) -> f64 {
    if d.abs() <= 1e-12 * scale.abs().max(1.0) {
        0.0
    } else {
        d
    }
}

fn describe_selection(sel: &SelectionProblem) -> String {
    let payoffs: Vec<String> = sel.destination_payoffs().iter().map(|&v| fmt_num(v)).collect();
    format!(
        "selection: destination payoffs [{}] (n = {}), two rounds, first choice averaged uniformly\n",
        payoffs.join(", "),
        sel.len()
    )
}

fn optimize_selection(sel: &SelectionProblem) -> Result<CommandOutput, RunError> {
    let poly = two_round_average_polynomial(sel);
    let (text, results) = optimize_polynomial_report(&poly, "two-round average")?;
    let csv = optimization_rows(&[("two_round", results[0]), ("two_round", results[1])]);
    Ok(CommandOutput { text: describe_selection(sel) + &text, csv: emit_csv(&csv) })
}

fn select(sel: &SelectionProblem) -> Result<CommandOutput, RunError> {
    let n = sel.len();
    let stationary = two_round_breakdown(sel);
    let counting = two_round_counting_breakdown(sel)?;
    let average = two_round_average_polynomial(sel);
    let optimum = maximize_polynomial(&average);
    let counting_total = two_round_counting_total(sel)?;
    let improvement = counting_total - optimum.payoff_star;

    let mut text = describe_selection(sel);
    text.push('\n');
    let mut shown = Table::new(["first", "payoff", "second round (stationary)", "total (stationary)", "counting total"]);
    let mut csv = Table::new(["first_choice", "first_payoff", "total_polynomial", "counting_second_payoff", "counting_total"]);
    for (s, c) in stationary.iter().zip(&counting) {
        shown.push(vec![
            (s.first_choice as u64).into(),
            fmt_exact(s.first_payoff).into(),
            fmt_polynomial(&s.second_round_polynomial).into(),
            fmt_polynomial(&s.total_polynomial).into(),
            format!("{}+{}", fmt_exact(c.first_payoff), fmt_exact(c.second_payoff)).into(),
        ]);
        csv.push(vec![
            (s.first_choice as u64).into(),
            s.first_payoff.into(),
            fmt_polynomial(&s.total_polynomial).into(),
            c.second_payoff.into(),
            c.total().into(),
        ]);
    }
    text.push_str(&shown.render_text());
    text.push('\n');
    let _ = writeln!(
        text,
        "average polynomial: {} = (1/{n})({})",
        fmt_polynomial(&average),
        fmt_polynomial(&average.scale(n as f64))
    );
    let _ = writeln!(
        text,
        "stationary optimum: alpha* = {}, total* = {}",
        fmt_value(optimum.alpha_star),
        fmt_value(optimum.payoff_star)
    );
    let per_choice: Vec<String> =
        counting.iter().map(|c| format!("{}+{}", fmt_exact(c.first_payoff), fmt_exact(c.second_payoff))).collect();
    let _ = writeln!(text, "counting per-choice values: {}", per_choice.join(", "));
    let _ = writeln!(text, "counting total: {}", fmt_value(counting_total));
    let _ = writeln!(text, "improvement (counting - stationary): {}", fmt_value(improvement));
    Ok(CommandOutput { text, csv: emit_csv(&csv) })
}

fn simulate(problem: &DriveProblem, scenario: &Scenario) -> Result<CommandOutput, RunError> {
    let k = problem.num_destinations();
    let opts = scenario.options;
    let mut text = describe_drive(problem);
    let _ = writeln!(text, "trials {} per strategy, seed {}, rng {RNG_NAME}\n", opts.trials, opts.seed);

    let mut shown = Table::new(["strategy", "kind", "mean", "std_error", "analytic", "z", "tv_distance"]);
    let mut csv = Table::new(
        ["strategy".to_string(), "kind".into(), "trials".into(), "seed".into(), "mean_payoff".into(), "std_error".into(), "analytic_payoff".into()]
            .into_iter()
            .chain(dest_headers(k)),
    );
    for ns in &scenario.strategies {
        let report = estimate_payoff(problem, &ns.strategy, opts.trials, opts.seed)?;
        let exact = strategy_distribution(problem, &ns.strategy)?;
        let analytic = exact.expectation(&problem.payoffs())?;
        let z = if report.std_error > 0.0 {
            fmt_num((report.mean_payoff - analytic) / report.std_error)
        } else {
            "-".into()
        };
        shown.push(vec![
            ns.name.clone().into(),
            ns.strategy.kind().into(),
            report.mean_payoff.into(),
            report.std_error.into(),
            fmt_value(analytic).into(),
            z.into(),
            report.empirical_distribution.total_variation(&exact).into(),
        ]);
        let mut row: Vec<Cell> = vec![
            ns.name.clone().into(),
            ns.strategy.kind().into(),
            report.trials.into(),
            report.seed.into(),
            report.mean_payoff.into(),
            report.std_error.into(),
            analytic.into(),
        ];
        row.extend(report.empirical_distribution.probs().iter().map(|&p| Cell::Num(p)));
        csv.push(row);
    }
    text.push_str(&shown.render_text());
    Ok(CommandOutput { text, csv: emit_csv(&csv) })
}

/// `0, h, 2h, ...` up to 1, always ending at exactly 1.
pub fn alpha_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    if 1.0 - grid[grid.len() - 1] > 1e-12 {
        grid.push(1.0);
    } else {
        *grid.last_mut().expect("non-empty") = 1.0;
    }
    grid
}

fn curve(problem: &ProblemSpec, step: f64) -> Result<CommandOutput, RunError> {
    let poly = match problem {
        ProblemSpec::Drive(p) => stationary_payoff_polynomial(p),
        ProblemSpec::Selection(s) => two_round_average_polynomial(s),
    };
    let mut t = Table::new(["alpha", "payoff"]);
    for a in alpha_grid(step) {
        t.push(vec![a.into(), poly.eval(a).into()]);
    }
    let csv = emit_csv(&t);
    Ok(CommandOutput { text: csv.clone(), csv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::preset;

    #[test]
    fn grids() {
        assert_eq!(alpha_grid(0.5), vec![0.0, 0.5, 1.0]);
        assert_eq!(alpha_grid(1.0), vec![0.0, 1.0]);
        assert_eq!(alpha_grid(0.3), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        let g = alpha_grid(0.1);
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
    }

    #[test]
    fn curve_on_example1() {
        let mut s = preset("example1").unwrap();
        s.options.grid_step = 0.5;
        let out = run_command(Command::Curve, &s).unwrap();
        assert_eq!(out.csv, "alpha,payoff\n0,1\n0.5,1.25\n1,0\n");
    }

    #[test]
    fn eval_reports_worked_example_values() {
        let out = run_command(Command::Eval, &preset("example1").unwrap()).unwrap();
        assert!(out.text.contains("1.33333333333 (4/3)"), "{}", out.text);
        assert!(out.text.contains("1.66666666667 (5/3)"));
        assert!(out.csv.lines().nth(3).unwrap().starts_with("bell-01-10,quantum,0.5,0.5,0,2"), "{}", out.csv);
    }

    #[test]
    fn counting_row_in_csv() {
        let out = run_command(Command::Eval, &preset("example2").unwrap()).unwrap();
        assert!(out.csv.contains("counting,counting,0.25,0.25,0.25,0.25,1.5\n"), "{}", out.csv);
    }

    #[test]
    fn select_report() {
        let out = run_command(Command::Select, &preset("selection-example").unwrap()).unwrap();
        for needle in ["alpha* = 0.5 (1/2)", "2.875 (23/8)", "counting total: 3\n", "0.125 (1/8)", "0+2, 4+2/3, 1+5/3, 1+5/3", "1 + 3α", "5 - α", "(1/4)(10 + 6α - 6α^2)"] {
            assert!(out.text.contains(needle), "missing {needle:?} in\n{}", out.text);
        }
    }

    #[test]
    fn command_problem_mismatch() {
        let sel = preset("selection-example").unwrap();
        assert!(matches!(run_command(Command::Eval, &sel), Err(RunError::ProblemKind { .. })));
        assert!(matches!(run_command(Command::Simulate, &sel), Err(RunError::ProblemKind { .. })));
        let drive = preset("example1").unwrap();
        assert!(matches!(run_command(Command::Select, &drive), Err(RunError::ProblemKind { .. })));
        assert!(run_command(Command::Optimize, &sel).is_ok());
    }

    #[test]
    fn simulate_is_reproducible() {
        let mut s = preset("example1").unwrap();
        s.options.trials = 5000;
        let a = run_command(Command::Simulate, &s).unwrap();
        let b = run_command(Command::Simulate, &s).unwrap();
        assert_eq!(a, b);
    }
}
