//! Independent oracles: path enumeration, grid search and pair enumeration,
//! checked against the analytic evaluators. Expected values marked "frozen"
//! were computed once with the oracle and are asserted directly as well.

use amdriver::selection::two_round_counting_breakdown;
use amdriver::{
    destination_distribution, expected_payoff, make_drive_problem, optimize_stationary, optimize_two_round,
    product_state, selection_improvement, two_round_average_polynomial, two_round_counting_total, DriveProblem,
    Probability, SelectionProblem, Strategy,
};

/// Enumerates every exit/continue decision sequence and its probability.
fn enumerate_paths(exit_probs: &[f64]) -> Vec<f64> {
    let m = exit_probs.len();
    let mut dist = vec![0.0; m + 1];
    for mask in 0u32..(1 << m) {
        // bit j set = "exit" decision drawn at intersection j (may never be reached)
        let mut prob = 1.0;
        for (j, &p) in exit_probs.iter().enumerate() {
            prob *= if mask >> j & 1 == 1 { p } else { 1.0 - p };
        }
        let dest = (0..m).find(|&j| mask >> j & 1 == 1).map_or(m + 1, |j| j + 1);
        dist[dest - 1] += prob;
    }
    dist
}

fn direct_stationary_payoff(problem: &DriveProblem, alpha: f64) -> f64 {
    let probs = vec![alpha; problem.num_intersections()];
    enumerate_paths(&probs).iter().zip(problem.payoffs()).map(|(p, v)| p * v).sum()
}

fn grid_max(f: impl Fn(f64) -> f64, points: usize) -> (f64, f64) {
    (0..points)
        .map(|i| {
            let a = i as f64 / (points - 1) as f64;
            (a, f(a))
        })
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Average of `v_i + v_j` over ordered pairs `i != j`.
fn pair_average(v: &[f64]) -> f64 {
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += v[i] + v[j];
            }
        }
    }
    total / (n * (n - 1)) as f64
}

#[test]
fn example1_distribution_matches_path_enumeration() {
    let ex1 = make_drive_problem(&[0.0, 4.0], 1.0).unwrap();
    let d = destination_distribution(&ex1, &Strategy::stationary(1.0 / 3.0).unwrap()).unwrap();
    let oracle = enumerate_paths(&[1.0 / 3.0, 1.0 / 3.0]);
    let frozen = [1.0 / 3.0, 2.0 / 9.0, 4.0 / 9.0];
    for i in 0..3 {
        assert!((d.probs()[i] - oracle[i]).abs() < 1e-12);
        assert!((d.probs()[i] - frozen[i]).abs() < 1e-12);
    }
}

#[test]
fn per_step_strategies_match_path_enumeration() {
    let p = make_drive_problem(&[1.0, -2.0, 3.0, 0.5], 7.0).unwrap();
    let probs = [0.1, 0.9, 0.35, 0.6];
    let d = destination_distribution(&p, &Strategy::per_step(&probs).unwrap()).unwrap();
    for (a, b) in d.probs().iter().zip(enumerate_paths(&probs)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn product_state_amplitudes_reproduce_stationary_third() {
    let s = product_state(Probability::new(1.0 / 3.0).unwrap(), 2).unwrap();
    let amps: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
    let frozen = [1.0 / 3.0, 2f64.sqrt() / 3.0, 2f64.sqrt() / 3.0, 2.0 / 3.0];
    for (a, f) in amps.iter().zip(frozen) {
        assert!((a - f).abs() < 1e-15);
    }
    let ex1 = make_drive_problem(&[0.0, 4.0], 1.0).unwrap();
    let q = amdriver::quantum_expected_payoff(&ex1, &s).unwrap();
    assert!((q - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn quartic_problem_against_grid_search() {
    let p = make_drive_problem(&[2.0, 5.0, 3.0, 1.0], 0.0).unwrap();
    let r = optimize_stationary(&p);
    let (grid_alpha, grid_payoff) = grid_max(|a| direct_stationary_payoff(&p, a), 100_001);
    assert!((r.payoff_star - grid_payoff).abs() < 1e-6);
    assert!(r.payoff_star >= grid_payoff - 1e-12);
    assert!((r.alpha_star - grid_alpha).abs() < 1e-4);
    // frozen
    assert!((r.alpha_star - 0.583_124_521_558).abs() < 1e-9, "{r:?}");
    assert!((r.payoff_star - 2.727_961_275_648).abs() < 1e-9);
}

#[test]
fn selection_3102_against_oracles() {
    let sel = SelectionProblem::new(vec![3.0, 1.0, 0.0, 2.0]).unwrap();
    let avg = two_round_average_polynomial(&sel);
    let direct = |a: f64| {
        let v = sel.destination_payoffs();
        (0..4)
            .map(|i| {
                let mut rest = v.to_vec();
                let first = rest.remove(i);
                let second = DriveProblem::from_destinations(&rest).unwrap();
                first + direct_stationary_payoff(&second, a)
            })
            .sum::<f64>()
            / 4.0
    };
    for i in 0..=20 {
        let a = i as f64 / 20.0;
        assert!((avg.eval(a) - direct(a)).abs() < 1e-12);
    }
    let r = optimize_two_round(&sel);
    let (_, grid_payoff) = grid_max(direct, 100_001);
    assert!((r.payoff_star - grid_payoff).abs() < 1e-6);
    // frozen: always taking the first remaining destination is optimal here
    assert_eq!(r.alpha_star, 1.0);
    assert!((r.payoff_star - 4.0).abs() < 1e-12);

    let counting = two_round_counting_total(&sel).unwrap();
    assert!((counting - pair_average(sel.destination_payoffs())).abs() < 1e-12);
    assert!((counting - 3.0).abs() < 1e-12);
}

#[test]
fn selection_improvement_can_be_negative() {
    let sel = SelectionProblem::new(vec![10.0, 0.0, 0.0, 0.0]).unwrap();
    let counting = pair_average(sel.destination_payoffs());
    assert!((counting - 5.0).abs() < 1e-12);
    let (_, stationary) = grid_max(|a| two_round_average_polynomial(&sel).eval(a), 100_001);
    assert!((stationary - 10.0).abs() < 1e-9);
    let imp = selection_improvement(&sel).unwrap();
    assert!(imp < 0.0);
    assert!((imp - (counting - stationary)).abs() < 1e-9);
}

#[test]
fn counting_breakdown_matches_pair_enumeration_per_choice() {
    let v = [3.0, 1.0, 0.0, 2.0];
    let sel = SelectionProblem::new(v.to_vec()).unwrap();
    for c in two_round_counting_breakdown(&sel).unwrap() {
        let others: f64 = v.iter().enumerate().filter(|(j, _)| *j + 1 != c.first_choice).map(|(_, x)| x).sum();
        assert!((c.second_payoff - others / 3.0).abs() < 1e-12);
    }
}

#[test]
fn counting_beats_stationary_on_worked_examples_only() {
    let ex1 = make_drive_problem(&[0.0, 4.0], 1.0).unwrap();
    let ex2 = make_drive_problem(&[0.0, 4.0, 1.0], 1.0).unwrap();
    for p in [&ex1, &ex2] {
        assert!(expected_payoff(p, &Strategy::Counting).unwrap() > optimize_stationary(p).payoff_star);
    }
    // Not a general law: a large first exit favours always exiting.
    let skewed = make_drive_problem(&[10.0, 0.0], 0.0).unwrap();
    let counting = expected_payoff(&skewed, &Strategy::Counting).unwrap();
    assert!((counting - 10.0 / 3.0).abs() < 1e-12);
    assert!(optimize_stationary(&skewed).payoff_star > counting);
}
