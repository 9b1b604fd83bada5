//! Scenario documents, built-in presets and the command runner.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! [problem]
//! kind = "drive"              # or "selection"
//! exit_payoffs = [0, 4]       # drive only
//! terminal_payoff = 1         # drive only
//! # destination_payoffs = [0, 4, 1, 1]   # selection only
//!
//! [options]                   # optional
//! trials = 100000
//! seed = 24301
//! grid_step = 0.01
//!
//! [[strategy]]
//! name = "third"
//! kind = "stationary"
//! alpha = "1/3"               # number or "p/q"
//!
//! [[strategy]]
//! name = "counter"
//! kind = "counting"
//!
//! [[strategy]]
//! name = "bell"
//! kind = "quantum"
//! normalize = true
//! terms = [{ bits = "01", re = 1.0 }, { bits = "10", re = 1.0 }]
//! ```
//!
//! `per_step` strategies take `exit_probs = [...]`. Quantum terms take
//! `bits`, `re` and an optional `im`.

mod format;
mod run;

pub use format::{as_fraction, emit_csv, fmt_exact, fmt_num, fmt_polynomial, fmt_value, Cell, Table};
pub use run::{run_command, Command, CommandOutput, RunError};

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::Error;
use crate::model::{DriveProblem, Probability, SelectionProblem, Strategy};
use crate::quantum::{build_state, BasisTerm};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 24_301;
pub const DEFAULT_GRID_STEP: f64 = 0.01;

pub const PRESET_NAMES: [&str; 3] = ["example1", "example2", "selection-example"];

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Drive(DriveProblem),
    Selection(SelectionProblem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedStrategy {
    pub name: String,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub trials: u64,
    pub seed: u64,
    pub grid_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { trials: DEFAULT_TRIALS, seed: DEFAULT_SEED, grid_step: DEFAULT_GRID_STEP }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub problem: ProblemSpec,
    pub strategies: Vec<NamedStrategy>,
    pub options: Options,
}

/// A scenario that failed to parse or validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ScenarioError {
    fn at(text: &str, span: Range<usize>, field: impl Into<String>, message: impl fmt::Display) -> Self {
        ScenarioError { line: line_of(text, span.start), field: Some(field.into()), message: message.to_string() }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ScenarioError {}

fn line_of(text: &str, offset: usize) -> Option<usize> {
    let offset = offset.min(text.len());
    text.is_char_boundary(offset).then(|| text[..offset].bytes().filter(|&b| b == b'\n').count() + 1)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    problem: Spanned<RawProblem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    options: Option<Spanned<RawOptions>>,
    #[serde(default, rename = "strategy")]
    strategies: Vec<Spanned<RawStrategy>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exit_payoffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminal_payoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    destination_payoffs: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trials: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid_step: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<RawNumber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exit_probs: Option<Vec<RawNumber>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<RawTerm>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Number(f64),
    Text(String),
}

impl RawNumber {
    fn value(&self) -> Result<f64, String> {
        match self {
            RawNumber::Number(v) => Ok(*v),
            RawNumber::Text(s) => parse_fraction(s),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    bits: String,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Parses `"p/q"` or a plain decimal.
pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let bad = || format!("expected a number or \"p/q\", got {s:?}");
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parse-time switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Rescale every quantum state to unit norm, as if each carried
    /// `normalize = true`.
    pub normalize_states: bool,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario_with(text, ParseOptions::default())
}

pub fn parse_scenario_with(text: &str, opts: ParseOptions) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| ScenarioError {
        line: e.span().and_then(|s| line_of(text, s.start)),
        field: None,
        message: e.message().trim().to_string(),
    })?;

    let problem = build_problem(text, &raw.problem)?;
    let options = match &raw.options {
        Some(o) => build_options(text, o)?,
        None => Options::default(),
    };

    if raw.strategies.is_empty() {
        return Err(ScenarioError { line: None, field: Some("strategy".into()), message: "at least one strategy is required".into() });
    }
    let mut names = HashSet::new();
    let mut strategies = Vec::with_capacity(raw.strategies.len());
    for (i, spanned) in raw.strategies.iter().enumerate() {
        let field = format!("strategy[{i}]");
        let raw_strategy = spanned.get_ref();
        let err = |msg: &dyn fmt::Display| ScenarioError::at(text, spanned.span(), field.clone(), msg);
        if raw_strategy.name.trim().is_empty() {
            return Err(err(&"empty strategy name"));
        }
        if !names.insert(raw_strategy.name.clone()) {
            return Err(err(&format!("duplicate strategy name {:?}", raw_strategy.name)));
        }
        let strategy = build_strategy(raw_strategy, opts).map_err(|m| err(&m))?;
        check_fit(&problem, &strategy).map_err(|e| err(&e))?;
        strategies.push(NamedStrategy { name: raw_strategy.name.clone(), strategy });
    }

    Ok(Scenario { problem, strategies, options })
}

fn build_problem(text: &str, spanned: &Spanned<RawProblem>) -> Result<ProblemSpec, ScenarioError> {
    let raw = spanned.get_ref();
    let err = |field: &str, msg: &dyn fmt::Display| ScenarioError::at(text, spanned.span(), format!("problem.{field}"), msg);
    match raw.kind.as_str() {
        "drive" => {
            if raw.destination_payoffs.is_some() {
                return Err(err("destination_payoffs", &"only valid for selection problems"));
            }
            let exits = raw.exit_payoffs.clone().ok_or_else(|| err("exit_payoffs", &"missing field"))?;
            let terminal = raw.terminal_payoff.ok_or_else(|| err("terminal_payoff", &"missing field"))?;
            DriveProblem::new(exits, terminal).map(ProblemSpec::Drive).map_err(|e| err("exit_payoffs", &e))
        }
        "selection" => {
            if raw.exit_payoffs.is_some() || raw.terminal_payoff.is_some() {
                return Err(err("kind", &"selection problems take destination_payoffs only"));
            }
            let payoffs = raw.destination_payoffs.clone().ok_or_else(|| err("destination_payoffs", &"missing field"))?;
            SelectionProblem::new(payoffs).map(ProblemSpec::Selection).map_err(|e| err("destination_payoffs", &e))
        }
        other => Err(err("kind", &format!("unknown problem kind {other:?} (expected \"drive\" or \"selection\")"))),
    }
}

fn build_options(text: &str, spanned: &Spanned<RawOptions>) -> Result<Options, ScenarioError> {
    let raw = spanned.get_ref();
    let err = |field: &str, msg: &str| ScenarioError::at(text, spanned.span(), format!("options.{field}"), msg);
    let mut options = Options::default();
    if let Some(t) = raw.trials {
        options.trials = u64::try_from(t).ok().filter(|&t| t >= 1).ok_or_else(|| err("trials", "must be at least 1"))?;
    }
    if let Some(s) = raw.seed {
        options.seed = u64::try_from(s).map_err(|_| err("seed", "must be non-negative"))?;
    }
    if let Some(h) = raw.grid_step {
        options.grid_step = check_grid_step(h).map_err(|m| err("grid_step", &m))?;
    }
    Ok(options)
}

pub fn check_grid_step(h: f64) -> Result<f64, String> {
    if h > 0.0 && h <= 1.0 {
        Ok(h)
    } else {
        Err(format!("grid step must lie in (0, 1], got {h}"))
    }
}

fn build_strategy(raw: &RawStrategy, opts: ParseOptions) -> Result<Strategy, String> {
    let unexpected = |present: bool, name: &str| {
        if present {
            Err(format!("field `{name}` does not apply to {} strategies", raw.kind))
        } else {
            Ok(())
        }
    };
    match raw.kind.as_str() {
        "stationary" => {
            unexpected(raw.exit_probs.is_some(), "exit_probs")?;
            unexpected(raw.terms.is_some() || raw.normalize.is_some(), "terms")?;
            let alpha = raw.alpha.as_ref().ok_or("missing field `alpha`")?.value()?;
            Strategy::stationary(alpha).map_err(|e| e.to_string())
        }
        "counting" => {
            unexpected(raw.alpha.is_some(), "alpha")?;
            unexpected(raw.exit_probs.is_some(), "exit_probs")?;
            unexpected(raw.terms.is_some() || raw.normalize.is_some(), "terms")?;
            Ok(Strategy::Counting)
        }
        "per_step" => {
            unexpected(raw.alpha.is_some(), "alpha")?;
            unexpected(raw.terms.is_some() || raw.normalize.is_some(), "terms")?;
            let probs = raw.exit_probs.as_ref().ok_or("missing field `exit_probs`")?;
            let probs = probs.iter().map(RawNumber::value).collect::<Result<Vec<_>, _>>()?;
            Strategy::per_step(&probs).map_err(|e| e.to_string())
        }
        "quantum" => {
            unexpected(raw.alpha.is_some(), "alpha")?;
            unexpected(raw.exit_probs.is_some(), "exit_probs")?;
            let terms = raw.terms.as_ref().ok_or("missing field `terms`")?;
            let terms: Vec<BasisTerm> = terms.iter().map(|t| BasisTerm::new(t.bits.clone(), t.re, t.im)).collect();
            let normalize = opts.normalize_states || raw.normalize.unwrap_or(false);
            let state = build_state(&terms, normalize).map_err(|e| e.to_string())?;
            Ok(Strategy::Quantum { state })
        }
        other => Err(format!(
            "unknown strategy kind {other:?} (expected \"stationary\", \"counting\", \"per_step\" or \"quantum\")"
        )),
    }
}

/// Checks that a strategy can be evaluated on the scenario's problem.
/// Selection problems accept only stationary and counting strategies,
/// because the number of intersections changes between rounds.
fn check_fit(problem: &ProblemSpec, strategy: &Strategy) -> Result<(), Error> {
    match problem {
        ProblemSpec::Drive(p) => strategy.check_dimensions(p.num_intersections()),
        ProblemSpec::Selection(sel) => match strategy {
            Strategy::Stationary { .. } | Strategy::Counting => Ok(()),
            Strategy::PerStep { exit_probs } => Err(Error::Mismatch { strategy: exit_probs.len(), problem: sel.len() - 1 }),
            Strategy::Quantum { state } => Err(Error::Mismatch { strategy: state.num_qubits(), problem: sel.len() - 1 }),
        },
    }
}

fn spanned<T>(value: T) -> Spanned<T> {
    Spanned::new(0..0, value)
}

/// Canonical TOML for a scenario. Parsing the output gives back an equal
/// scenario.
pub fn emit_scenario(scenario: &Scenario) -> String {
    let problem = match &scenario.problem {
        ProblemSpec::Drive(p) => RawProblem {
            kind: "drive".into(),
            exit_payoffs: Some(p.exit_payoffs().to_vec()),
            terminal_payoff: Some(p.terminal_payoff()),
            destination_payoffs: None,
        },
        ProblemSpec::Selection(s) => RawProblem {
            kind: "selection".into(),
            exit_payoffs: None,
            terminal_payoff: None,
            destination_payoffs: Some(s.destination_payoffs().to_vec()),
        },
    };
    let options = RawOptions {
        trials: Some(i64::try_from(scenario.options.trials).unwrap_or(i64::MAX)),
        seed: Some(scenario.options.seed as i64),
        grid_step: Some(scenario.options.grid_step),
    };
    let strategies = scenario
        .strategies
        .iter()
        .map(|ns| {
            let mut raw = RawStrategy {
                name: ns.name.clone(),
                kind: ns.strategy.kind().into(),
                alpha: None,
                exit_probs: None,
                normalize: None,
                terms: None,
            };
            match &ns.strategy {
                Strategy::Stationary { alpha } => raw.alpha = Some(RawNumber::Number(alpha.get())),
                Strategy::Counting => {}
                Strategy::PerStep { exit_probs } => {
                    raw.exit_probs = Some(exit_probs.iter().map(|p| RawNumber::Number(p.get())).collect())
                }
                Strategy::Quantum { state } => {
                    raw.normalize = Some(false);
                    raw.terms = Some(
                        state
                            .terms()
                            .into_iter()
                            .map(|t| RawTerm { bits: t.bits, re: t.amplitude.re, im: t.amplitude.im })
                            .collect(),
                    );
                }
            }
            spanned(raw)
        })
        .collect();
    let raw = RawScenario { problem: spanned(problem), options: Some(spanned(options)), strategies };
    toml::to_string(&raw).expect("scenario serializes")
}

/// Built-in scenarios, by name.
pub fn preset(name: &str) -> Option<Scenario> {
    use std::f64::consts::FRAC_1_SQRT_2;

    let third = Probability::new(1.0 / 3.0).expect("valid");
    let named = |name: &str, strategy: Strategy| NamedStrategy { name: name.into(), strategy };
    let quantum = |terms: &[(&str, f64)]| {
        let terms: Vec<BasisTerm> = terms.iter().map(|&(b, a)| BasisTerm::real(b, a)).collect();
        Strategy::Quantum { state: build_state(&terms, false).expect("preset states are normalized") }
    };

    let scenario = match name {
        "example1" => Scenario {
            problem: ProblemSpec::Drive(DriveProblem::new(vec![0.0, 4.0], 1.0).expect("valid")),
            strategies: vec![
                named("stationary-1/3", Strategy::Stationary { alpha: third }),
                named("counting", Strategy::Counting),
                named("bell-01-10", quantum(&[("01", FRAC_1_SQRT_2), ("10", FRAC_1_SQRT_2)])),
            ],
            options: Options::default(),
        },
        "example2" => Scenario {
            problem: ProblemSpec::Drive(DriveProblem::new(vec![0.0, 4.0, 1.0], 1.0).expect("valid")),
            strategies: vec![
                named("stationary-1/3", Strategy::Stationary { alpha: third }),
                named("counting", Strategy::Counting),
                named("pair-001-110", quantum(&[("001", FRAC_1_SQRT_2), ("110", FRAC_1_SQRT_2)])),
                named("basis-110", quantum(&[("110", 1.0)])),
            ],
            options: Options::default(),
        },
        "selection-example" => Scenario {
            problem: ProblemSpec::Selection(SelectionProblem::new(vec![0.0, 4.0, 1.0, 1.0]).expect("valid")),
            strategies: vec![
                named("stationary-1/2", Strategy::stationary(0.5).expect("valid")),
                named("counting", Strategy::Counting),
            ],
            options: Options::default(),
        },
        _ => return None,
    };
    Some(scenario)
}
