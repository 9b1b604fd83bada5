//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 scenario validation error,
//! 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use amdriver::scenario::{
    check_grid_step, parse_scenario_with, preset, run_command, Command, ParseOptions, RunError, Scenario, PRESET_NAMES,
};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

const EXIT_USAGE: u8 = 1;
const EXIT_SCENARIO: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "amdriver", version, about = "Evaluate and optimize absent-minded driver strategies")]
struct Cli {
    /// Scenario document (TOML).
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario: example1, example2 or selection-example.
    /// Defaults to example1 when no scenario is given.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Monte Carlo trials per strategy.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Spacing of the alpha grid used by `curve`.
    #[arg(long = "grid-step", global = true, value_parser = parse_grid_step)]
    grid_step: Option<f64>,
    /// Also write the machine-readable table to this file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Rescale every quantum state in the scenario to unit norm.
    #[arg(long = "normalize-states", global = true)]
    normalize_states: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Destination distributions and expected payoffs per strategy.
    Eval,
    /// Best stationary exit probability.
    Optimize,
    /// Two-round selection breakdown.
    Select,
    /// Monte Carlo estimates next to the exact values.
    Simulate,
    /// CSV of the stationary payoff over an alpha grid.
    Curve,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Eval => Command::Eval,
            Cmd::Optimize => Command::Optimize,
            Cmd::Select => Command::Select,
            Cmd::Simulate => Command::Simulate,
            Cmd::Curve => Command::Curve,
        }
    }
}

fn parse_grid_step(s: &str) -> Result<f64, String> {
    let h: f64 = s.parse().map_err(|e| format!("{e}"))?;
    check_grid_step(h)
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("amdriver: {message}");
    ExitCode::from(code)
}

fn load(cli: &Cli) -> Result<Scenario, ExitCode> {
    let mut scenario = match (&cli.scenario, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| fail(EXIT_RUNTIME, format_args!("cannot read {}: {e}", path.display())))?;
            let opts = ParseOptions { normalize_states: cli.normalize_states };
            parse_scenario_with(&text, opts).map_err(|e| fail(EXIT_SCENARIO, format_args!("{}: {e}", path.display())))?
        }
        (None, name) => {
            let name = name.as_deref().unwrap_or("example1");
            preset(name).ok_or_else(|| {
                fail(EXIT_USAGE, format_args!("unknown preset {name:?} (available: {})", PRESET_NAMES.join(", ")))
            })?
        }
    };
    if let Some(t) = cli.trials {
        scenario.options.trials = t;
    }
    if let Some(s) = cli.seed {
        scenario.options.seed = s;
    }
    if let Some(h) = cli.grid_step {
        scenario.options.grid_step = h;
    }
    Ok(scenario)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let scenario = match load(&cli) {
        Ok(s) => s,
        Err(code) => return code,
    };

    let output = match run_command(cli.command.into(), &scenario) {
        Ok(o) => o,
        Err(e @ RunError::ProblemKind { .. }) => return fail(EXIT_SCENARIO, e),
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    print!("{}", output.text);
    if let Some(path) = &cli.csv {
        if let Err(e) = std::fs::write(path, &output.csv) {
            return fail(EXIT_RUNTIME, format_args!("cannot write {}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}
