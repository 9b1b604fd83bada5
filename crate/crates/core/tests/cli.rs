use std::path::Path;
use std::process::{Command, Output};

fn amdriver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amdriver")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_example1() {
    let o = amdriver(&["--preset", "example1", "eval"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("1.33333333333 (4/3)"));
    assert!(out.contains("1.66666666667 (5/3)"));
    assert!(out.lines().any(|l| l.starts_with("bell-01-10") && l.ends_with("  2")), "{out}");
    assert!(stderr(&o).is_empty());
}

#[test]
fn select_example() {
    let o = amdriver(&["--preset", "selection-example", "select"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for needle in ["alpha* = 0.5 (1/2)", "total* = 2.875 (23/8)", "counting total: 3", "0.125 (1/8)"] {
        assert!(out.contains(needle), "{needle:?} missing:\n{out}");
    }
}

#[test]
fn curve_defaults_to_example1() {
    let o = amdriver(&["curve", "--grid-step", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "alpha,payoff\n0,1\n0.5,1.25\n1,0\n");
}

#[test]
fn csv_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eval.csv");
    let o = amdriver(&["--preset", "example2", "eval", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("strategy,kind,p1,p2,p3,p4,expected_payoff\n"));
    assert!(csv.contains("counting,counting,0.25,0.25,0.25,0.25,1.5\n"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(amdriver(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(amdriver(&[]).status.code(), Some(1));
    assert_eq!(amdriver(&["--preset", "nope", "eval"]).status.code(), Some(1));
    assert_eq!(amdriver(&["simulate", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(amdriver(&["curve", "--grid-step", "0"]).status.code(), Some(1));
    assert_eq!(amdriver(&["eval", "--preset", "example1", "--scenario", "x.toml"]).status.code(), Some(1));
    assert_eq!(amdriver(&["--help"]).status.code(), Some(0));
}

#[test]
fn scenario_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[problem]\nkind = \"drive\"\nexit_payoffs = []\nterminal_payoff = 1\n");
    let o = amdriver(&["--scenario", &bad, "eval"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate problem"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());

    let o = amdriver(&["--preset", "example1", "select"]);
    assert_eq!(o.status.code(), Some(2));
    let o = amdriver(&["--preset", "selection-example", "eval"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_3() {
    assert_eq!(amdriver(&["--scenario", "/definitely/not/here.toml", "eval"]).status.code(), Some(3));
    let o = amdriver(&["eval", "--csv", "/definitely/not/here/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn normalize_flag_rescales_states() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[problem]
kind = "drive"
exit_payoffs = [0, 4]
terminal_payoff = 1

[[strategy]]
name = "bell"
kind = "quantum"
terms = [{ bits = "01", re = 1 }, { bits = "10", re = 1 }]
"#;
    let path = write(dir.path(), "bell.toml", text);
    assert_eq!(amdriver(&["--scenario", &path, "eval"]).status.code(), Some(2));
    let o = amdriver(&["--scenario", &path, "--normalize-states", "eval"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("bell") && l.ends_with("  2")));
}

#[test]
fn simulate_is_byte_identical() {
    let args = ["--preset", "example2", "simulate", "--trials", "20000", "--seed", "9"];
    let a = amdriver(&args);
    let b = amdriver(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = amdriver(&["--preset", "example2", "simulate", "--trials", "20000", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = amdriver(&["--scenario", path.to_str().unwrap(), "optimize"]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stderr(&o));
    }
}
