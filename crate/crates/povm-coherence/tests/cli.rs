//! End-to-end tests of the `povm-coherence` binary: output formats, exit
//! codes and byte determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_povm-coherence"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Writes the bundled reference problem into a temp dir and returns its path.
fn reference_problem(dir: &Path) -> PathBuf {
    let path = dir.join("reference.json");
    let output = run(&[
        "repro",
        "--emit-problem",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "emit-problem failed: {}",
        stderr(&output)
    );
    path
}

#[test]
fn coherence_of_named_states() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let problem = problem.to_str().unwrap();

    for (state, expected) in [
        ("zero", "2.000000000000"),
        ("plus", "1.500000000000"),
        ("maximally_mixed", "1.000000000000"),
    ] {
        let output = run(&["coherence", problem, state]);
        assert_eq!(output.status.code(), Some(0));
        let text = stdout(&output);
        let first = text.lines().next().unwrap();
        assert_eq!(first, expected, "state {state}");
        // Second line is the machine-readable record.
        let second = text.lines().nth(1).unwrap();
        assert!(second.contains(&format!("\"coherence_bits\":\"{expected}\"")));
        assert!(second.contains(&format!("\"state\":\"{state}\"")));
    }
}

#[test]
fn unknown_state_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let output = run(&["coherence", problem.to_str().unwrap(), "ghost"]);
    assert_eq!(output.status.code(), Some(3));
    let err = stderr(&output);
    assert!(err.contains("error[E_INVALID]"), "stderr: {err}");
    assert!(err.contains("ghost"));
}

#[test]
fn missing_povm_is_a_validation_error_naming_the_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_povm.json");
    std::fs::write(
        &path,
        r#"{ "format_version": "1", "states": { "zero": { "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]] } } }"#,
    )
    .unwrap();
    let output = run(&["coherence", path.to_str().unwrap(), "zero"]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("povm"));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let output = run(&["coherence", path.to_str().unwrap(), "zero"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("error[E_PARSE]"), "stderr: {err}");
    assert!(err.contains("line"), "stderr: {err}");
}

#[test]
fn missing_file_is_a_parse_error() {
    let output = run(&["coherence", "/nonexistent/problem.json", "zero"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_csv_format_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let problem = problem.to_str().unwrap();

    let a = run(&["sweep", problem, "--n-theta", "2", "--n-phi", "1"]);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "theta,phi,coherence");
    assert!(text.ends_with('\n'));

    let b = run(&["sweep", problem, "--n-theta", "2", "--n-phi", "1"]);
    assert_eq!(a.stdout, b.stdout, "sweep output must be byte-identical");
}

#[test]
fn default_sweep_has_full_grid_and_known_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let out_path = dir.path().join("sweep.csv");
    let output = run(&[
        "sweep",
        problem.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 61 * 61);
    let mut max: f64 = f64::NEG_INFINITY;
    let mut min: f64 = f64::INFINITY;
    for line in &lines[1..] {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        max = max.max(value);
        min = min.min(value);
    }
    assert!((max - 2.0).abs() < 1e-9, "max {max}");
    assert!((min - 1.5).abs() < 1e-9, "min {min}");
}

#[test]
fn sweep_with_channel_adds_column_with_half_bit_increment() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let output = run(&["sweep", problem.to_str().unwrap(), "--channel", "u_max"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,phi,coherence,coherence_after");
    let mut max_increment: f64 = f64::NEG_INFINITY;
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        let before: f64 = cells[2].parse().unwrap();
        let after: f64 = cells[3].parse().unwrap();
        max_increment = max_increment.max(after - before);
    }
    assert!(
        (max_increment - 0.5).abs() < 1e-9,
        "increment {max_increment}"
    );
}

#[test]
fn dynamical_reports_measure_witness_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let problem = problem.to_str().unwrap();

    let output = run(&[
        "dynamical",
        problem,
        "u_max",
        "--grid",
        "21",
        "--restarts",
        "16",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    let measure_line = text.lines().next().unwrap();
    let value: f64 = measure_line
        .trim_start_matches("measure = ")
        .trim_end_matches(" bits")
        .parse()
        .unwrap();
    assert!((value - 0.5).abs() < 1e-3, "measure line: {measure_line}");
    assert!(text.contains("witness: p = "));
    assert!(text.contains("verdict: not CMIO"));
    assert!(text.contains("\"certified_within_budget\":\"false\""));

    let output = run(&[
        "dynamical",
        problem,
        "u_min",
        "--grid",
        "21",
        "--restarts",
        "16",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("verdict: CMIO within budget"));
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("measure = ")
        .trim_end_matches(" bits")
        .parse()
        .unwrap();
    assert!(value.abs() < 1e-6);
}

#[test]
fn dynamical_output_is_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let problem = problem.to_str().unwrap();
    let args = [
        "dynamical",
        problem,
        "u_max",
        "--grid",
        "21",
        "--restarts",
        "8",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn repro_passes_and_prints_the_key_values() {
    let output = run(&["repro"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("checks passed"), "output: {text}");
    assert!(!text.contains("FAIL"));
    // The six landmark numbers all appear as expected values.
    for value in [
        "2.000000000000",
        "1.500000000000",
        "1.000000000000",
        "0.500000000000",
    ] {
        assert!(text.contains(value), "missing {value} in:\n{text}");
    }
    assert!(text.matches("0.000000000000").count() >= 2);
}

#[test]
fn corrupted_fixture_fails_with_the_offending_line() {
    let output = run(&["repro", "--corrupt-fixture"]);
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    assert!(text.contains("FAIL"));
    let failing_line = text
        .lines()
        .find(|l| l.contains("FAIL"))
        .expect("a failing line");
    assert!(
        failing_line.contains("printed dilation vectors"),
        "failing line: {failing_line}"
    );
}

#[test]
fn coherence_record_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let problem = reference_problem(dir.path());
    let record = dir.path().join("record.json");
    let output = run(&[
        "coherence",
        problem.to_str().unwrap(),
        "zero",
        "--output",
        record.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let content = std::fs::read_to_string(&record).unwrap();
    assert!(content.contains("\"coherence_bits\":\"2.000000000000\""));
}
