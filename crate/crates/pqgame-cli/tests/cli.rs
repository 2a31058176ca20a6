//! End-to-end tests of the `pqgame` binary: output formats, determinism,
//! file round-trips and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pqgame"));
    c.env_remove("PQGAME_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn run_reports_the_paper_results() {
    let o = run(&["run", "bv", "--n", "3", "--a", "101"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("win_probability 1.000000000000"), "{text}");
    assert!(text.contains("queries 1"), "{text}");

    let o = run(&["run", "grover", "--n", "2", "--a", "3"]);
    assert!(stdout(&o).contains("win_probability 1.000000000000"));

    let o = run(&["run", "penny", "--picard", "flip"]);
    assert!(stdout(&o).contains("win_probability 1.000000000000"));

    let o = run(&["run", "penny", "--picard", "p=0.75"]);
    assert!(stdout(&o).contains("win_probability 1.000000000000"));
}

#[test]
fn run_sample_is_deterministic_per_seed() {
    let args = [
        "run", "grover", "--n", "3", "--a", "4", "--sample", "--seed", "9",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("sampled_outcome"));

    // PQGAME_SEED is the fallback for --seed.
    let via_env = bin()
        .args(["run", "grover", "--n", "3", "--a", "4", "--sample"])
        .env("PQGAME_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(via_env.stdout, first.stdout);
}

#[test]
fn trace_csv_shape_and_content() {
    let o = run(&["trace", "penny"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,label,norm,global_entanglement,is_product");
    assert_eq!(lines.len(), 5, "{text}");

    let o = run(&["trace", "bv", "--n", "4", "--a", "9"]);
    for line in stdout(&o).lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "0.000000000", "{line}");
        assert_eq!(fields[4], "true", "{line}");
        let norm: f64 = fields[2].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-8);
    }

    let o = run(&["trace", "grover", "--n", "3", "--a", "5"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let interior = &rows[2..rows.len() - 1];
    assert!(!interior.is_empty());
    for line in interior {
        assert!(line.ends_with("false"), "{line}");
    }
}

#[test]
fn trace_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    assert!(run(&[
        "trace",
        "grover",
        "--n",
        "3",
        "--a",
        "2",
        "--out",
        path_a.to_str().unwrap()
    ])
    .status
    .success());
    assert!(run(&[
        "trace",
        "grover",
        "--n",
        "3",
        "--a",
        "2",
        "--out",
        path_b.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        std::fs::read(&path_a).unwrap(),
        std::fs::read(&path_b).unwrap()
    );
}

#[test]
fn solve_penny_equilibrium() {
    let o = run(&["solve", "penny"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("value 0.500000000000"), "{text}");
    assert!(text.contains("col_mixture I=0.5"), "{text}");
    let expl_line = text
        .lines()
        .find(|l| l.starts_with("exploitability"))
        .expect("exploitability line");
    let value: f64 = expl_line
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= 1e-6, "{expl_line}");
}

#[test]
fn bench_is_byte_identical_per_seed() {
    let args = [
        "bench",
        "classical-guess",
        "--n",
        "6",
        "--trials",
        "5000",
        "--seed",
        "7",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);

    let o = run(&["bench", "classical-bv", "--n", "8"]);
    let text = stdout(&o);
    assert!(text.contains("queries 8"), "{text}");
    assert!(text.contains("quantum_comparator 1"), "{text}");
}

#[test]
fn export_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grover.json");
    assert!(run(&[
        "export",
        "grover",
        "--n",
        "2",
        "--a",
        "3",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let selector = format!("file:{}", path.display());
    let from_file = run(&["run", &selector, "--a", "3"]);
    let direct = run(&["run", "grover", "--n", "2", "--a", "3"]);
    assert!(from_file.status.success());
    assert_eq!(
        stdout(&from_file).lines().skip(1).collect::<Vec<_>>(),
        stdout(&direct).lines().skip(1).collect::<Vec<_>>()
    );
}

fn play_scripted(args: &[&str], script: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(script.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn scripted_play_is_deterministic_and_reprompts() {
    let args = ["play", "penny", "--seed", "7"];
    let script = "flip\nbogus\nstay\n";
    let first = play_scripted(&args, script);
    let second = play_scripted(&args, script);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.contains("picard: flip"), "{text}");
    assert!(text.contains("invalid input 'bogus'"), "{text}");
    assert!(text.contains("outcome: Q wins"), "{text}");
    assert!(text.contains("session ended"), "{text}");

    let o = play_scripted(&["play", "bv", "--n", "3", "--seed", "1"], "110\n");
    let text = stdout(&o);
    assert!(text.contains("Q announces a = 110"), "{text}");
    assert!(text.contains("win_probability 1.000000000000"), "{text}");
}

#[test]
fn exit_codes_follow_sysexits() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\":").unwrap();
    let o = run(&["run", &format!("file:{}", bad.display())]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "nosuchgame"]);
    assert_eq!(o.status.code(), Some(64));

    let o = run(&["run", "grover", "--n", "2"]);
    assert_eq!(o.status.code(), Some(64));

    let o = run(&["run", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(64));

    let o = run(&["trace", "penny", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(74));
}
