use std::ffi::OsString;
use std::fs;
use std::path::Path;

use super::{default_workers, execute, exit, Cli};
use clap::Parser;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn chargeq<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let argv = std::iter::once(OsString::from("chargeq"))
        .chain(args.iter().map(|a| a.as_ref().to_os_string()));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return Run {
                code: exit::PARSE.into(),
                stdout: String::new(),
                stderr: e.to_string(),
            }
        }
    };
    let mut out = Vec::new();
    let (code, stderr) = match execute(&cli, default_workers(&cli), &mut out) {
        Ok(code) => (code, String::new()),
        Err(e) => (e.exit_code(), e.to_string()),
    };
    Run {
        code: code.into(),
        stdout: String::from_utf8(out).unwrap(),
        stderr,
    }
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find(|l| l.starts_with(key))
        .and_then(|l| l.split_whitespace().last())
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no '{key}' in:\n{text}"))
}

/// Arguments of the `# chargeq ...` echo line.
fn echoed_args(stdout: &str) -> Vec<String> {
    let line = stdout.lines().next().expect("echo line");
    let rest = line.strip_prefix("# chargeq ").expect("echo prefix");
    rest.split_whitespace().map(String::from).collect()
}

fn write_zero_path(dir: &Path, n: usize, nu: usize) -> String {
    let path = chargeq::ControlPath::zeros(n, nu);
    let file = dir.join(format!("zero_{n}_{nu}.csv"));
    fs::write(&file, path.to_table()).unwrap();
    file.to_str().unwrap().to_string()
}

#[test]
fn simulate_zero_path_against_identity() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_zero_path(dir.path(), 2, 4);
    let run = chargeq(&[
        "simulate",
        "--path",
        &file,
        "--target",
        "identity-2",
        "--steps",
        "10",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("[convention ordered]"));
    assert!(run.stdout.contains("[convention unordered]"));
    for key in [
        "error fixed-0",
        "error best-representative",
        "error phase-free",
    ] {
        assert_eq!(field(&run.stdout, key), 0.0);
    }
    assert!(run.stdout.contains("self_convergence steps 10 vs 20"));
}

#[test]
fn simulate_prints_unitary_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_zero_path(dir.path(), 1, 2);
    let run = chargeq(&[
        "simulate",
        "--path",
        &file,
        "--target",
        "identity-1",
        "--convention",
        "ordered",
        "--print-unitary",
    ]);
    assert_eq!(run.code, 0);
    let after: Vec<&str> = run
        .stdout
        .lines()
        .skip_while(|l| *l != "unitary")
        .skip(1)
        .collect();
    assert_eq!(after.len(), 2);
    assert!(after[0].trim().starts_with("+1.000000000e0"));
}

#[test]
fn parse_errors_report_position_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.csv");
    fs::write(&file, "time,Bz1,Bx1\n1,0,0\n2,0.5,abc\n3,0,0\n").unwrap();
    let run = chargeq(&[
        "simulate".as_ref(),
        "--path".as_ref(),
        file.as_os_str(),
        "--target".as_ref(),
        "identity-1".as_ref(),
    ]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("line 3"), "{}", run.stderr);
    assert!(run.stderr.contains("column 3"), "{}", run.stderr);

    let missing = chargeq(&[
        "simulate",
        "--path",
        "/nonexistent/x.csv",
        "--target",
        "cnot",
    ]);
    assert_eq!(missing.code, 2);

    let unknown = chargeq(&["simulate", "--path", "x.csv", "--target", "nonsense"]);
    assert_eq!(unknown.code, 2);
}

#[test]
fn optimize_rejects_insufficient_control_points_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toffoli_best.csv");
    let run = chargeq(&[
        "optimize".as_ref(),
        "--target".as_ref(),
        "toffoli".as_ref(),
        "--nu".as_ref(),
        "7".as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert!(!out.exists());
}

#[test]
fn optimize_identity_writes_zero_path_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("id.csv");
    let report = dir.path().join("id.txt");
    let run = chargeq(&[
        "optimize".as_ref(),
        "--target".as_ref(),
        "identity-2".as_ref(),
        "--steps".as_ref(),
        "10".as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
        "--report".as_ref(),
        report.as_os_str(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(field(&run.stdout, "best error") < 1e-10);
    let path = chargeq::ControlPath::from_table(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(path, chargeq::ControlPath::zeros(2, 4));
    let saved = fs::read_to_string(&report).unwrap();
    assert!(run.stdout.ends_with(&saved));
}

#[test]
fn unconverged_optimization_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cnot.csv");
    let run = chargeq(&[
        "optimize".as_ref(),
        "--target".as_ref(),
        "cnot".as_ref(),
        "--steps".as_ref(),
        "5".as_ref(),
        "--max-restarts".as_ref(),
        "1".as_ref(),
        "--restart-evals".as_ref(),
        "50".as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(run.code, 4, "{}", run.stderr);
    assert!(
        out.exists(),
        "artifacts are written even without convergence"
    );
}

#[test]
fn echo_line_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cnot.csv");
    let first = chargeq(&[
        "optimize".as_ref(),
        "--target".as_ref(),
        "cnot".as_ref(),
        "--steps".as_ref(),
        "5".as_ref(),
        "--max-restarts".as_ref(),
        "2".as_ref(),
        "--restart-evals".as_ref(),
        "80".as_ref(),
        "--seed".as_ref(),
        "3".as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    let table = fs::read_to_string(&out).unwrap();
    fs::remove_file(&out).unwrap();
    let again = chargeq(&echoed_args(&first.stdout));
    assert_eq!(first.code, again.code);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(table, fs::read_to_string(&out).unwrap());

    let sim = chargeq(&[
        "simulate".as_ref(),
        "--path".as_ref(),
        out.as_os_str(),
        "--target".as_ref(),
        "cnot".as_ref(),
    ]);
    let rerun = chargeq(&echoed_args(&sim.stdout));
    assert_eq!(sim.stdout, rerun.stdout);
}

#[test]
fn scan_is_seeded_and_flat_at_zero_width() {
    let dir = tempfile::tempdir().unwrap();
    let center = write_zero_path(dir.path(), 2, 4);
    let grid = |name: &str, width: &str| {
        let out = dir.path().join(name);
        let run = chargeq(&[
            "scan".as_ref(),
            "--path".as_ref(),
            center.as_ref(),
            "--target".as_ref(),
            "identity-2".as_ref(),
            "--steps".as_ref(),
            "5".as_ref(),
            "--grid".as_ref(),
            "5".as_ref(),
            "--half-width".as_ref(),
            width.as_ref(),
            "--seed".as_ref(),
            "4".as_ref(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        (run.stdout, fs::read_to_string(out).unwrap())
    };
    let (stdout, a) = grid("a.txt", "0.05");
    let (_, b) = grid("b.txt", "0.05");
    assert_eq!(a, b);
    assert!(
        stdout.contains("grid_min 0.000000000000000e0 at (2, 2)"),
        "{stdout}"
    );
    let values: Vec<Vec<f64>> = a
        .lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(values.len(), 5);
    assert!(values.iter().all(|r| r.len() == 5));

    let (_, flat) = grid("flat.txt", "0");
    assert!(flat
        .split_whitespace()
        .all(|v| v.parse::<f64>().unwrap() == 0.0));

    let even = chargeq(&[
        "scan",
        "--path",
        &center,
        "--target",
        "identity-2",
        "--grid",
        "4",
    ]);
    assert_eq!(even.code, 2);
}

#[test]
fn scan_accepts_direction_file() {
    let dir = tempfile::tempdir().unwrap();
    let center = write_zero_path(dir.path(), 1, 2);
    let dirs = dir.path().join("dirs.txt");
    fs::write(&dirs, "1 0 0 0\n0 1 0 0\n").unwrap();
    let run = chargeq(&[
        "scan".as_ref(),
        "--path".as_ref(),
        center.as_ref(),
        "--target".as_ref(),
        "identity-1".as_ref(),
        "--grid".as_ref(),
        "3".as_ref(),
        "--directions".as_ref(),
        dirs.as_os_str(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rows: Vec<&str> = run.stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
}

#[test]
fn sensitivity_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_zero_path(dir.path(), 1, 2);
    let base = [
        "sensitivity",
        "--path",
        &path,
        "--target",
        "identity-1",
        "--steps",
        "10",
    ];

    let zero = chargeq(&[&base[..], &["--rms", "0", "--trials", "3"]].concat());
    assert_eq!(zero.code, 0, "{}", zero.stderr);
    let rows: Vec<&str> = zero
        .stdout
        .lines()
        .skip_while(|l| !l.starts_with("rms "))
        .skip(1)
        .take_while(|l| !l.starts_with("slope"))
        .collect();
    assert_eq!(rows, vec!["0e0 0.000000e0 0.000000e0"]);
    assert!(zero.stdout.contains("slope n/a"));

    let one = chargeq(&[&base[..], &["--rms", "1e-3,1e-2", "--trials", "1"]].concat());
    let many = chargeq(&[&base[..], &["--rms", "1e-3,1e-2", "--trials", "20"]].concat());
    let shape = |s: &str| {
        s.lines()
            .skip(1)
            .map(|l| l.split_whitespace().count())
            .collect::<Vec<_>>()
    };
    assert_eq!(shape(&one.stdout), shape(&many.stdout));
    let sd = |s: &str| -> f64 {
        s.lines()
            .find(|l| l.starts_with("1e-2"))
            .unwrap()
            .split_whitespace()
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(sd(&one.stdout), 0.0);
    assert!(sd(&many.stdout) > 0.0);
}

#[test]
fn cost_table_and_custom_counts() {
    let run = chargeq(&["cost"]);
    assert_eq!(run.code, 0);
    let times: Vec<u64> = run
        .stdout
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(times, vec![25, 15, 15, 1030, 13]);

    let custom = |args: &[&str]| -> u64 {
        let run = chargeq(&[&["cost"][..], args].concat());
        run.stdout
            .lines()
            .last()
            .unwrap()
            .split_whitespace()
            .last()
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(custom(&["--two", "0", "--three", "0"]), 0);
    assert_eq!(custom(&["--three", "2"]), 26);
}
