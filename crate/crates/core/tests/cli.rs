use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ioncav::cli::{EXIT_CAP, EXIT_OK, EXIT_REGIME, EXIT_TOLERANCE, EXIT_USAGE};

fn sim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sim(&["--help"], dir.path())), EXIT_OK);
    assert_eq!(code(&sim(&["nlms", "--k", "12"], dir.path())), EXIT_USAGE);
    assert_eq!(code(&sim(&["figure", "9"], dir.path())), EXIT_USAGE);
    assert_eq!(code(&sim(&["figure", "1", "--points", "0"], dir.path())), EXIT_USAGE);
    assert!(!dir.path().join("figure1.csv").exists());
}

#[test]
fn figure_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["figure", "4", "--points", "11"], dir.path());
    assert_eq!(code(&o), EXIT_OK);
    let text = fs::read_to_string(dir.path().join("figure4.csv")).unwrap();
    let header = text.lines().find(|l| l.starts_with("# time,")).expect("column line");
    let width = header.trim_start_matches("# ").split(',').count();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), width);
        assert!(cells[1..].iter().all(|s| (-1e-12..1.0).contains(s)));
    }
    assert!(rows[0].split(',').skip(1).all(|c| c.parse::<f64>().unwrap().abs() < 1e-12));
}

#[test]
fn figure_overrides_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let base = sim(&["figure", "1", "--points", "5", "--out", "a.csv"], dir.path());
    let over = sim(&["figure", "1", "--points", "5", "--out", "b.csv", "--set", "field=0.5"], dir.path());
    assert_eq!(code(&base), EXIT_OK);
    assert_eq!(code(&over), EXIT_OK);
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_ne!(a, b);
    assert_eq!(code(&sim(&["figure", "1", "--set", "bogus=1"], dir.path())), EXIT_USAGE);
}

#[test]
fn nlms_writes_report_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["nlms", "--k", "12", "--alpha", "1", "--sweep", "8,12", "--out", "run"], dir.path());
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("run_report.txt").exists());
    let sweep = fs::read_to_string(dir.path().join("run_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert_eq!(code(&sim(&["nlms", "--k", "1", "--alpha", "1"], dir.path())), EXIT_REGIME);
}

#[test]
fn regime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ok.cfg"), "n_ions = 1\nnu = 400\nomega_c = 100\ndelta = 20\ng = 1\neta = 0.1\n").unwrap();
    assert_eq!(code(&sim(&["regime", "--config", "ok.cfg"], dir.path())), EXIT_OK);
    assert_eq!(code(&sim(&["regime", "--config", "ok.cfg", "--set", "delta=2"], dir.path())), EXIT_REGIME);
    assert_eq!(code(&sim(&["regime", "--config", "missing.cfg"], dir.path())), EXIT_USAGE);
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for case in ["A", "B", "C"] {
        assert_eq!(code(&sim(&["compare", "--case", case], dir.path())), EXIT_OK);
    }
    assert_eq!(code(&sim(&["compare", "--case", "B", "--tol", "1e-16"], dir.path())), EXIT_TOLERANCE);
    assert_eq!(code(&sim(&["compare", "--case", "A", "--n-ions", "6", "--n-max", "20"], dir.path())), EXIT_CAP);
}
