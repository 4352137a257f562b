//! End-to-end tests of the `ising-detect` binary: flag parsing, output
//! formats, cross-tool pipelines, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ising-detect"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?} for {args:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn sample_histogram_sums_to_draw_count() {
    let text = run_ok(&[
        "sample", "--n", "10", "--theta", "0.5", "--draws", "200", "--seed", "3", "--histogram",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value,count"));
    let mut total = 0u64;
    for line in lines {
        let (value, count) = line.split_once(',').expect("two fields");
        let value: i64 = value.parse().unwrap();
        assert!(value.abs() <= 10 && value % 2 == 0, "impossible total {value} for n=10");
        total += count.parse::<u64>().unwrap();
    }
    assert_eq!(total, 200);
}

#[test]
fn sample_then_stat_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let sample_path = dir.path().join("draws.txt");
    let text = run_ok(&[
        "sample", "--n", "12", "--theta", "0.8", "--draws", "5", "--seed", "11",
    ]);
    std::fs::write(&sample_path, &text).unwrap();

    // Five rows of 12 spins each.
    let rows: Vec<Vec<i64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse::<i64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.len() == 12 && r.iter().all(|s| s.abs() == 1)));

    let stat_out = run_ok(&[
        "stat", "--input", sample_path.to_str().unwrap(), "--stat", "sqrt-n-mean",
    ]);
    let mut lines = stat_out.lines();
    assert_eq!(lines.next(), Some("index,statistic"));
    let values: Vec<f64> = lines
        .map(|l| l.split_once(',').unwrap().1.parse::<f64>().unwrap())
        .collect();
    assert_eq!(values.len(), 5);
    // Cross-check against a by-hand evaluation of sqrt(n) * mean.
    for (row, got) in rows.iter().zip(&values) {
        let want = row.iter().sum::<i64>() as f64 / (12f64).sqrt();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn theory_reports_closed_forms() {
    let text = run_ok(&["theory", "--theta", "0.5"]);
    assert!(text.starts_with("quantity,parameter,value"));
    let field = |name: &str, param: &str| -> f64 {
        text.lines()
            .find_map(|l| {
                let mut parts = l.split(',');
                (parts.next() == Some(name) && parts.next() == Some(param))
                    .then(|| parts.next().unwrap().parse::<f64>().unwrap())
            })
            .unwrap_or_else(|| panic!("missing row {name},{param}"))
    };
    // N(0, 2) upper 5% point.
    let q95 = field("null_quantile", "p=0.95");
    assert!((q95 - 1.6448536269514722 * 2f64.sqrt()).abs() < 1e-9, "q95 = {q95}");
    assert!((field("detection_boundary", "a=0.2") - 0.3).abs() < 1e-12);
    // Subcritical: magnetization is zero and no conditional variance row.
    assert_eq!(field("spontaneous_magnetization", "theta=0.5"), 0.0);
    assert!(!text.contains("conditional_variance"));

    let low = run_ok(&["theory", "--theta", "1.5"]);
    let mag = low
        .lines()
        .find(|l| l.starts_with("spontaneous_magnetization"))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert!((mag - 0.8586).abs() < 1e-3, "m(1.5) = {mag}");
    assert!(low.contains("conditional_variance"));
}

#[test]
fn calibrate_emits_one_csv_row() {
    let text = run_ok(&[
        "calibrate", "--n", "50", "--theta", "0.5", "--stat", "sqrt-n-mean", "--alpha", "0.1",
        "--m-null", "200", "--seed", "9",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,n,s,B,stat,alpha,m_null,replicates,crit,p_hat,ci"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[..8], ["0.5", "50", "0", "0", "sqrt_n_mean", "0.1", "200", "0"]);
    let crit: f64 = row[8].parse().unwrap();
    assert!(crit.is_finite() && crit > 0.0);
    assert_eq!(lines.next(), None);
}

#[test]
fn power_row_is_deterministic() {
    let args = [
        "power", "--n", "60", "--theta", "0.5", "--s", "6", "--strength", "1.0", "--stat",
        "sqrt-n-mean", "--alpha", "0.1", "--m-null", "300", "--replicates", "200", "--seed", "5",
    ];
    let first = run_ok(&args);
    let second = run_ok(&args);
    assert_eq!(first, second);
    let row: Vec<&str> = first.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "6");
    let p_hat: f64 = row[9].parse().unwrap();
    assert!((0.0..=1.0).contains(&p_hat), "p_hat = {p_hat}");
    let ci: f64 = row[10].parse().unwrap();
    assert!(ci > 0.0 && ci < 0.5);
}

#[test]
fn figure1_writes_surface_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("out").join("fig");
    let stdout = run_ok(&[
        "figure1", "--theta", "0.5", "--n", "60", "--m-null", "200", "--replicates", "100",
        "--step", "0.25", "--seed", "4", "--out", prefix.to_str().unwrap(),
    ]);
    assert!(stdout.contains("wrote"), "stdout: {stdout}");

    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a,r,s,B,crit,p_hat,ci"));
    assert_eq!(lines.count(), 4, "0.25-step grid over (0, 0.5] is 2 x 2");

    let boundary_path = dir.path().join("out").join("fig_boundary.csv");
    let boundary = std::fs::read_to_string(boundary_path).unwrap();
    assert!(boundary.starts_with("a,r_boundary"));

    let pgm = std::fs::read_to_string(prefix.with_extension("pgm")).unwrap();
    assert!(pgm.starts_with("P2\n"), "plain-text PGM header");
}

#[test]
fn figure1_output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut results = Vec::new();
    for threads in ["1", "3"] {
        let prefix = dir.path().join(format!("t{threads}"));
        let out = bin()
            .args([
                "figure1", "--theta", "0.5", "--n", "60", "--m-null", "150", "--replicates",
                "100", "--step", "0.25", "--seed", "8", "--out", prefix.to_str().unwrap(),
            ])
            .env("ISING_DETECT_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        results.push(std::fs::read(prefix.with_extension("csv")).unwrap());
    }
    assert_eq!(results[0], results[1], "CSV must not depend on ISING_DETECT_THREADS");
}

#[test]
fn dump_coupling_matches_family_definition() {
    let text = run_ok(&["dump-coupling", "--n", "4", "--theta", "0.8"]);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 4);
        for (j, q) in row.iter().enumerate() {
            let want = if i == j { 0.0 } else { 0.2 };
            assert!((q - want).abs() < 1e-15, "Q[{i}][{j}] = {q}");
        }
    }
}

#[test]
fn verify_quick_passes_and_reports() {
    let out = run_raw(&["verify", "--scale", "quick", "--seed", "42"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "verify failed:\n{stdout}");
    assert!(stdout.contains("PASS"), "report should list checks:\n{stdout}");
    assert!(!stdout.contains("FAIL"), "quick suite must be green:\n{stdout}");
}

#[test]
fn errors_exit_with_code_two() {
    let missing = run_raw(&["stat", "--input", "/nonexistent/draws.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&missing.stderr).is_empty());

    let bad_kind = run_raw(&["sample", "--kind", "moebius"]);
    assert_eq!(bad_kind.status.code(), Some(2));

    let bad_threads = bin()
        .args(["calibrate", "--n", "30", "--m-null", "100"])
        .env("ISING_DETECT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_threads.stderr).contains("ISING_DETECT_THREADS"));
}

#[test]
fn stat_rejects_malformed_spins() {
    let dir = tempfile::tempdir().unwrap();
    let path: &Path = &dir.path().join("bad.txt");
    std::fs::write(path, "1 -1 2 -1\n").unwrap();
    let out = run_raw(&["stat", "--input", path.to_str().unwrap(), "--stat", "sqrt-n-mean"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected +-1"));
}
