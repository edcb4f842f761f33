use std::path::Path;
use std::process::{Command, Output};

use bootcorr_cli::csvio::read_matrix;
use tempfile::TempDir;

fn bootcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bootcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(text: &[u8], key: &str) -> String {
    let text = String::from_utf8_lossy(text);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn write_data(dir: &Path, name: &str, rows: &[Vec<f64>]) -> String {
    let path = dir.join(name);
    let body: String = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn random_rows(n: usize, t: usize, seed: u64) -> Vec<Vec<f64>> {
    let data = bootcorr::generate_data(n, t, seed).unwrap();
    (0..n).map(|i| data.values().row(i).iter().copied().collect()).collect()
}

#[test]
fn occupancy_two_features() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("occ.csv");
    let res = bootcorr(&["occupancy", "2", "--samples", "0", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "u,exact_pmf,normal_cdf");
    assert!(lines[1].starts_with("1,0.5,"));
    assert!(lines[2].starts_with("2,0.5,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn occupancy_rejects_single_feature() {
    assert_eq!(bootcorr(&["occupancy", "1"]).status.code(), Some(2));
}

#[test]
fn occupancy_summary_reports_both_distances() {
    let res = bootcorr(&["occupancy", "100", "--samples", "10000", "--seed", "7"]);
    assert!(res.status.success());
    let strict: f64 = summary(&res.stderr, "ks_distance").parse().unwrap();
    let corrected: f64 = summary(&res.stderr, "ks_distance_continuity_corrected").parse().unwrap();
    // strict sits on the integer-lattice floor
    let floor = bootcorr::population_ks_distance(100).unwrap();
    assert!((strict - floor).abs() < 0.015, "{strict}");
    assert!(corrected < 0.05);
    assert_eq!(String::from_utf8_lossy(&res.stdout).lines().count(), 101);
}

#[test]
fn predict_half_probability_at_zero_argument() {
    // (μ-1) k = n puts the erf argument at zero
    let (mean, _) = bootcorr::exact_moments(100).unwrap();
    let k0 = 100.0 / (mean - 1.0);
    let res = bootcorr(&["predict", "--n", "100", "--t", "100", "--k", &k0.to_string()]);
    assert!(res.status.success());
    let p: f64 = summary(&res.stdout, "probability").parse().unwrap();
    assert!((p - 0.5).abs() < 1e-12);
}

#[test]
fn predict_budget_for_alpha() {
    let res = bootcorr(&["predict", "--n", "1000", "--t", "100", "--alpha", "0.01"]);
    assert!(res.status.success());
    let a: f64 = summary(&res.stdout, "a").parse().unwrap();
    assert!((a - 1.82).abs() < 0.01);
    let ceil: f64 = summary(&res.stdout, "k_plus_ceil").parse().unwrap();
    assert!(ceil <= 1000.0);
    assert_eq!(summary(&res.stdout, "k_upper"), "1000");
}

#[test]
fn predict_needs_one_mode() {
    assert_eq!(bootcorr(&["predict", "--n", "10", "--t", "5"]).status.code(), Some(2));
    let both = bootcorr(&["predict", "--n", "10", "--t", "5", "--k", "3", "--alpha", "0.1"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn regularize_single_replicate_with_many_features() {
    let dir = TempDir::new().unwrap();
    let input = write_data(dir.path(), "wide.csv", &random_rows(5, 200, 1));
    let out = dir.path().join("c.csv");
    let res = bootcorr(&["regularize", &input, "--k", "1", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(summary(&res.stdout, "positive_definite"), "true");
}

#[test]
fn regularize_with_k_equal_n_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = write_data(dir.path(), "x.csv", &random_rows(30, 8, 2));
    let out = dir.path().join("c.csv");
    let res = bootcorr(&["regularize", &input, "--k", "30", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(summary(&res.stdout, "positive_definite"), "true");
    assert_eq!(summary(&res.stdout, "k"), "30");

    let data = bootcorr_cli::load_data(Path::new(&input), false).unwrap();
    let direct = bootcorr::average_correlation(&data, 30, 4).unwrap();
    let parsed = read_matrix(&out).unwrap();
    let gap = (parsed.values - direct.matrix.values()).abs().max();
    assert!(gap <= 1e-12, "{gap}");
}

#[test]
fn regularize_too_few_replicates_exits_three() {
    let dir = TempDir::new().unwrap();
    let input = write_data(dir.path(), "x.csv", &random_rows(30, 8, 3));
    let out = dir.path().join("c.csv");
    let res = bootcorr(&["regularize", &input, "--k", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
    assert_eq!(summary(&res.stdout, "positive_definite"), "false");
    // the matrix is still written so callers can inspect it
    assert!(out.exists());
}

#[test]
fn regularize_constant_row_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = write_data(dir.path(), "c.csv", &[vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]]);
    let out = dir.path().join("o.csv");
    let res = bootcorr(&["regularize", &input, "--k", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("row 1"));
}

#[test]
fn regularize_missing_file_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    let missing = dir.path().join("nope.csv");
    let res = bootcorr(&["regularize", missing.to_str().unwrap(), "--k", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn regularize_auto_k_uses_budget() {
    let dir = TempDir::new().unwrap();
    let input = write_data(dir.path(), "x.csv", &random_rows(40, 10, 5));
    let out = dir.path().join("c.csv");
    let res = bootcorr(&["regularize", &input, "--auto-k", "--out", out.to_str().unwrap()]);
    let budget = bootcorr::BootstrapBudget::from_alpha(40, 10, 0.01).unwrap();
    assert_eq!(summary(&res.stdout, "k"), budget.recommended().to_string());
}

#[test]
fn regularize_transpose_matches_row_orientation() {
    let dir = TempDir::new().unwrap();
    let rows = random_rows(6, 12, 6);
    let cols: Vec<Vec<f64>> = (0..12).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let a = write_data(dir.path(), "a.csv", &rows);
    let b = write_data(dir.path(), "b.csv", &cols);
    let (oa, ob) = (dir.path().join("oa.csv"), dir.path().join("ob.csv"));
    bootcorr(&["regularize", &a, "--k", "3", "--out", oa.to_str().unwrap()]);
    bootcorr(&["regularize", &b, "--transpose", "--k", "3", "--out", ob.to_str().unwrap()]);
    assert_eq!(std::fs::read(oa).unwrap(), std::fs::read(ob).unwrap());
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--n", "20", "--t", "8", "--k-max", "12", "--trials", "40", "--seed", "3"];
    let first = bootcorr(&args);
    let second = bootcorr(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    assert_eq!(bootcorr(&threaded).stdout, first.stdout);
}

#[test]
fn simulate_many_features_always_definite() {
    let res = bootcorr(&["simulate", "--n", "10", "--t", "200", "--k-max", "5", "--trials", "30"]);
    assert!(res.status.success());
    let text = String::from_utf8_lossy(&res.stdout);
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some("1"), "{line}");
    }
}

#[test]
fn simulate_rejects_bad_config() {
    let res = bootcorr(&["simulate", "--n", "20", "--t", "8", "--k-min", "5", "--k-max", "3"]);
    assert_eq!(res.status.code(), Some(2));
}
