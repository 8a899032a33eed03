use std::path::Path;
use std::process::{Command, Output};

use liouvq::formats::{IsingOut, SpecFile, SpectrumOut, C};
use liouvq::run::{FIG1_FIELD_FILE, FIG1_GAP_FILE, FIG1_LENGTH_FILE};
use liouvq_core::model::{xy_chain_spec, XYChainParams};

fn liouvq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouvq")).args(args).output().unwrap()
}

fn liouvq_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouvq"))
        .env("LIOUVQ_THREADS", threads)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn near_all(got: &[C], expected: &[(f64, f64)], tol: f64) -> bool {
    let mut used = vec![false; got.len()];
    got.len() == expected.len()
        && expected.iter().all(|&(re, im)| {
            let hit = got
                .iter()
                .enumerate()
                .position(|(k, c)| !used[k] && (c.re - re).hypot(c.im - im) < tol);
            hit.map(|k| used[k] = true).is_some()
        })
}

#[test]
fn ising_spectrum_from_flags() {
    let text = stdout(&liouvq(&["spectrum", "--L", "4", "--J", "1", "--gamma", "1", "--hz", "0", "--g1", "1", "--gL", "1"]));
    let out: SpectrumOut = serde_json::from_str(&text).unwrap();
    let w = 15f64.sqrt() / 4.0;
    let expected = [
        (-0.5, 0.0),
        (-0.5, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (-0.25, w),
        (-0.25, w),
        (-0.25, -w),
        (-0.25, -w),
    ];
    assert!(near_all(&out.lambda_p, &expected, 1e-9), "{:?}", out.lambda_p);
    assert_eq!(out.pairs.len(), 4);
    assert!(out.gap.abs() < 1e-9);
    assert!((out.paired_trace.re + 2.0).abs() < 1e-9);
    assert_eq!((out.right_vectors.rows, out.right_vectors.cols), (8, 8));
}

#[test]
fn ising_closed_form_members() {
    let text = stdout(&liouvq(&["ising", "--L", "30", "--J", "1", "--g1", "2", "--gL", "6"]));
    let out: IsingOut = serde_json::from_str(&text).unwrap();
    assert_eq!(out.values.len(), 60);
    assert!(out.max_distance < 1e-12);
    let w2 = 12f64.sqrt() / 4.0;
    let w6 = 20f64.sqrt() / 4.0;
    let expected = [
        (-1.5 + w6, 0.0),
        (-1.5 - w6, 0.0),
        (-3.0, 0.0),
        (-1.0, 0.0),
        (-0.5, w2),
        (-0.5, -w2),
        (0.0, 1.0),
        (0.0, -1.0),
    ];
    assert!(near_all(&out.distinct, &expected, 1e-12), "{:?}", out.distinct);
}

#[test]
fn gap_scan_reports_power_law() {
    let out = liouvq(&["gap-scan", "--gamma", "1", "--hz", "0.01", "--Lmin", "20", "--Lmax", "100", "--Lstep", "10"]);
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "L,gap");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("20,"));
    assert!(lines[9].starts_with("100,"));
    let err = String::from_utf8(out.stderr).unwrap();
    let slope: f64 = err
        .split_whitespace()
        .find_map(|w| w.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 3.0).abs() <= 0.3, "slope {slope}");
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["gap-scan", "--gamma", "0.6", "--hz", "0.2", "--Lmin", "4", "--Lmax", "30", "--format", "json"];
    assert_eq!(stdout(&liouvq_with_threads("1", &args)), stdout(&liouvq_with_threads("7", &args)));
}

#[test]
fn fig1_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(a.path(), "1"), (b.path(), "4")] {
        let out = liouvq_with_threads(threads, &["fig1", "--output", dir.to_str().unwrap()]);
        let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(summary["fits"].as_array().unwrap().len(), 3);
    }
    for name in [FIG1_GAP_FILE, FIG1_LENGTH_FILE, FIG1_FIELD_FILE] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
    let gap = std::fs::read_to_string(a.path().join(FIG1_GAP_FILE)).unwrap();
    assert_eq!(gap.lines().next(), Some("hz_over_J,L,gap"));
    assert_eq!(gap.lines().count(), 1 + 3 * 9);
    let by_length = std::fs::read_to_string(a.path().join(FIG1_LENGTH_FILE)).unwrap();
    for l in ["50,", "75,", "100,"] {
        assert!(by_length.lines().any(|r| r.starts_with(l)), "no cluster rows for L = {l}");
    }
}

#[test]
fn model_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let params = XYChainParams::with_boundary_couplings(3, 1.0, 0.7, 0.2, 1.0, 0.5);
    let file = SpecFile::from_spec(&xy_chain_spec(&params).unwrap());
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let from_file = stdout(&liouvq(&["ness", "--spec", path.to_str().unwrap()]));
    let from_flags = stdout(&liouvq(&["ness", "--L", "3", "--gamma", "0.7", "--hz", "0.2", "--g1", "1", "--gL", "0.5"]));
    assert_eq!(from_file, from_flags);
}

#[test]
fn oracle_check_agrees_with_lyapunov() {
    let text = stdout(&liouvq(&["oracle-check", "--L", "3", "--gamma", "0.7", "--hz", "0.2", "--lp1", "0.6", "--lm1", "0.4", "--lmL", "0.5"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["ness_status"], "compared");
    assert!(v["correlation_diff"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["all_members_found"], true);
    assert_eq!(v["superop_spectrum"].as_array().unwrap().len(), 64);
}

#[test]
fn analytic_csv_has_one_row_per_root() {
    let csv = stdout(&liouvq(&["analytic", "--L", "6", "--gamma", "0.3", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("sign,theta_re,theta_im,lambda_re,lambda_im,branch"));
    assert_eq!(lines.len(), 1 + 12);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(liouvq(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(liouvq(&["nonsense"]).status.code(), Some(2));
    let o = liouvq(&["spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(report["error"], "usage");
    assert_eq!(liouvq(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_reports_json_and_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ness.json");
    let o = liouvq(&["ness", "--L", "4", "--gamma", "1", "--hz", "0", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(report["error"], "numerical");
    assert_eq!(report["kind"], "MarginalSpectrum");
    assert!(!Path::new(&path).exists());
}

#[test]
fn unwritable_output_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join(FIG1_FIELD_FILE)).unwrap();
    let o = liouvq(&["fig1", "--Lmin", "20", "--Lmax", "30", "--Lstep", "10", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join(FIG1_GAP_FILE).exists());
    assert!(!dir.path().join(FIG1_LENGTH_FILE).exists());
}
