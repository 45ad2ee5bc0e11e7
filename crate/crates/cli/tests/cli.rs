use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use afe_core::harness::RemainderSample;
use afe_core::hp::Precision;

fn afe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afe")).args(args).arg("--out").arg(dir).output().expect("binary runs")
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn identities_hold_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = afe(dir.path(), &["identities", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = lines(&dir.path().join("identities.csv"));
    assert_eq!(rows[0], "trial,seed,N_or_x1x2,residual");
    assert_eq!(rows.len(), 151);
    assert!(rows[1..].iter().all(|r| r.ends_with(",0")));
}

#[test]
fn theorem1_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = afe(
        dir.path(),
        &["theorem1", "--pair", "zeta,zeta", "--sigma", "0.5", "--t", "40", "--rho1", "1", "--rho2", "1"],
    );
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&dir.path().join("theorem1.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("s_re,s_im,x1,x2,I1_re"));
}

#[test]
fn bounds_writes_csv_plot_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = afe(dir.path(), &["bounds", "--claim", "corollary2", "--q", "4", "--prec", "128", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = lines(&dir.path().join("bounds.csv"));
    assert_eq!(rows.len(), 41);
    let p = Precision::new(128).unwrap();
    for row in &rows[1..] {
        let sample = RemainderSample::from_csv_row(row, p).unwrap();
        assert_eq!(&sample.csv_row(p.decimal_digits()), row);
        assert_eq!(sample.seed, 5);
    }
    let script = fs::read_to_string(dir.path().join("bounds.gp")).unwrap();
    assert!(script.contains("set logscale xy") && script.contains("bounds.csv"));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["precision_bits"], 128);
    assert_eq!(manifest["subcommand"]["claim"], "corollary2");
    assert!(manifest["git_describe"].is_string());
}

#[test]
fn sweep_csv_shapes_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sweep", "--family", "zeta", "--points", "40", "--prec", "128"];
    assert_eq!(afe(a.path(), &args).status.code(), Some(0));
    assert_eq!(afe(b.path(), &args).status.code(), Some(0));
    let first = fs::read(a.path().join("sweep.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("sweep.csv")).unwrap());
    assert_eq!(lines(&a.path().join("sweep.csv")).len(), 41);

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(afe(empty.path(), &["sweep", "--points", "0"]).status.code(), Some(0));
    assert_eq!(lines(&empty.path().join("sweep.csv")), vec![afe_core::harness::SAMPLE_CSV_HEADER.to_string()]);
}

#[test]
fn product_sweep_has_breakdown_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = afe(dir.path(), &["sweep", "--family", "zeta,l4", "--points", "4", "--t-max", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1].split(',').count(), afe_core::afe::CSV_HEADER.split(',').count());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(afe(dir.path(), &["theorem1", "--nope"]).status.code(), Some(2));
    assert_eq!(afe(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(afe(dir.path(), &["remainder", "--family", "eta", "--t", "5"]).status.code(), Some(2));
    assert_eq!(afe(dir.path(), &["bounds", "--claim", "corollary9"]).status.code(), Some(2));
    assert_eq!(afe(dir.path(), &["sweep", "--branch", "sideways"]).status.code(), Some(2));
}

#[test]
fn broken_branch_choice_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["corollary1", "--family", "sqrt-zeta", "--sigma", "0.25", "--t", "30", "--prec", "128"];
    let mut principal = args.to_vec();
    principal.extend(["--branch", "principal"]);
    assert_eq!(afe(dir.path(), &principal).status.code(), Some(1));
    let mut sweep = args.to_vec();
    sweep.extend(["--branch", "sweep"]);
    let out = afe(dir.path(), &sweep);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(lines(&dir.path().join("roots.csv")).len(), 3);
}

#[test]
fn divisor_and_theorem2_pass() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(afe(dir.path(), &["divisor", "--limit", "5000"]).status.code(), Some(0));
    assert_eq!(afe(dir.path(), &["theorem2", "--q", "4", "--t", "40"]).status.code(), Some(0));
    assert_eq!(lines(&dir.path().join("theorem2.csv")).len(), 2);
}
