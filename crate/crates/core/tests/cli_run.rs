use std::fs;
use std::path::Path;
use std::process::Command;

use ntk_equiv::experiment::quantile_sorted;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ntk-equiv"))
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

/// Drops the timing column so runs can be compared.
fn without_seconds(path: &Path) -> Vec<Vec<String>> {
    read_csv(path)
        .into_iter()
        .map(|mut row| {
            row.truncate(4);
            row
        })
        .collect()
}

#[test]
fn two_trials_one_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--trials",
            "2",
            "--models",
            "k1",
            "--n-obs",
            "60",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"n_obs\": 60"));
    let results = read_csv(&dir.path().join("results.csv"));
    assert_eq!(results.len(), 2);
    assert!(results.iter().all(|r| r[1] == "k1"));
    let summary = read_csv(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0][1], "2");
    assert!(!dir.path().join("errors.log").exists());
}

#[test]
fn rerun_from_manifest_reproduces_results() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--trials",
            "3",
            "--models",
            "ntkb1,ntkj2,gp1,k1,nn1",
            "--n-obs",
            "45",
            "--d-in",
            "4",
        ])
        .args([
            "--width",
            "32",
            "--epochs1",
            "50",
            "--seed",
            "7",
            "--workers",
            "2",
            "--out-dir",
        ])
        .arg(first.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let status = bin()
        .arg("--manifest")
        .arg(first.path().join("manifest.json"))
        .arg("--out-dir")
        .arg(second.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(
        without_seconds(&first.path().join("results.csv")),
        without_seconds(&second.path().join("results.csv"))
    );
    for f in ["summary.csv", "boxplot.csv"] {
        assert_eq!(
            fs::read(first.path().join(f)).unwrap(),
            fs::read(second.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn boxplot_matches_independent_quantiles() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--trials",
            "7",
            "--models",
            "ntkb1,gp2",
            "--n-obs",
            "40",
            "--d-in",
            "3",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let results = read_csv(&dir.path().join("results.csv"));
    for row in read_csv(&dir.path().join("boxplot.csv")) {
        let mut v: Vec<f64> = results
            .iter()
            .filter(|r| r[1] == row[0])
            .map(|r| r[2].parse().unwrap())
            .collect();
        assert_eq!(v.len(), 7);
        v.sort_by(f64::total_cmp);
        // order statistics 0..6: q1 at position 1.5, q3 at 4.5
        let expected = [v[0], (v[1] + v[2]) / 2.0, v[3], (v[4] + v[5]) / 2.0, v[6]];
        for (k, e) in expected.iter().enumerate() {
            let got: f64 = row[k + 1].parse().unwrap();
            assert!(
                (got - e).abs() <= 1e-15 * e.abs(),
                "{} column {k}: {got} vs {e}",
                row[0]
            );
        }
        assert_eq!(quantile_sorted(&v, 0.25), expected[1]);
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let out = bin().args(["--trials", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--trials"));
    let out = bin().arg("--no-such-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diverging_network_exits_with_two_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--trials", "1", "--models", "nn1,k1", "--n-obs", "30", "--d-in", "3",
        ])
        .args([
            "--width",
            "8",
            "--lr",
            "1e6",
            "--epochs1",
            "200",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let log = fs::read_to_string(dir.path().join("errors.log")).unwrap();
    assert!(log.contains("nn1"), "{log}");
    assert_eq!(read_csv(&dir.path().join("results.csv")).len(), 1);
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = bin()
        .args([
            "--trials",
            "1",
            "--models",
            "k1",
            "--n-obs",
            "9",
            "--d-in",
            "2",
            "--out-dir",
        ])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
