use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gatestab::circuit::{evaluate_objective, CircuitFile, StateVector};
use gatestab::classifier::{classify_sequence, ClassModel};
use gatestab::io::{read_assignments_csv, read_json, read_param_csv, write_param_csv, StabilizerManifest};
use gatestab::metrics::{cos_sq_f, CosSqModel};
use gatestab::numerics::Matrix;
use gatestab::params::GateParamMatrix;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn gatestab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatestab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str], out: &Path) {
    let o = gatestab(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn pipeline(out: &Path, seed: &str) {
    let config = data("pipeline.json");
    let config = config.to_str().unwrap();
    for cmd in ["simulate", "stabilize", "learn", "classify", "metrics"] {
        run_ok(&[cmd, "--config", config, "--seed", seed], out);
    }
}

fn read_csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn pipeline_is_bytewise_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    pipeline(&a, "7");
    pipeline(&b, "7");
    pipeline(&c, "8");
    let names = [
        "alpha.csv",
        "objective.csv",
        "stabilizer.json",
        "beta.csv",
        "learner.json",
        "class_model.json",
        "assignments.csv",
        "stability_report.json",
    ];
    for name in names {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_ne!(fs::read(a.join("alpha.csv")).unwrap(), fs::read(c.join("alpha.csv")).unwrap());
}

#[test]
fn simulate_outputs_match_recomputation() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&["simulate", "--config", data("pipeline.json").to_str().unwrap()], tmp.path());
    let alpha = read_param_csv(&tmp.path().join("alpha.csv")).unwrap();
    assert_eq!(alpha.runs(), 10);
    assert_eq!(alpha.gates(), 6);

    let circuit: CircuitFile = read_json(&data("ring4.json")).unwrap();
    let circuit = circuit.into_circuit().unwrap();
    let input = StateVector::plus(4).unwrap();
    let rows = read_csv_rows(&tmp.path().join("objective.csv"));
    assert_eq!(rows.len(), 10);
    for (r, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (r + 1).to_string());
        let recorded: f64 = row[1].parse().unwrap();
        let fresh = evaluate_objective(&circuit, &alpha.run(r), &input).unwrap();
        assert!((recorded - fresh).abs() < 1e-12);
    }
}

#[test]
fn stabilize_manifest_is_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let config = data("pipeline.json");
    let config = config.to_str().unwrap();
    run_ok(&["simulate", "--config", config], tmp.path());
    run_ok(&["stabilize", "--config", config], tmp.path());
    let first = fs::read(tmp.path().join("stabilizer.json")).unwrap();
    run_ok(&["stabilize", "--config", config], tmp.path());
    assert_eq!(first, fs::read(tmp.path().join("stabilizer.json")).unwrap());

    let manifest: StabilizerManifest = read_json(&tmp.path().join("stabilizer.json")).unwrap();
    let s = manifest.stabilizer().unwrap();
    assert!(manifest.flags.orthogonalized);
    let gram = s.transpose().matmul(&s).unwrap();
    assert!(gram.max_abs_diff(&Matrix::identity(s.cols())) < 1e-10);

    let alpha = read_param_csv(&tmp.path().join("alpha.csv")).unwrap();
    let beta = read_param_csv(&tmp.path().join("beta.csv")).unwrap();
    let recomputed = s.transpose().matmul(alpha.matrix()).unwrap();
    assert!(recomputed.max_abs_diff(beta.matrix()) < 1e-12);

    let json: serde_json::Value = serde_json::from_slice(&first).unwrap();
    for key in ["S", "eigenvalues", "F_star", "chi", "tau", "Omega", "flags"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn classify_rows_match_library() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<f64>> = vec![
        vec![0.2, 0.3, 2.9],
        vec![1.4, 1.6, 1.5],
        vec![0.2, 0.3, 2.9],
        vec![2.8, 3.0, 2.7],
        vec![0.5, 1.0, 2.0],
    ];
    let beta_path = tmp.path().join("input_beta.csv");
    write_param_csv(&beta_path, &GateParamMatrix::from_runs(&runs).unwrap()).unwrap();
    run_ok(
        &["classify", "--config", data("pipeline.json").to_str().unwrap(), "--beta", beta_path.to_str().unwrap()],
        tmp.path(),
    );
    let rows = read_assignments_csv(&tmp.path().join("assignments.csv")).unwrap();
    assert_eq!(rows.len(), runs.len());
    let header = fs::read_to_string(tmp.path().join("assignments.csv")).unwrap();
    assert!(header.starts_with("r,p,q,xi,ell\n"));
    // duplicated runs share every field except the index
    assert_eq!((rows[0].p, rows[0].q, rows[0].xi, rows[0].ell), (rows[2].p, rows[2].q, rows[2].xi, rows[2].ell));

    let model: ClassModel = read_json(&tmp.path().join("class_model.json")).unwrap();
    for (r, row) in rows.iter().enumerate() {
        let a = classify_sequence(&model, &runs[r], r).unwrap();
        assert_eq!((row.r, row.p, row.q), (r + 1, a.p + 1, a.q + 1));
        assert_eq!((row.xi, row.ell), (a.xi, a.ell));
    }
}

#[test]
fn figures_are_deterministic_and_match_models() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        run_ok(&["figures", "--seed", "3"], &tmp.path().join(dir));
    }
    let a = tmp.path().join("a/figures");
    let b = tmp.path().join("b/figures");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 9);
    for name in &names {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name:?}");
    }

    for (i, row) in read_csv_rows(&a.join("delta_vs_oscillations.csv")).iter().enumerate() {
        let delta: f64 = row[2].parse().unwrap();
        let expected = 1.0 / (i + 1) as f64;
        assert!((delta / expected - 1.0).abs() < 0.01, "N={}: {delta}", i + 1);
    }

    let first = &read_csv_rows(&a.join("cos_sq_curve_1.csv"))[0];
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    let model = CosSqModel::new(10, 1, 0.125).unwrap();
    assert_eq!(first[1].parse::<f64>().unwrap(), model.x);
    assert_eq!(cos_sq_f(&model, 0.0), model.x);

    for n in 1..=3 {
        let grid = read_csv_rows(&a.join(format!("mu_grid_N{n}.csv")));
        assert_eq!(grid.len(), 101 * 101);
        let at = |i: usize, j: usize| &grid[i * 101 + j];
        for i in 0..=100 {
            for j in 0..=100 {
                assert_eq!(at(i, j)[2], at(j, i)[2], "N={n} ({i},{j})");
                if i == j {
                    assert!(at(i, j)[3].is_empty());
                }
            }
        }
    }
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = gatestab(&["simulate", "--config", "/nonexistent/config.json"], tmp.path());
    assert_eq!(missing.status.code(), Some(1));

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"run": {"runs": 5, "typo": 1}}"#).unwrap();
    assert_eq!(gatestab(&["simulate", "--config", bad.to_str().unwrap()], tmp.path()).status.code(), Some(1));

    // no circuit configured
    assert_eq!(gatestab(&["simulate"], tmp.path()).status.code(), Some(1));
    // stabilize without an alpha file
    assert_eq!(gatestab(&["stabilize"], &tmp.path().join("empty")).status.code(), Some(1));
}

#[test]
fn numeric_failures_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let flat = tmp.path().join("flat.csv");
    write_param_csv(&flat, &GateParamMatrix::from_runs(&vec![vec![PI / 2.0; 3]; 4]).unwrap()).unwrap();
    let o = gatestab(&["classify", "--beta", flat.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numeric failure"));
}

#[test]
fn metrics_report_has_expected_fields() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path(), "7");
    let report: serde_json::Value = read_json(&tmp.path().join("stability_report.json")).unwrap();
    assert_eq!(report["per_run"].as_array().unwrap().len(), 10);
    for key in ["D_total", "mu_numeric", "mu_closed_form", "discrepancy"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert!(report["D_total"].as_f64().unwrap() >= 0.0);
    assert!(report["per_run"][0].get("f_D").is_some());
}
