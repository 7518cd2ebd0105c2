use std::fs;
use std::path::{Path, PathBuf};

use gibbsbound::cli::{dispatch, EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, OUT_DIR_ENV};
use gibbsbound::models::{read_model, ErgmModel, Model};

fn run(args: &[&str]) -> i32 {
    dispatch(std::iter::once("gibbsbound").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn init(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut full = vec!["init"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path_str(&out)]);
    assert_eq!(run(&full), EXIT_OK);
    out
}

/// Rows of a CSV file as header-keyed maps.
fn rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            headers.iter().map(String::from).zip(r.iter().map(String::from)).collect()
        })
        .collect()
}

#[test]
fn init_writes_a_model_that_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["twostar", "--n", "5", "--beta1", "-0.5", "--beta2", "0.3"]);
    match read_model(&m).unwrap() {
        Model::Ergm(e) => assert_eq!(e, ErgmModel::two_star(5, -0.5, 0.3).unwrap()),
        other => panic!("expected an ERGM, got {other:?}"),
    }
}

#[test]
fn edge_only_bound_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["edge-only", "--n", "4"]);
    let out = dir.path().join("bound.csv");
    let code = run(&[
        "bound", "--model", path_str(&m), "--theorem", "negbetas", "-o", path_str(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["value"].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn triangle_model_has_one_stable_root() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["triangle", "--n", "10", "--beta1", "-1", "--beta2", "0.05"]);
    let out = dir.path().join("fp.csv");
    assert_eq!(run(&["fixedpoint", "--model", path_str(&m), "-o", path_str(&out)]), EXIT_OK);
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["stable"], "true");
    let a: f64 = r[0]["a_star"].parse().unwrap();
    assert!((a - 0.119_654_625_300_881_89).abs() < 1e-10);
}

#[test]
fn florentine_demo_reports_the_fitted_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo.csv");
    assert_eq!(run(&["demo", "florentine", "-o", path_str(&out)]), EXIT_OK);
    let r: std::collections::HashMap<String, f64> = rows(&out)
        .into_iter()
        .map(|row| (row["quantity"].clone(), row["value"].parse().unwrap()))
        .collect();
    assert!((r["a_star"] - 0.036743).abs() < 1e-6);
    assert!((r["displayed_value"] - 0.0817595).abs() < 1e-6);
    assert!((r["proposition_value"] - 0.042225).abs() < 1e-6);
    assert_eq!(r["vertices"], 16.0);
    assert_eq!(r["edges"], 20.0);
}

#[test]
fn seeded_output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["twostar", "--n", "8", "--beta1", "-0.4", "--beta2", "0.5"]);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let sim = dir.path().join(format!("sim{threads}.csv"));
        let cpl = dir.path().join(format!("cpl{threads}.csv"));
        let base = ["--threads", threads, "--model", path_str(&m), "--seed", "11"];
        let mut a = vec!["simulate"];
        a.extend_from_slice(&base);
        a.extend_from_slice(&["--steps", "3000", "--every", "300", "-o", path_str(&sim)]);
        assert_eq!(run(&a), EXIT_OK);
        let mut b = vec!["couple"];
        b.extend_from_slice(&base);
        b.extend_from_slice(&["--pairs", "40", "--reps", "20", "-o", path_str(&cpl)]);
        assert_eq!(run(&b), EXIT_OK);
        outputs.push((fs::read(&sim).unwrap(), fs::read(&cpl).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(rows(&dir.path().join("sim1.csv")).len() == 11);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = init(dir.path(), "ok.toml", &["twostar", "--n", "4", "--beta1", "-1", "--beta2", "-0.2"]);
    let out = dir.path().join("v.csv");
    let code = run(&[
        "verify", "--model", path_str(&ok), "--theorem", "negbetas", "--seed", "1", "-o", path_str(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(rows(&out)[0]["verdict"], "bound_holds");

    let bad = init(dir.path(), "bad.toml", &["twostar", "--n", "4", "--beta1", "0", "--beta2", "0.5"]);
    let code = run(&[
        "verify", "--model", path_str(&bad), "--theorem", "negbetas", "--seed", "1", "-o", path_str(&out),
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    assert_eq!(rows(&out)[0]["exact"], "true");

    let outside = init(dir.path(), "out.toml", &["twostar", "--n", "4", "--beta2", "1.2"]);
    let code = run(&[
        "bound", "--model", path_str(&outside), "--theorem", "twostar", "-o", path_str(&out),
    ]);
    assert_eq!(code, EXIT_HYPOTHESIS);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["edge-only", "--n", "4"]);
    let out = dir.path().join("x.csv");
    assert_eq!(run(&["simulate", "--model", path_str(&m), "-o", path_str(&out)]), EXIT_USAGE);
    assert_eq!(
        run(&["bound", "--model", path_str(&m), "--theorem", "nonsense", "-o", path_str(&out)]),
        EXIT_USAGE
    );
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        run(&["fixedpoint", "--model", path_str(&missing), "-o", path_str(&out)]),
        EXIT_USAGE
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let m = init(dir.path(), "m.toml", &["triangle", "--n", "6", "--beta1", "-1", "--beta2", "0.1"]);
    let outdir = dir.path().join("results");
    std::env::set_var(OUT_DIR_ENV, &outdir);
    let code = run(&["fixedpoint", "--model", path_str(&m)]);
    std::env::remove_var(OUT_DIR_ENV);
    assert_eq!(code, EXIT_OK);
    assert_eq!(rows(&outdir.join("fixedpoint.csv")).len(), 1);
}
