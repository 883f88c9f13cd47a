use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn superladder(task: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superladder"))
        .arg(task)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, v: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn degenerate_p5() -> Value {
    json!({"kind": "painleve5", "params": {"hbar": 1.0, "omega": 1.0, "a": 2.0, "b": -2.0, "c": 0.0, "w_const": -1.0, "x_hi": 30.0}})
}

#[test]
fn verify_degenerate_p5_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = superladder("verify", &configs().join("degenerate_p5_verify.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true));
    for name in ["ladder.raising_commutator", "ladder.product_identity", "construction.first_intertwining"] {
        assert!(checks.iter().any(|c| c["name"] == name), "missing {name}");
    }
    // every manifest entry exists
    for a in r["artifacts"].as_array().unwrap() {
        assert!(dir.path().join(a["file"].as_str().unwrap()).exists(), "{a}");
    }
}

#[test]
fn unknown_key_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"schema_version": 1, "task": "verify", "model": degenerate_p5(), "tolerence": {}}),
    );
    let o = superladder("verify", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerence"));
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut no_hbar = degenerate_p5();
    no_hbar["params"].as_object_mut().unwrap().remove("hbar");
    let mut coarse = degenerate_p5();
    coarse["params"]["n"] = json!(150);
    let cases = [
        (json!({"schema_version": 1, "task": "verify", "model": no_hbar}), "verify", "hbar"),
        (json!({"schema_version": 1, "task": "verify", "model": coarse}), "verify", "n"),
        (json!({"schema_version": 9, "task": "verify", "model": degenerate_p5()}), "verify", "schema_version"),
        (json!({"schema_version": 1, "task": "verify", "model": degenerate_p5()}), "spectrum", "task"),
        (json!({"schema_version": 1, "task": "represent", "model": degenerate_p5()}), "represent", "models"),
        (
            json!({"schema_version": 1, "task": "spectrum", "model": degenerate_p5(),
                   "grid": {"lo": 0.0, "hi": 30.0, "n": 100}}),
            "spectrum",
            "grid.n",
        ),
    ];
    for (cfg, task, needle) in cases {
        let path = write_config(dir.path(), &cfg);
        let o = superladder(task, &path, &dir.path().join("out"), &[]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{cfg}: {err}");
        assert!(err.contains(needle), "{needle} not in {err}");
    }
}

#[test]
fn represent_isotropic_oscillator_lists_modules() {
    let dir = tempfile::tempdir().unwrap();
    let o = superladder("represent", &configs().join("isotropic_represent.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.path().join("representations.csv"));
    assert_eq!(&header[..3], ["E", "p", "degeneracy"]);
    assert_eq!(rows.len(), 5);
    for (p, r) in rows.iter().enumerate() {
        let e: f64 = r[0].parse().unwrap();
        assert!((e - (p + 1) as f64).abs() < 1e-9);
        assert_eq!(r[1], p.to_string());
        assert_eq!(r[2], (p + 1).to_string());
    }
    let (_, deg) = csv_rows(&dir.path().join("degeneracy.csv"));
    assert!(deg.iter().all(|r| r[1] == r[2]));
}

#[test]
fn sweep_classifies_points_and_records_failures_inline() {
    let dir = tempfile::tempdir().unwrap();
    let base = json!({"schema_version": 1, "task": "sweep", "model": degenerate_p5()});
    let mut one = base.clone();
    one["sweep"] = json!({"a": [2.0], "b": [-2.0], "c": [0.0], "omega": [1.0]});
    let o = superladder("sweep", &write_config(dir.path(), &one), &dir.path().join("one"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&dir.path().join("one/sweep.csv"));
    let col = |n: &str| header.iter().position(|h| h == n).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col("infinite_chains")], "2");
    assert_eq!(rows[0][col("finite_chains")], "0");

    let mut neg = base.clone();
    neg["sweep"] = json!({"a": [-1.0, 2.0], "b": [1.0, -2.0]});
    let o = superladder("sweep", &write_config(dir.path(), &neg), &dir.path().join("neg"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let (_, rows) = csv_rows(&dir.path().join("neg/sweep.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows[0][col("error")].contains("complex"), "{:?}", rows[0]);
    assert_eq!(rows[3][col("infinite_chains")], "2");
    assert!(rows[3][col("error")].is_empty());

    let mut empty = base;
    empty["sweep"] = json!({"a": []});
    let o = superladder("sweep", &write_config(dir.path(), &empty), &dir.path().join("empty"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("empty/sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("a,b,c,omega,"));
}

#[test]
fn module_errors_become_failed_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"schema_version": 1, "task": "spectrum",
        "model": {"kind": "singular_oscillator", "params": {"hbar": 1.0, "omega": 1.0, "l": -0.2}}});
    let o = superladder("spectrum", &write_config(dir.path(), &cfg), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&dir.path().join("out"));
    assert_eq!(r["passed"], false);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "build_model");
    assert!(r["errors"][0]["message"].as_str().unwrap().contains("critical"));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut v = report(p);
        v.as_object_mut().unwrap().remove("timings");
        v.to_string()
    };
    let cfg = configs().join("oscillator_algebra.json");
    for name in ["a", "b"] {
        let o = superladder("algebra", &cfg, &dir.path().join(name), &[]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(strip(&dir.path().join("a")), strip(&dir.path().join("b")));
    // the seed picks different random probes
    superladder("algebra", &cfg, &dir.path().join("c"), &["--seed", "8"]);
    assert_ne!(strip(&dir.path().join("a")), strip(&dir.path().join("c")));
    assert_eq!(report(&dir.path().join("c"))["config"]["seed"], 8);
}

#[test]
fn spectrum_files_follow_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = superladder("spectrum", &configs().join("degenerate_p5_spectrum.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(h, ["E", "degeneracy", "chain_id"]);
    // two interleaved chains of step ħω = 1
    let ids: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(ids, ["0", "1", "0", "1", "0", "1", "0", "1"]);
    let (h, rows) = csv_rows(&dir.path().join("potential.csv"));
    assert_eq!(h, ["x", "V"]);
    let (x, v): (f64, f64) = (rows[100][0].parse().unwrap(), rows[100][1].parse().unwrap());
    assert!((v - (x * x / 32.0 + 7.875 / (x * x) - 0.75)).abs() < 1e-10);
    let (h, _) = csv_rows(&dir.path().join("zeromodes.csv"));
    assert_eq!(h[0], "x");
    assert!(h[1..].iter().all(|c| c.starts_with("psi_")));
}
