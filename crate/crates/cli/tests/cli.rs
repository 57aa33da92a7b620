use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn prequant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prequant")).args(args).env_remove("PREQUANT_DATA").output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn lists_every_suite() {
    let o = prequant(&["--list-suites"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    for s in ["cartan", "observables", "kks", "master-equation", "courant-atiyah", "fiber", "collation", "cohomology", "extensions", "all"] {
        assert!(out.lines().any(|l| l.split_whitespace().next() == Some(s)), "missing {s}");
    }
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = prequant(&["verify", "extensions", "--samples", "3", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["suite"], "extensions");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert!(report.get("wall_time_ms").is_none());
    assert!(stderr(&o).contains("checks passed"));
}

#[test]
fn wall_time_is_opt_in() {
    let o = prequant(&["verify", "extensions", "--samples", "2", "--wall-time"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["wall_time_ms"].is_u64());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "area.toml", "[[plectic]]\nname = \"area\"\ndim = 2\nn = 1\nomega = \"2 dx^dy\"\n");
    let cfg = write(dir.path(), "run.toml", "data = [\"area.toml\"]\nseed = 5\nsamples = 50\n");
    let o = prequant(&["verify", "observables", "--config", &cfg, "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(report["samples"], 4);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.iter().all(|n| n.starts_with("observables.area.")), "{names:?}");
}

#[test]
fn data_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "vol.toml", "[[plectic]]\nname = \"vol\"\ndim = 3\nn = 2\nomega = \"dx^dy^dz\"\n");
    let o = Command::new(env!("CARGO_BIN_EXE_prequant"))
        .args(["verify", "observables", "--samples", "2"])
        .env("PREQUANT_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("observables.vol.jacobi"));
}

#[test]
fn non_closed_omega_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "bad.toml", "[[plectic]]\nname = \"bad\"\ndim = 3\nn = 1\nomega = \"z dx^dy\"\n");
    let o = prequant(&["verify", "observables", "--data", &data]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega not closed"), "{}", stderr(&o));
}

#[test]
fn unknown_suite_is_a_config_error() {
    let o = prequant(&["verify", "torus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown suite"));
}

#[test]
fn invalid_parameters_are_config_errors() {
    assert_eq!(prequant(&["verify", "cartan", "--seed", "0"]).status.code(), Some(2));
    assert_eq!(prequant(&["verify", "cartan", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(prequant(&["verify", "cartan", "--data", "/nonexistent/zoo.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "seed = 3\ncolour = \"red\"\n");
    let o = prequant(&["verify", "cartan", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed config"));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(
        dir.path(),
        "su2.toml",
        "[[lie]]\nname = \"su2-wrong-killing\"\nlabels = [\"e1\", \"e2\", \"e3\"]\nkilling_diagonal = \"-3\"\nmu_123 = \"-2\"\nbrackets = [\n  { i = 0, j = 1, k = 2, c = \"1\" },\n  { i = 1, j = 2, k = 0, c = \"1\" },\n  { i = 0, j = 2, k = 1, c = \"-1\" },\n]\n",
    );
    let o = prequant(&["verify", "extensions", "--data", &data, "--samples", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAILED extensions.su2-wrong-killing.killing-form"), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn builds_example_bundles() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["poisson-r2", "r3-2plectic", "string-su2", "heisenberg-r2"] {
        let out = dir.path().join(kind);
        let o = prequant(&["build", kind, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        for f in ["structure.json", "cocycle.json", "summary.json"] {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join(f)).unwrap()).unwrap();
            assert_eq!(v["kind"], kind);
        }
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("string-su2/summary.json")).unwrap()).unwrap();
    let l3 = summary["brackets"].as_array().unwrap().iter().find(|e| e["operation"] == "l3").unwrap();
    assert_eq!(l3["output"], "2[1]");
    assert_eq!(prequant(&["build", "torus", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}
