use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BESOV_LAB_OUT")
        .output()
        .expect("spawn besov-lab")
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn quick_certify_passes_with_many_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["certify", "--set", "plan=quick"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("certificates.json"));
    let entries = doc["entries"].as_array().unwrap();
    assert!(entries.len() >= 40);
    assert_eq!(doc["summary"]["fail"], 0);
    assert_eq!(doc["config"]["seed"], 24301);
    assert_eq!(doc["tool"], "besov-lab");
    let names: Vec<(&str, &str)> =
        entries.iter().map(|e| (e["name"].as_str().unwrap(), e["inputs"]["function"].as_str().unwrap())).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn seminorm_of_zero_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["seminorm", "--set", "functions=zero", "--set", "n=257"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("seminorm.json"));
    for e in doc["estimates"].as_array().unwrap() {
        assert_eq!(e["seminorm"]["value"], 0.0);
        assert_eq!(e["u"], 0.0);
        assert_eq!(e["witness"]["quotient"], 0.0);
    }
}

#[test]
fn corpus_is_deterministic_and_round_trips() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = lab(&["corpus", "--set", "n=257", "--set", "functions=hat,hermite(3)"], d.path());
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["corpus.json", "corpus/hat.bgf", "corpus/hat.csv", "corpus/hermite_3_.bgf"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let back = besov_lab::formats::read_grid_function(&a.path().join("corpus/hermite_3_.bgf")).unwrap();
    assert_eq!(back.measure(), besov_core::Measure::Gaussian);
    assert_eq!(back.samples().len(), 257);

    // Seminorm from the saved file equals seminorm from the named function.
    let c = tempfile::tempdir().unwrap();
    let input = a.path().join("corpus/hat.bgf");
    let from_file = lab(&["seminorm", "--set", &format!("input={}", input.display()), "--set", "p=1", "--set", "alpha=0.5"], c.path());
    assert_eq!(from_file.status.code(), Some(0));
    let v1 = json(&c.path().join("seminorm.json"))["estimates"][0]["seminorm"]["value"].clone();
    let d = tempfile::tempdir().unwrap();
    lab(&["seminorm", "--set", "functions=hat", "--set", "n=257", "--set", "p=1", "--set", "alpha=0.5"], d.path());
    let v2 = json(&d.path().join("seminorm.json"))["estimates"][0]["seminorm"]["value"].clone();
    assert_eq!(v1, v2);
}

#[test]
fn missing_input_reports_expected_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.bgf");
    let out = lab(&["seminorm", "--set", &format!("input={}", missing.display())], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&missing.display().to_string()), "{err}");
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["semigroup", "--set", "p=0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`p`"));

    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nfunctions = hat\nn = 129\nt_count = eight\n").unwrap();
    let out = lab(&["semigroup", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`t_count`"));

    let out = lab(&["corpus", "--set", "dim=1", "--set", "functions=x_plus_y2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`functions`"));
}

#[test]
fn config_file_overrides_and_output_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "functions = gaussian_bump\nn = 129\nt_count = 8\np = 2\nalpha = 0.5\n").unwrap();
    let env_out = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_besov-lab"))
        .args(["semigroup", "--config", cfg.to_str().unwrap(), "--set", "t_count=12"])
        .env("BESOV_LAB_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&env_out.join("semigroup.json"));
    assert_eq!(doc["config"]["t_count"], 12);
    assert_eq!(doc["config"]["n"], 129);
    assert_eq!(doc["functionals"].as_array().unwrap().len(), 1);
    let csv = std::fs::read_to_string(env_out.join("semigroup/gaussian_bump.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 12);
}

#[test]
fn measure_and_counterexample_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["measure", "--set", "measure_n=1025"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("measure.json"));
    assert_eq!(doc["chaining"].as_array().unwrap().len(), 4);

    let out = lab(
        &["counterexample", "--set", "ce_terms=200,400", "--set", "ce_y_samples=10", "--set", "ce_grid_nx=513", "--set", "ce_grid_ny=33"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("counterexample.json"));
    assert_eq!(doc["profiles"].as_array().unwrap().len(), 20);
    assert!(doc["max_profile_error"].as_f64().unwrap() < 1e-8);
}
