use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cbound(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbound")).env_remove("CBOUND_OUT").arg("--out").arg(out).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn catalog_lists_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["catalog"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for family in ["poschl_teller", "sinusoidal_well", "cubic_oscillator", "levai", "square_well", "darboux_oscillator"] {
        assert!(text.contains(family), "{family} missing from:\n{text}");
    }
}

#[test]
fn solve_poschl_teller_writes_result_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["solve", "--preset", "poschl-teller", "--kappa", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("result.json"));
    assert_eq!(doc["schema"], "v1");
    let energies = doc["energies"].as_array().unwrap();
    assert_eq!(energies.len(), 1);
    assert!((energies[0].as_f64().unwrap() + 1.0).abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("state_0.csv")).unwrap();
    assert!(csv.starts_with("x,re_psi,im_psi"), "{}", &csv[..40]);
    assert!(dir.path().join("potential.csv").exists());

    let an = cbound(dir.path(), &["analyze", dir.path().join("result.json").to_str().unwrap(), "--sweep", "8"]);
    assert!(an.status.success(), "{}", String::from_utf8_lossy(&an.stderr));
    let a = json(&dir.path().join("analysis.json"));
    assert_eq!(a["states"][0]["nodeless"], true);
}

#[test]
fn transfer_method_on_confining_potential_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["solve", "--preset", "cubic-oscillator", "--method", "transfer"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vanishing_radicand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["darboux", "--c0", "1", "--c1", "0", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn darboux_writes_manifest_and_states() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["darboux", "--c0", "2", "--c1", "0", "--lambda", "1.7", "--levels", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("result.json"));
    let e: Vec<f64> = doc["energies"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(e, vec![-1.0, 1.0, 3.0, 5.0]);
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("state_3.csv").exists());
}

#[test]
fn reproduce_table_4_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = cbound(dir.path(), &["reproduce", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("reproduce.json").exists());
}

#[test]
fn unknown_table_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cbound(dir.path(), &["reproduce", "9"]).status.code(), Some(2));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cbound"))
        .env("CBOUND_OUT", dir.path())
        .args(["solve", "--preset", "poschl-teller"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("result.json").exists());
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(cbound(a.path(), &["--threads", "1", "solve", "--preset", "fig5-middle"]).status.success());
    assert!(cbound(b.path(), &["--threads", "4", "solve", "--preset", "fig5-middle"]).status.success());
    for f in ["result.json", "state_0.csv", "potential.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
