use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncdirac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn derive_targets_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["hamiltonian", "position-rate", "momentum-rate"] {
        let o = run(&["derive", target], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(format!("{target}.txt")).exists());
        read_json(&dir.path().join(format!("{target}.json")));
    }
    let h = read_json(&dir.path().join("hamiltonian.json"));
    assert!(h["H_nc"].as_str().unwrap().contains("eta"));
    let text = std::fs::read_to_string(dir.path().join("position-rate.txt")).unwrap();
    assert!(text.contains("dx1/dt = "));
}

#[test]
fn json_flag_prints_machine_readable_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["derive", "momentum-rate", "--json"], dir.path());
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).expect("stdout is JSON");
    assert!(v.is_object());
}

#[test]
fn unit_convention_changes_the_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["derive", "hamiltonian", "--convention", "unit"], dir.path());
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Bopp denominator 2hbar"), "{stdout}");
    assert!(stdout.contains("1/2*hbar^-1*c*eta"), "{stdout}");
}

#[test]
fn verify_passes_and_writes_audit() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("algebra.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("relation,derived,paper,match"));
    assert_eq!(csv.lines().count(), 11);
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn non_hermitian_field_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"field": {"scalar_potential": "i*B*x[2]"}}"#);
    let o = run(&["verify", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL hermiticity"));
}

#[test]
fn tampered_reference_fails_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"reference_overrides": {"lorentz-classical/electric": "-e"}}"#);
    let o = run(&["limits", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("delta (potentials expanded) = (2*e*E1, 0, 0)"), "{stdout}");
    let clean = run(&["limits"], dir.path());
    assert_eq!(code(&clean), 0);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_key = write_config(dir.path(), r#"{"bogus": 1}"#);
    let o = run(&["verify", "--config", &unknown_key], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`bogus`"));

    assert_eq!(code(&run(&["derive", "hamiltonian", "--convention", "weird"], dir.path())), 2);
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&run(&["derive", "nothing"], dir.path())), 2);
    assert_eq!(
        code(&run(&["derive", "hamiltonian", "--config", "/nonexistent/run.json"], dir.path())),
        2
    );

    let bad_expr = write_config(dir.path(), r#"{"field": {"scalar_potential": "x[1] +"}}"#);
    let o = run(&["derive", "hamiltonian", "--config", &bad_expr], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("field.scalar_potential"));

    let three_axes = write_config(dir.path(), r#"{"basis": {"dim": 3}}"#);
    assert_eq!(code(&run(&["evolve", "--config", &three_axes], dir.path())), 2);
}

#[test]
fn short_evolution_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"basis": {"dim": 2, "levels": 10, "guard": 3}, "evolution": {"steps": 200}}"#,
    );
    let o = run(&["evolve", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,norm,x1,v1,D1,F1,x2,v2,D2,F2"), "{header}");
    assert_eq!(csv.lines().count(), 202);
    let v = read_json(&dir.path().join("ehrenfest.json"));
    assert_eq!(v["steps"], 200);
    for c in v["convergence"].as_array().unwrap() {
        let ratio = c["ratio"].as_f64().unwrap();
        assert!((3.6..=4.4).contains(&ratio), "{ratio}");
    }
}

#[test]
fn commutative_configuration_has_no_findings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"constants": {"Theta": 0, "eta": 0}}"#);
    let o = run(&["derive", "position-rate", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("dx1/dt = c*alpha[1]\ndx2/dt = c*alpha[2]\ndx3/dt = c*alpha[3]\n"), "{stdout}");
}
