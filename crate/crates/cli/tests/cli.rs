use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], config: &str, dir: &Path) -> Output {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_tunnel-orders"))
        .args(args)
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn harmonic_expansion_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["expand"],
        "[scenario]\npreset = \"harmonic\"\nK = 20\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "expansion.json");
    let energies = doc["expansion"]["energies"].as_array().unwrap();
    assert_eq!(energies.len(), 20);
    assert!(energies.iter().all(|e| e["exact"] == "0"));
    let csv = std::fs::read_to_string(dir.path().join("out/phi_coeffs.csv")).unwrap();
    assert!(csv.starts_with("k,Q^0,Q^1"));
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn cubic_first_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["expand"],
        "[scenario]\npreset = \"cubic\"\nK = 6\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "expansion.json");
    assert_eq!(doc["expansion"]["energies"][0]["exact"], "-11/8");
    assert_eq!(doc["expansion"]["truncation_check"]["identical"], true);
}

#[test]
fn truncation_rule_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["expand"],
        "[scenario]\npreset = \"cubic\"\nK = 10\nM = 20\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("M >= 2K + 2"), "{}", stderr(&o));
}

#[test]
fn unknown_key_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["expand"],
        "[scenario]\npreset = \"cubic\"\nkk = 3\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("scenario"), "{}", stderr(&o));
}

#[test]
fn low_precision_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[scenario]\npreset = \"cubic\"\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tunnel-orders"))
        .args([
            "expand",
            cfg.to_str().unwrap(),
            "--precision",
            "32",
            "--out",
        ])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn predictions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["predict"], "[scenario]\npreset = \"cubic\"\n", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "prediction.json");
    let a0 = doc["energy"]["a0"].as_f64().unwrap();
    assert!((a0 - 2.0 / 15.0).abs() < 1e-12);
    assert_eq!(doc["energy"]["formula_id"], "P1");

    let o = run(
        &["predict"],
        "[scenario]\npreset = \"sphere\"\nn = 3\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "prediction.json");
    assert_eq!(doc["energy"]["prefactor"].as_f64(), Some(0.0));
    let notes = doc["energy"]["notes"].to_string();
    assert!(notes.contains("cos(pi n/2) = 0"));
    assert_eq!(doc["energy"]["variants"].as_array().unwrap().len(), 2);

    let o = run(
        &["predict"],
        "[scenario]\npreset = \"harmonic\"\n",
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no turning point"));
}

#[test]
fn cubic_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[scenario]\npreset = \"cubic\"\nK = 60\n\n[verify]\na0_rel = 1e-3\n\
               exponent_abs = 0.05\nprefactor_rel = 0.02\n";
    let o = run(&["verify"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "report.json");
    assert_eq!(doc["pass"], true);
    let csv = std::fs::read_to_string(dir.path().join("out/fit_table.csv")).unwrap();
    assert!(csv.starts_with("target,k,value,ratio,richardson_0"));
}

#[test]
fn sphere_null_rule_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[scenario]\npreset = \"sphere\"\nn = 3\nK = 40\n\n[verify]\n\
               null_level = 0.05\nnull_reference_n = 2\n";
    let o = run(&["verify"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "report.json");
    assert_eq!(doc["null_reference"]["n"], 2);
}

#[test]
fn strict_prefactor_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[scenario]\npreset = \"cubic\"\nK = 20\n\n[verify]\nprefactor_rel = 1e-12\n";
    let o = run(&["verify"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let doc = json(dir.path(), "report.json");
    assert_eq!(doc["pass"], false);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[scenario]\npreset = \"double_well\"\nK = 24\n";
    let read = |name: &str| std::fs::read(dir.path().join("out").join(name)).unwrap();
    run(&["verify"], cfg, dir.path());
    let (a, b) = (read("report.json"), read("fit_table.csv"));
    run(&["verify"], cfg, dir.path());
    assert_eq!(a, read("report.json"));
    assert_eq!(b, read("fit_table.csv"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[scenario]\npreset = \"harmonic\"\nK = 4\n").unwrap();
    let out = dir.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_tunnel-orders"))
        .args(["expand", cfg.to_str().unwrap()])
        .env("TUNNEL_ORDERS_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("expansion.json").exists());
}

#[test]
fn harmonic_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[scenario]\npreset = \"harmonic\"\nK = 10\n\n[oracle]\nhbar = [\"1/10\"]\nrel_tol = 1e-8\n";
    let o = run(&["oracle"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(dir.path(), "report.json");
    let e0 = doc["oracle"]["diagonalization"][0]["reference"]["e0"]
        .as_f64()
        .unwrap();
    assert!((e0 - 0.5).abs() < 1e-8);
}
