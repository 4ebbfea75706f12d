use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn pride(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_pride"))
        .args(args)
        .current_dir(dir)
        .env_remove("PRIDE_CONFIG")
        .env_remove("PRIDE_SEED")
        .env_remove("PRIDE_N")
        .env_remove("PRIDE_EPOCHS")
        .env_remove("PRIDE_TIE_BREAK")
        .output()
        .expect("binary runs");
    out
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pride(dir, args);
    assert!(out.status.success(), "pride {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn digest(path: &Path) -> String {
    let bytes = fs::read(path).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// generate -> train -> extract -> learn for one bias, inside `dir`.
fn run_chain(dir: &Path, bias: &str) {
    let model = format!("{bias}.json");
    let twin = format!("{bias}.twin.csv");
    let lp = format!("{bias}.lp");
    ok(dir, &["train", "--data", "data.csv", "--scenario", "s11", "--bias", bias, "--epochs", "60", "--out", &model]);
    ok(dir, &["extract", "--model", &model, "--data", "data.csv", "--out", &twin]);
    ok(dir, &["learn", "--transitions", &twin, "--schema", &model, "--out", &lp]);
}

fn full_pipeline(dir: &Path) -> String {
    ok(dir, &["generate", "--n", "2000", "--seed", "1", "--bias", "gender", "--out", "data.csv"]);
    run_chain(dir, "none");
    run_chain(dir, "gender");
    ok(dir, &["audit", "--pair", "none.lp", "gender.lp", "--exclude", "i3", "--exclude", "i7", "--out", "report.json"])
}

#[test]
fn gender_bias_is_reported_on_g() {
    let dir = tempfile::tempdir().unwrap();
    full_pipeline(dir.path());
    let report = ok(dir.path(), &["report", "--audit", "report.json", "--svg", "report.svg"]);
    assert!(report.contains("top driver g"), "{report}");
    assert!(fs::read_to_string(dir.path().join("report.svg")).unwrap().starts_with("<svg"));
    for artifact in ["data.csv", "none.json", "gender.twin.csv", "gender.lp", "report.json"] {
        assert!(dir.path().join(format!("{artifact}.config.toml")).exists(), "{artifact} sidecar");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    full_pipeline(a.path());
    full_pipeline(b.path());
    for artifact in ["data.csv", "none.json", "gender.json", "none.twin.csv", "gender.lp", "report.json"] {
        assert_eq!(digest(&a.path().join(artifact)), digest(&b.path().join(artifact)), "{artifact}");
    }
}

#[test]
fn learn_reproduces_the_and_table() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("and.csv"), "a,b,y\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n").unwrap();
    for tie in ["lowest-index", "most-excluding"] {
        ok(dir.path(), &["learn", "--transitions", "and.csv", "--targets", "y", "--tie-break", tie, "--out", "and.lp"]);
        let text = fs::read_to_string(dir.path().join("and.lp")).unwrap();
        assert_eq!(
            text,
            "@feature a {0,1}\n@feature b {0,1}\n@target y {0,1}\n\
             y(0) :- a(0).  %% w=2\ny(0) :- b(0).  %% w=2\ny(1) :- a(1), b(1).  %% w=1\n",
            "{tie}"
        );
    }
}

#[test]
fn config_file_and_flags_are_merged() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "[generate]\nn_records = 50\nseed = 9\n").unwrap();
    ok(dir.path(), &["--config", "run.toml", "generate", "--n", "40", "--out", "d.csv"]);
    let rows = fs::read_to_string(dir.path().join("d.csv")).unwrap().lines().count();
    assert_eq!(rows, 41);
    let sidecar = fs::read_to_string(dir.path().join("d.csv.config.toml")).unwrap();
    assert!(sidecar.contains("n_records = 40") && sidecar.contains("seed = 9"), "{sidecar}");
}

#[test]
fn errors_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = pride(dir.path(), &["learn", "--transitions", "missing.csv", "--out", "p.lp"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("pride learn:"));
    assert!(!dir.path().join("p.lp").exists());

    fs::write(dir.path().join("bad.toml"), "[model]\nepoch = 3\n").unwrap();
    let out = pride(dir.path(), &["--config", "bad.toml", "generate", "--out", "d.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}
