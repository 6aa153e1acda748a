use std::path::Path;
use std::process::{Command, Output};

fn knowdis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knowdis"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path) -> String {
    let out = knowdis(&["synth", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("knowdis.toml").to_str().unwrap().to_string()
}

#[test]
fn missing_upstream_exits_with_dependency_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    let out = knowdis(&["filter", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("annotate"), "{err}");
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    let missing = dir.path().join("nope.toml");
    assert_eq!(knowdis(&["expand", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let text = std::fs::read_to_string(&cfg).unwrap().replace("keep_c = 0.5", "keep_c = 1.5");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, text).unwrap();
    let out = knowdis(&["expand", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("keep_c"));
}

#[test]
fn full_chain_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    let out = knowdis(&["all", "--config", &cfg, "--workers", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["dn.jsonl", "dr.jsonl", "drr.jsonl", "model.json", "train.manifest.json"] {
        assert!(dir.path().join("out").join(f).is_file(), "{f} missing");
    }
    let out = knowdis(&["audit-sample", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = knowdis(&["evaluate", "--config", &cfg, "--repeats", "2", "--seed", "4", "--ablate", "anneal"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let f1: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("f1\t"))
        .expect("f1 line")
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&f1));
    let manifest = std::fs::read_to_string(dir.path().join("out/evaluate.manifest.json")).unwrap();
    assert!(manifest.contains("no_anneal"));
}

#[test]
fn unknown_arguments_are_rejected() {
    assert_eq!(knowdis(&["frobnicate"]).status.code(), Some(2));
}
