use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/depolarizing.json")
}

fn nclab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report written")).expect("report is JSON")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn theorem11_fixture_run() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture();
    let o = nclab(&["theorem11", "--config", fx.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("theorem11.json"));
    assert!(r["constants"]["A"].as_f64().unwrap() > 0.0);
    assert!(r["constants"]["C_pq"].as_f64().unwrap().is_finite());
    assert!(dir.path().join("theorem11.md").exists());
    assert!(dir.path().join("weak-type-splitting.json").exists());
}

#[test]
fn profile_csv_and_coherence_with_theorem11() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture();
    let csv = dir.path().join("out.csv");
    let o = nclab(
        &["profile", "--config", fx.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("t,norm,certificate"));
    assert_eq!(text.lines().count(), 62);

    let o = nclab(&["theorem11", "--config", fx.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let a = read_json(&dir.path().join("theorem11.json"))["constants"]["A"].as_f64().unwrap();
    let b = read_json(&dir.path().join("profile.json"))["constants"]["A"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-12 * a);
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = nclab(&["profile", "--config", "/nonexistent/cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_is_line_anchored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "{\n  \"generator\": { \"family\": \"depolarizing\", \"params\": { \"n\": 2 } },\n  \"pair\": { \"family\": \"power\", \"alpha\": 1.0 },\n  \"exponents\": { \"p\": 4.0, \"q\": 3.0 }\n}\n",
    );
    let o = nclab(&["verify-pair", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cfg.json:4:"), "{err}");
}

#[test]
fn kernel_precondition_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "generator": { "family": "depolarizing", "params": { "n": 2 } }, "pair": { "family": "power", "alpha": 1.0 } }"#,
    );
    let o = nclab(&["theorem11", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kernel"));
}

#[test]
fn failed_verdict_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // no quadrature meets an absolute tolerance of 1e-30
    let cfg = write_config(
        dir.path(),
        r#"{ "generator": { "family": "depolarizing", "params": { "n": 2 }, "shift": 1.0 },
             "pair": { "family": "power", "alpha": 1.0 },
             "tolerances": { "laplace": 1e-30 } }"#,
    );
    let o = nclab(&["subordinate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let r = read_json(&dir.path().join("subordinate.json"));
    assert_eq!(r["verdicts"]["laplace"], "fail");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture();
    let o = nclab(&["verify-pair", "--config", fx.to_str().unwrap(), "--seed", "77"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("verify-pair.json"))["provenance"]["seed"], 77);
}

#[test]
fn thread_count_does_not_change_reports() {
    let fx = fixture();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_nclab"))
            .args(["logsobolev", "--config", fx.to_str().unwrap(), "--out"])
            .arg(dir.path())
            .env("NCLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push(std::fs::read(dir.path().join("log-sobolev.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture();
    let o = Command::new(env!("CARGO_BIN_EXE_nclab"))
        .args(["verify-pair", "--config", fx.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .env("NCLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = nclab(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
