use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use epitaxy_cli::schema::{check, Kind};
use epitaxy_cli::{read_timeseries, CSV_HEADER};
use epitaxy_core::dynamics::Checkpoint;
use serde_json::Value;
use tempfile::TempDir;

fn epitaxy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epitaxy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(dir: &Path, name: &str, json: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{name}.json"));
    fs::write(&cfg, json).unwrap();
    let out = dir.join(name);
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    epitaxy(&args)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_codes_follow_outcome() {
    let dir = TempDir::new().unwrap();
    let ok = run_config(dir.path(), "ok", r#"{"experiment":"conjecture1"}"#, &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("confirmed"));

    let short = run_config(
        dir.path(),
        "short",
        r#"{"experiment":"conjecture1","t_end":1e-5}"#,
        &[],
    );
    assert_eq!(short.status.code(), Some(4));
    let v = read_json(&dir.path().join("short/verdict.json"));
    assert_eq!(v["outcome"], "inconclusive");
    assert!(v["reason"].is_string());

    for bad in [
        r#"{"experiment":"conjecture1","nu":-1}"#,
        r#"{"experiment":"conjecture1","bogus":true}"#,
        r#"{"experiment":"nope"}"#,
        r#"{"experiment":"thm5_lower_bound","eps":0.5}"#,
        "not json",
    ] {
        let out = run_config(dir.path(), "bad", bad, &[]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn validate_and_constants() {
    let dir = TempDir::new().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, r#"{"experiment":"longtime_1d","cadence":5}"#).unwrap();
    assert_eq!(epitaxy(&["validate", good.to_str().unwrap()]).status.code(), Some(0));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"experiment":"smoothing_rates","cadence":5}"#).unwrap();
    assert_eq!(epitaxy(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));

    let out = epitaxy(&["constants", "--gamma", "4", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.23729438545937"), "{text}");
    assert!(text.contains("0.55232912004099"), "{text}");
    let out = epitaxy(&["constants", "--gamma", "2", "--dim", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("A1"));
    assert_eq!(epitaxy(&["constants", "--gamma", "-1"]).status.code(), Some(2));
}

#[test]
fn timeseries_reads_back() {
    let dir = TempDir::new().unwrap();
    let out = run_config(
        dir.path(),
        "lt",
        r#"{"experiment":"longtime_1d","t_long":1,"cadence":3,"resolution_check":false}"#,
        &[],
    );
    assert!(matches!(out.status.code(), Some(0 | 4)));
    let path = dir.path().join("lt/timeseries.csv");
    let first = fs::read_to_string(&path).unwrap();
    assert_eq!(first.lines().next().unwrap(), CSV_HEADER.join(","));
    let rows = read_timeseries(&path).unwrap();
    assert_eq!(rows.len(), first.lines().count() - 1);
    assert!(rows.len() > 2);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] <= w[0][1] + 1e-10));
    let ckpt = Checkpoint::from_bytes(&fs::read(dir.path().join("lt/checkpoint.bin")).unwrap()).unwrap();
    assert_eq!(ckpt.t, rows.last().unwrap()[0]);
}

#[test]
fn outputs_are_schema_valid() {
    let dir = TempDir::new().unwrap();
    let out = run_config(
        dir.path(),
        "audit",
        r#"{"experiment":"gradient_bound_audit","nu_sweep":[0.1,0.03],"n":64,
            "data":{"kind":"random_smooth","seed":3,"bandwidth":3,"amplitude":0.8},
            "resolution_check":false,"timing":true}"#,
        &["--workers", "2"],
    );
    assert!(out.status.success() || out.status.code() == Some(4), "{out:?}");
    let v = read_json(&dir.path().join("audit/verdict.json"));
    check(Kind::Verdict, &v).unwrap();
    assert!(v["runtime_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["seed"], 3);
    let plots: Vec<_> = fs::read_dir(dir.path().join("audit/plots"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert!(plots.iter().any(|p| p.extension().unwrap() == "svg"));
    for p in plots.iter().filter(|p| p.extension().unwrap() == "json") {
        check(Kind::Plot, &read_json(p)).unwrap();
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"experiment":"conjecture1","n":256,"t_end":0.005}"#;
    run_config(dir.path(), "a", cfg, &[]);
    run_config(dir.path(), "b", cfg, &["--workers", "3"]);
    for file in ["verdict.json", "timeseries.csv", "checkpoint.bin", "plots/grad_sup.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert!(a == b, "{file} differs");
    }
}

#[test]
fn resume_continues_and_rejects_mismatch() {
    let dir = TempDir::new().unwrap();
    let first = run_config(
        dir.path(),
        "first",
        r#"{"experiment":"longtime_1d","t_long":2,"resolution_check":false}"#,
        &[],
    );
    assert_eq!(first.status.code(), Some(4));
    let snap = dir.path().join("first/checkpoint.bin");
    let snap = snap.to_str().unwrap();
    let cont = run_config(
        dir.path(),
        "cont",
        r#"{"experiment":"longtime_1d","t_long":12}"#,
        &["--resume", snap],
    );
    assert_eq!(cont.status.code(), Some(0), "{}", String::from_utf8_lossy(&cont.stderr));
    let v = read_json(&dir.path().join("cont/verdict.json"));
    assert_eq!(v["witnesses"]["resumed_from"], 2.0);

    let wrong = run_config(dir.path(), "wrong", r#"{"experiment":"conjecture1"}"#, &["--resume", snap]);
    assert_eq!(wrong.status.code(), Some(2));
    let unsupported = run_config(
        dir.path(),
        "unsupported",
        r#"{"experiment":"cahn_hilliard_bridge"}"#,
        &["--resume", snap],
    );
    assert_eq!(unsupported.status.code(), Some(2));
    let garbage = dir.path().join("garbage.bin");
    fs::write(&garbage, b"not a checkpoint").unwrap();
    let out = run_config(
        dir.path(),
        "garbage",
        r#"{"experiment":"longtime_1d"}"#,
        &["--resume", garbage.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
}
