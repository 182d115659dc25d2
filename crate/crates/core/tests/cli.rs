use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urbanlos"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok_path(out: Output) -> PathBuf {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    PathBuf::from(String::from_utf8(out.stdout).unwrap().trim())
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Every CSV has a header and numeric cells, except the label columns.
fn check_csv(path: &Path) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    assert!(!headers.is_empty(), "{path:?}");
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), headers.len(), "{path:?}");
        for (h, cell) in headers.iter().zip(rec.iter()) {
            if h == "scenario" || h == "environment" {
                assert!(!cell.is_empty());
            } else {
                let v: f64 = cell.parse().unwrap_or_else(|_| panic!("{path:?}: {h}={cell}"));
                assert!(v.is_finite());
                if h.starts_with("p_") {
                    assert!((0.0..=1.0).contains(&v), "{path:?}: {h}={v}");
                }
            }
        }
        rows += 1;
    }
    assert!(rows > 0, "{path:?} is empty");
}

const SMALL: &[&str] = &["--env", "urban", "--n-cities", "2", "--n-gu", "20", "--seed", "3"];

#[test]
fn generate_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let a = ok_path(run(&["generate", "--env", "dense_urban", "--seed", "5", "--out", out]));
    let dir = a.parent().unwrap();
    let first = files(dir);
    let b = ok_path(run(&["generate", "--env", "dense_urban", "--seed", "5", "--out", out]));
    assert_eq!(a, b);
    assert_eq!(first, files(dir));
    assert_eq!(a.file_name().unwrap(), "layout-0.json");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let bad = run(&["simulate", "--alpha", "1.5", "--seed", "1", "--out", out]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("alpha"));

    let no_seed = run(&["simulate", "--env", "urban", "--out", out]);
    assert_eq!(no_seed.status.code(), Some(1));

    let crowded = run(&["generate", "--alpha", "0.999", "--beta", "1", "--gamma", "10", "--seed", "1", "--out", out]);
    assert_eq!(crowded.status.code(), Some(2), "{}", String::from_utf8_lossy(&crowded.stderr));

    let missing = run(&["report", tmp.path().join("nope").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(3));
    let missing_fit = {
        let mut args = vec!["simulate"];
        args.extend_from_slice(SMALL);
        args.extend_from_slice(&["--out", out]);
        let dir = ok_path(run(&args));
        run(&["report", dir.to_str().unwrap()])
    };
    assert_eq!(missing_fit.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&missing_fit.stderr).contains("fit.csv"));
}

#[test]
fn pipeline_is_deterministic_and_well_formed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("a");
    let mut args = vec!["simulate"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let dir = ok_path(run(&args));
    ok_path(run(&["fit", dir.to_str().unwrap()]));
    ok_path(run(&["report", dir.to_str().unwrap()]));
    let first = files(&dir);
    ok_path(run(&["report", dir.to_str().unwrap()]));
    assert_eq!(first, files(&dir), "report is not idempotent");

    for name in first.keys().filter(|n| n.ends_with(".csv")) {
        check_csv(&dir.join(name));
    }
    for name in [
        "plos_vs_distance.csv",
        "tree_nlos_vs_theta.csv",
        "density_sweep.csv",
        "pl_vs_theta.csv",
        "extra_loss.csv",
        "fit.csv",
        "summary.json",
        "fit.json",
    ] {
        assert!(first.contains_key(name), "missing {name}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&first["summary.json"]).unwrap();
    assert_eq!(summary["environment"], "urban");

    // The manifest digests cover every file written.
    let manifest: serde_json::Value = serde_json::from_slice(&first["manifest.json"]).unwrap();
    let digests = manifest["files"].as_object().unwrap();
    for (name, bytes) in &first {
        if name == "manifest.json" {
            continue;
        }
        use sha2::Digest;
        let want = hex::encode(sha2::Sha256::digest(bytes));
        assert_eq!(digests[name].as_str(), Some(want.as_str()), "{name}");
    }

    // Re-running from the stored config reproduces the sweep bytes.
    let out_b = tmp.path().join("b");
    let config = dir.join("run.toml");
    let again = ok_path(run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]));
    assert_eq!(dir.file_name(), again.file_name());
    let second = files(&again);
    assert!(second.len() > 10);
    for (name, bytes) in second.iter().filter(|(n, _)| *n != "manifest.json") {
        assert_eq!(Some(bytes), first.get(name), "{name}");
    }
}

#[test]
fn default_scale_records_sample_count() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = ok_path(run(&[
        "simulate",
        "--env",
        "urban",
        "--seed",
        "1",
        "--densities",
        "none",
        "--out",
        tmp.path().to_str().unwrap(),
    ]));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["samples"], 270_000);
    assert_eq!(manifest["seed"], 1);
}

#[test]
fn oracle_check_and_hits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["oracle-check", "--env", "high_rise", "--seed", "2", "--links", "200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let layout = ok_path(run(&["generate", "--env", "urban", "--seed", "2", "--out", tmp.path().to_str().unwrap()]));
    let hits = run(&["hits", "--layout", layout.to_str().unwrap(), "--abs", "10,10,100", "--gu", "900,900"]);
    assert!(hits.status.success(), "{}", String::from_utf8_lossy(&hits.stderr));
    let v: serde_json::Value = serde_json::from_slice(&hits.stdout).unwrap();
    assert!(v.is_object() || v.is_array());
    let bad = run(&["hits", "--layout", layout.to_str().unwrap(), "--abs", "10,10", "--gu", "900,900"]);
    assert_eq!(bad.status.code(), Some(1));
}
