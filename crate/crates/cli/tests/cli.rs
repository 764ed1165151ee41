use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn srgn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run srgn")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn err_json(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("stderr line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {stderr}"))
}

const ANNOTATIONS: &str = r#"{"image_id":"img1","width":200,"height":300,"faces":[{"id":1,"box":[20,10,20,20],"age":"child","gender":"male"},{"id":2,"box":[120,10,20,20]}],"relationships":[{"src":1,"dst":2,"relationship":"father-child"}]}
{"image_id":"img2","width":100,"height":100,"faces":[{"id":1,"box":[0,0,10,10]},{"id":2,"box":[50,0,10,10]},{"id":3,"box":[80,50,10,10]}],"relationships":[{"src":1,"dst":2},{"src":2,"dst":3,"relationship":"friends","domain":"reciprocity"}]}
"#;

#[test]
fn prepare_writes_graphs_and_summary() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("ann.jsonl"), ANNOTATIONS).unwrap();
    let stdout = ok(&srgn(dir.path(), &["prepare", "--input", "ann.jsonl", "--out", "g.jsonl"]));
    assert_eq!(stdout.trim(), "2 images, 3 relationships, 5 persons, 2 attributes");
    let first = fs::read(dir.path().join("g.jsonl")).unwrap();
    assert_eq!(String::from_utf8_lossy(&first).lines().count(), 2);
    let g: Value = serde_json::from_str(String::from_utf8_lossy(&first).lines().next().unwrap()).unwrap();
    // 3x wide, 6x tall, centred on the face
    assert_eq!(g["persons"][0]["box"], serde_json::json!([0.0, 10.0, 60.0, 120.0]));
    assert_eq!(g["edges"][0]["domain"], "attachment");

    ok(&srgn(dir.path(), &["prepare", "--input", "ann.jsonl", "--out", "g.jsonl"]));
    assert_eq!(fs::read(dir.path().join("g.jsonl")).unwrap(), first);
}

#[test]
fn prepare_rejects_face_outside_image() {
    let dir = TempDir::new().unwrap();
    let bad = r#"{"image_id":"far","width":50,"height":50,"faces":[{"id":1,"box":[60,0,10,10]}],"relationships":[]}"#;
    fs::write(dir.path().join("ann.jsonl"), bad).unwrap();
    let out = srgn(dir.path(), &["prepare", "--input", "ann.jsonl", "--out", "g.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    let e = err_json(&out);
    assert_eq!(e["code"], "geometry");
    assert!(e["message"].as_str().unwrap().contains("far"));
    assert!(!dir.path().join("g.jsonl").exists(), "partial output left behind");
}

#[test]
fn prepare_reports_parse_location() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("ann.jsonl"), format!("{ANNOTATIONS}{{\"image_id\":\"x\"}}\n")).unwrap();
    let out = srgn(dir.path(), &["prepare", "--input", "ann.jsonl", "--out", "g.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    let e = err_json(&out);
    assert_eq!(e["code"], "parse");
    assert_eq!(e["context"]["line"], 3);
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new(images: &str, correlation: &str) -> Fixture {
        let dir = TempDir::new().unwrap();
        ok(&srgn(
            dir.path(),
            &[
                "synth", "--out-graphs", "g.jsonl", "--out-features", "f.srgf", "--images", images, "--correlation",
                correlation, "--seed", "4",
            ],
        ));
        Fixture { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn train_eval_infer_round() {
    let fx = Fixture::new("12", "1.0");
    let args = [
        "train", "--graphs", "g.jsonl", "--features", "f.srgf", "--out", "ck.bin", "--log", "log.jsonl", "--epochs",
        "60", "--seed", "4",
    ];
    ok(&srgn(fx.path(), &args));
    let log = fs::read_to_string(fx.file("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 60);
    let rec: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(rec["epoch"], 1);
    assert!(rec["loss_per_task"]["relationship"].is_number());

    let report = ok(&srgn(
        fx.path(),
        &["eval", "--graphs", "g.jsonl", "--features", "f.srgf", "--checkpoint", "ck.bin", "--seed", "4"],
    ));
    let report: Value = serde_json::from_str(&report).unwrap();
    for key in ["srrec_accuracy", "srggen_accuracy", "per_class_precision", "mean_ap", "confusion"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    let infer = ["infer", "--graphs", "g.jsonl", "--features", "f.srgf", "--checkpoint", "ck.bin", "--seed", "4"];
    let a = ok(&srgn(fx.path(), &infer));
    let b = ok(&srgn(fx.path(), &infer));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 12);
    for line in a.lines() {
        let g: Value = serde_json::from_str(line).unwrap();
        for p in g["persons"].as_array().unwrap() {
            assert!(p["age"].is_string() && p["gender"].is_string());
        }
        for e in g["edges"].as_array().unwrap() {
            assert!(e["relationship"].is_string() && e["domain"].is_string());
        }
    }

    let mut dot_args = infer.to_vec();
    dot_args.extend(["--format", "dot"]);
    let dot = ok(&srgn(fx.path(), &dot_args));
    assert_eq!(dot.matches("digraph").count(), 12);
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    assert!(dot.lines().all(|l| !l.contains("unlabeled")));
}

#[test]
fn eval_with_other_vocabulary_is_alignment_error() {
    let fx = Fixture::new("3", "0.9");
    ok(&srgn(
        fx.path(),
        &["train", "--graphs", "g.jsonl", "--features", "f.srgf", "--out", "ck.bin", "--epochs", "1"],
    ));
    let out = srgn(
        fx.path(),
        &["eval", "--graphs", "g.jsonl", "--features", "f.srgf", "--checkpoint", "ck.bin", "--dataset", "pisc"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["code"], "alignment");
}

#[test]
fn infer_lists_missing_features() {
    let fx = Fixture::new("2", "0.9");
    ok(&srgn(
        fx.path(),
        &["train", "--graphs", "g.jsonl", "--features", "f.srgf", "--out", "ck.bin", "--epochs", "1"],
    ));
    let other = Fixture::new("1", "0.9");
    fs::copy(other.file("f.srgf"), fx.file("few.srgf")).unwrap();
    let out = srgn(
        fx.path(),
        &["infer", "--graphs", "g.jsonl", "--features", "few.srgf", "--checkpoint", "ck.bin", "--out", "p.jsonl"],
    );
    assert_eq!(out.status.code(), Some(2));
    let e = err_json(&out);
    assert_eq!(e["code"], "missing_feature");
    let keys = e["context"]["keys"].as_array().unwrap();
    assert!(keys.iter().any(|k| k.as_str().unwrap().starts_with("person synth_00001/")));
    assert!(!fx.file("p.jsonl").exists());
}

#[test]
fn config_file_with_flag_overrides() {
    let fx = Fixture::new("4", "0.9");
    fs::write(
        fx.file("run.json"),
        r#"{"seed": 4, "hidden": 8, "graphs": "g.jsonl", "features": "f.srgf", "train": {"epochs": 2, "time_steps": 1}}"#,
    )
    .unwrap();
    ok(&srgn(fx.path(), &["--config", "run.json", "train", "--out", "a.bin"]));
    ok(&srgn(fx.path(), &["--config", "run.json", "train", "--out", "b.bin", "--time-steps", "1"]));
    assert_eq!(fs::read(fx.file("a.bin")).unwrap(), fs::read(fx.file("b.bin")).unwrap());
    ok(&srgn(fx.path(), &["--config", "run.json", "train", "--out", "c.bin", "--seed", "5"]));
    assert_ne!(fs::read(fx.file("a.bin")).unwrap(), fs::read(fx.file("c.bin")).unwrap());

    fs::write(fx.file("bad.json"), r#"{"sede": 4}"#).unwrap();
    let out = srgn(fx.path(), &["--config", "bad.json", "gradcheck"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["code"], "parse");
}

#[test]
fn missing_input_path() {
    let dir = TempDir::new().unwrap();
    let out = srgn(dir.path(), &["prepare", "--input", "nope.jsonl", "--out", "g.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["code"], "config");
}

#[test]
fn gradcheck_reports_pass() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&srgn(dir.path(), &["gradcheck", "--report", "r.json"]));
    assert!(stdout.starts_with("pass, max_rel_err"), "{stdout}");
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    assert!(r["max_rel_err"].as_f64().unwrap() < 1e-4);
}

#[test]
fn ablate_prints_table() {
    let fx = Fixture::new("6", "0.9");
    let stdout = ok(&srgn(
        fx.path(),
        &["ablate", "--graphs", "g.jsonl", "--features", "f.srgf", "--epochs", "2", "--out", "t.json"],
    ));
    assert_eq!(stdout.lines().count(), 8, "{stdout}");
    let t: Value = serde_json::from_str(&fs::read_to_string(fx.file("t.json")).unwrap()).unwrap();
    assert_eq!(t["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn log_level_from_environment() {
    let fx = Fixture::new("2", "0.9");
    let out = Command::new(env!("CARGO_BIN_EXE_srgn"))
        .current_dir(fx.path())
        .env("SRGN_LOG", "info")
        .args(["train", "--graphs", "g.jsonl", "--features", "f.srgf", "--out", "ck.bin", "--epochs", "1"])
        .output()
        .unwrap();
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("loaded 2 graphs"));
}
