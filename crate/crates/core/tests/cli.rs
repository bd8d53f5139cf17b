mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use sense_embed::wsi::{self, Instance, KeyEntry};
use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn sense_embed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sense-embed"))
        .args(args)
        .env_remove("SENSE_EMBED_DATA")
        .output()
        .expect("spawn sense-embed")
}

fn code(args: &[&str]) -> i32 {
    sense_embed(args).status.code().unwrap_or(-1)
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

struct Fixture {
    dir: TempDir,
    corpus: PathBuf,
    dataset: PathBuf,
    gold: PathBuf,
}

fn fixture() -> Fixture {
    let syn = synthetic(&SyntheticSpec {
        tokens: 60_000,
        heldout_per_topic: 20,
        ..Default::default()
    });
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    let dataset = dir.path().join("dataset.tsv");
    let gold = dir.path().join("gold.key");
    fs::write(&corpus, &syn.text).unwrap();
    wsi::write_tsv(&syn.heldout, fs::File::create(&dataset).unwrap()).unwrap();
    wsi::write_key(&syn.gold, fs::File::create(&gold).unwrap()).unwrap();
    Fixture {
        dir,
        corpus,
        dataset,
        gold,
    }
}

impl Fixture {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn train(&self, name: &str, extra: &[&str]) -> PathBuf {
        let out = self.path(name);
        let mut args = vec!["train", "--corpus", self.corpus.to_str().unwrap(), "--out", out.to_str().unwrap(), "--dim", "10"];
        args.extend_from_slice(extra);
        assert_eq!(code(&args), 0);
        out
    }
}

fn write_key(path: &Path, entries: &[(&str, &str, &str)]) {
    let e: Vec<KeyEntry> = entries
        .iter()
        .map(|(t, i, l)| KeyEntry {
            target: t.to_string(),
            instance: i.to_string(),
            label: l.to_string(),
        })
        .collect();
    wsi::write_key(&e, fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    let f = fixture();
    let out = s(&f.path("out"));
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["train", "--out", &out]), 2);
    assert_eq!(code(&["train", "--corpus", "no/such/file.txt", "--out", &out]), 2);
    assert_eq!(code(&["train", "--corpus", &s(&f.corpus), "--out", &out, "--dim", "0"]), 2);
    assert_eq!(code(&["eval", "--gold", &s(&f.gold), "--pred", &s(&f.gold), "--bogus"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn strict_labeling_exits_3_on_unknown_target() {
    let f = fixture();
    let tables = f.train("t", &[]);
    let dataset = f.path("unknown.tsv");
    let inst = Instance {
        id: "zzzz.n.1".into(),
        target: "zzzz.n".into(),
        tokens: vec!["alpha0001".into(), "zzzz".into(), "alpha0002".into()],
        target_position: 1,
    };
    wsi::write_tsv(&[inst], fs::File::create(&dataset).unwrap()).unwrap();
    let out = f.path("strict");
    assert_eq!(code(&["label", "--tables", &s(&tables), "--dataset", &s(&dataset), "--out", &s(&out), "--strict"]), 3);

    let out = f.path("lenient");
    assert_eq!(code(&["label", "--tables", &s(&tables), "--dataset", &s(&dataset), "--out", &s(&out)]), 0);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["unknown_targets"], serde_json::json!(["zzzz.n"]));
    assert_eq!(fs::read_to_string(out.join("key.txt")).unwrap().trim(), "zzzz.n zzzz.n.1 zzzz.n.s1");
}

#[test]
fn universe_mismatch_exits_4() {
    let f = fixture();
    let gold = f.path("g.key");
    let pred = f.path("p.key");
    write_key(&gold, &[("w.n", "w.n.1", "a"), ("w.n", "w.n.2", "b")]);
    write_key(&pred, &[("w.n", "w.n.1", "x"), ("w.n", "w.n.3", "y")]);
    let out = sense_embed(&["eval", "--gold", &s(&gold), "--pred", &s(&pred)]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("w.n.2") && err.contains("w.n.3"), "{err}");
}

#[test]
fn eval_reports_pinned_v_measure() {
    let f = fixture();
    let gold = f.path("g.key");
    let pred = f.path("p.key");
    write_key(&gold, &[("w.n", "1", "a"), ("w.n", "2", "a"), ("w.n", "3", "b"), ("w.n", "4", "b")]);
    write_key(&pred, &[("w.n", "1", "x"), ("w.n", "2", "x"), ("w.n", "3", "x"), ("w.n", "4", "y")]);
    let out = f.path("eval");
    assert_eq!(code(&["eval", "--gold", &s(&gold), "--pred", &s(&pred), "--out", &s(&out)]), 0);
    let m = json(&out.join("metrics.json"));
    let all = &m["rows"][0];
    assert_eq!(all["name"], "All");
    assert!((all["vm"].as_f64().unwrap() - 34.37).abs() < 0.01);
    assert_eq!(all["clusters"].as_f64().unwrap(), 2.0);
    // Four instances are too few for the supervised splits.
    assert_eq!(all["supervised_targets"], 0);
}

fn parse_key(path: &Path) -> Vec<KeyEntry> {
    wsi::load_key(path).unwrap()
}

#[test]
fn label_summary_matches_key_file() {
    let f = fixture();
    let tables = f.train("t", &["--k", "2"]);
    let out = f.path("label");
    assert_eq!(code(&["label", "--tables", &s(&tables), "--dataset", &s(&f.dataset), "--out", &s(&out)]), 0);
    let key = parse_key(&out.join("key.txt"));
    let dataset = wsi::load_dataset(&f.dataset).unwrap();
    assert_eq!(key.len(), dataset.len());
    let mut used: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for e in &key {
        used.entry(e.target.clone()).or_default().insert(e.label.clone());
    }
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["instances"], key.len());
    for (t, labels) in used {
        assert_eq!(summary["senses_used"][&t], labels.len());
    }
}

#[test]
fn manifest_digests_outputs() {
    let f = fixture();
    let tables = f.train("t", &[]);
    let out = f.path("label");
    assert_eq!(code(&["label", "--tables", &s(&tables), "--dataset", &s(&f.dataset), "--out", &s(&out)]), 0);
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "label");
    let outputs = manifest["outputs"].as_array().unwrap();
    let key = out.join("key.txt");
    let entry = outputs
        .iter()
        .find(|o| o["path"].as_str() == Some(key.to_str().unwrap()))
        .expect("key listed");
    let digest = hex::encode(Sha256::digest(fs::read(&key).unwrap()));
    assert_eq!(entry["sha256"].as_str().unwrap(), digest);
    assert!(out.join("config.json").exists());
    assert!(!manifest["inputs"].as_array().unwrap().is_empty());
}

#[test]
fn binary_and_text_tables_label_alike() {
    let f = fixture();
    let text = f.train("text", &[]);
    let bin = f.train("bin", &["--format", "binary"]);
    assert!(bin.join("tables.bin").exists());
    let a = f.path("la");
    let b = f.path("lb");
    assert_eq!(code(&["label", "--tables", &s(&text), "--dataset", &s(&f.dataset), "--out", &s(&a)]), 0);
    assert_eq!(code(&["label", "--tables", &s(&bin), "--dataset", &s(&f.dataset), "--out", &s(&b)]), 0);
    assert_eq!(fs::read(a.join("key.txt")).unwrap(), fs::read(b.join("key.txt")).unwrap());
}

#[test]
fn relative_inputs_resolve_against_data_dir() {
    let f = fixture();
    let out = f.path("out");
    let status = Command::new(env!("CARGO_BIN_EXE_sense-embed"))
        .args(["train", "--corpus", "corpus.txt", "--out", out.to_str().unwrap(), "--dim", "8"])
        .env("SENSE_EMBED_DATA", f.dir.path())
        .current_dir(std::env::temp_dir())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("tables").is_dir());
}

#[test]
fn crp_training_logs_new_senses() {
    let f = fixture();
    let out = f.train("crp", &["--mode", "crp", "--gamma", "0.5"]);
    let log = fs::read_to_string(out.join("trainlog.jsonl")).unwrap();
    let lines: Vec<Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1]["new_senses"].as_u64().unwrap() > 0);
    let config = json(&out.join("config.json"));
    assert_eq!(config["config"]["training"]["mode"], "crp");
}

#[test]
fn baselines_produce_complete_keys() {
    let f = fixture();
    let tables = f.train("t", &[]);
    let dataset = wsi::load_dataset(&f.dataset).unwrap();

    let km = f.path("km");
    assert_eq!(
        code(&["baseline", "we-kmeans", "--dataset", &s(&f.dataset), "--vectors", &s(&tables), "--out", &s(&km)]),
        0
    );
    let key = parse_key(&km.join("key.txt"));
    assert_eq!(key.len(), dataset.len());
    let labels: BTreeSet<&str> = key.iter().map(|e| e.label.as_str()).collect();
    assert!(labels.len() <= 3 && labels.len() >= 2, "{labels:?}");

    let ppmi = f.path("ppmi");
    assert_eq!(
        code(&["baseline", "crp-ppmi", "--dataset", &s(&f.dataset), "--corpus", &s(&f.corpus), "--out", &s(&ppmi), "--gamma", "0.5"]),
        0
    );
    let key = parse_key(&ppmi.join("key.txt"));
    assert_eq!(key.len(), dataset.len());
    assert!(ppmi.join("ppmi.txt").exists());
    assert!(ppmi.join("trainlog.jsonl").exists());

    assert_eq!(code(&["baseline", "we-kmeans", "--dataset", &s(&f.dataset), "--out", &s(&km)]), 2);
}

#[test]
fn inspect_lists_senses() {
    let f = fixture();
    let tables = f.train("t", &["--k", "2"]);
    let out = sense_embed(&["inspect", "--tables", &s(&tables), PSEUDO, "--top", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("  s1 (n=") && text.contains("  s2 (n="), "{text}");
}
