use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn discocat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discocat"))
        .current_dir(data())
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn parse_reports_links_and_derivation() {
    let out = discocat(&["parse", "men kill dogs", "--grammar", "toy.json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["grammatical"], true);
    assert_eq!(v["reduction"]["links"], serde_json::json!([[0, 1], [3, 4]]));

    let out = discocat(&["parse", "men kill dogs", "--grammar", "toy.json", "--logic", "lambek"]);
    assert!(out.status.success());
    let d = json(&out)["derivation"].as_str().unwrap().to_string();
    assert!(d.starts_with("(compose"), "{d}");
}

#[test]
fn exit_codes() {
    for logic in ["pregroup", "lambek"] {
        let out = discocat(&["parse", "kill men dogs", "--grammar", "toy.json", "--logic", logic]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(json(&out)["grammatical"], false);
        assert!(String::from_utf8_lossy(&out.stderr).contains("ungrammatical"));

        let out = discocat(&["parse", "men eat dogs", "--grammar", "toy.json", "--logic", logic]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("eat"));
    }
    let out = discocat(&["parse", "men", "--grammar", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn meaning_is_the_same_under_both_logics() {
    let base = ["meaning", "men do not kill dogs", "--grammar", "toy.json", "--model", "truth_model.json"];
    let p = discocat(&[&base[..], &["--logic", "pregroup"]].concat());
    let l = discocat(&[&base[..], &["--logic", "lambek"]].concat());
    assert!(p.status.success() && l.status.success());
    assert_eq!(p.stdout, l.stdout);
    assert_eq!(json(&p)["vector"]["data"], serde_json::json!([0.0, 1.0]));
}

#[test]
fn emitted_plan_is_tagged() {
    let out = discocat(&[
        "meaning", "men kill dogs", "--grammar", "toy.json", "--model", "truth_model.json", "--emit-plan",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let steps = v["plan"]["steps"].as_array().unwrap();
    assert!(steps.iter().any(|s| s["op"] == "contract"));
    assert!(steps.iter().all(|s| s["op"].is_string()));
}

#[test]
fn clasp_diagrams_match_goldens() {
    for (sentence, file) in [
        ("men kill dogs", "clasp_men_kill_dogs.svg"),
        ("men do not kill dogs", "clasp_men_do_not_kill_dogs.svg"),
    ] {
        let out = discocat(&["diagram", sentence, "--grammar", "toy.json", "--logic", "lambek"]);
        assert!(out.status.success());
        let golden = std::fs::read(data().join("golden").join(file)).unwrap();
        assert!(out.stdout == golden, "{file} differs");
    }
}

#[test]
fn pipeline_with_a_single_composer() {
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("m.json");
    let model = model.to_str().unwrap();
    let out = discocat(&["build-model", "--corpus", "corpus.txt", "--basis-size", "10", "--out", model]);
    assert!(out.status.success());
    let out = discocat(&["build-verbs", "--model", model, "--triples", "triples.tsv"]);
    assert!(out.status.success());
    let out = discocat(&[
        "eval", "--dataset", "dataset.tsv", "--grammar", "disambiguation.json", "--model", model,
        "--composers", "add",
    ]);
    assert!(out.status.success());
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["composer"], "add");

    let out = discocat(&[
        "eval", "--dataset", "dataset.tsv", "--grammar", "disambiguation.json", "--model", model,
        "--format", "text",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for c in ["baseline", "add", "multiply", "cat1", "cat2"] {
        assert!(text.contains(c), "{text}");
    }
}

#[test]
fn raw_verbs_need_a_corpus() {
    let out = discocat(&["build-verbs", "--model", "truth_model.json", "--triples", "triples.tsv", "--raw"]);
    assert_eq!(out.status.code(), Some(2));
}
