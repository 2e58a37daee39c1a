use std::fs;
use std::path::{Path, PathBuf};

use possibility::cli::run;
use possibility::document::{frame_to_json, parse_frame};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("possibility").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(name: &str) -> String {
    corpus().join(name).to_string_lossy().into_owned()
}

#[test]
fn corpus_has_at_least_ten_frames() {
    assert!(corpus_files().len() >= 10);
}

#[test]
fn corpus_round_trips_through_the_document_format() {
    for file in corpus_files() {
        let text = fs::read_to_string(&file).unwrap();
        let frame = parse_frame(&text).unwrap();
        let written = frame_to_json(&frame);
        let again = parse_frame(&written).unwrap();
        assert_eq!(again, frame, "{}", file.display());
        assert_eq!(frame_to_json(&again), written, "{}", file.display());
    }
}

#[test]
fn dot_and_classification_match_goldens() {
    for file in corpus_files() {
        let f = file.to_string_lossy().into_owned();
        let (code, dot, _) = cli(&["export-dot", &f]);
        assert_eq!(code, 0);
        assert_eq!(dot, fs::read_to_string(file.with_extension("dot")).unwrap(), "{f}");
        assert_eq!(cli(&["export-dot", &f]).1, dot);
        let (code, flags, _) = cli(&["classify", &f]);
        assert_eq!(code, 0);
        assert_eq!(flags, fs::read_to_string(file.with_extension("classify.txt")).unwrap(), "{f}");
        assert_eq!(cli(&["validate", &f]).0, 0, "{f}");
    }
}

#[test]
fn verdicts_set_the_exit_code() {
    let (code, out, _) = cli(&["valid", &path("fig11_fan.json"), "[i](p1 -> p2) -> ([i]p1 -> [i]p2)"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("verdict: true\n"));
    let (code, out, _) = cli(&["valid", &path("kripke_dead_end.json"), "[i]p1 -> <i>p1"]);
    assert_eq!(code, 1);
    assert!(out.contains("witness: state 0 under p1={}"));
    let (_, out, _) = cli(&["classify", &path("p3.json")]);
    assert!(out.contains("rich: true") && out.contains("principal: true"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = std::env::temp_dir().join(format!("possibility-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    fs::write(&bad, "{\"states\": 2,\n \"leq\": [[0, 1],\n").unwrap();
    let (code, _, err) = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    let not_order = dir.join("cycle.json");
    fs::write(&not_order, r#"{"states": 2, "leq": [[0, 1], [1, 0]], "props": "full"}"#).unwrap();
    assert_eq!(cli(&["validate", not_order.to_str().unwrap()]).0, 2);
    assert_eq!(cli(&["valid", &path("fig11_fan.json"), "p1 ->"]).0, 2);
    assert_eq!(cli(&["valid", &path("missing.json"), "p1"]).0, 2);
    assert_eq!(cli(&["no-such-command"]).0, 2);
    let invalid = dir.join("invalid.json");
    fs::write(&invalid, r#"{"states": 2, "leq": [[1, 0]], "rels": {"i": [[0, 1]]}, "props": "full"}"#).unwrap();
    let (code, out, _) = cli(&["validate", invalid.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("witness:"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budgets_and_caps_exit_with_three() {
    let (code, _, err) = cli(&["valid", &path("fig13_tree.json"), "[i]p1 -> p1", "--budget", "5"]);
    assert_eq!(code, 3, "{err}");
    assert_eq!(cli(&["enumerate", "posets", "--size", "9"]).0, 3);
}

#[test]
fn forcing_at_a_state() {
    let dir = std::env::temp_dir().join(format!("possibility-force-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let val = dir.join("val.json");
    fs::write(&val, r#"{"p1": [1]}"#).unwrap();
    let v = val.to_str().unwrap();
    let (code, out, _) = cli(&["force", &path("fig11_fan.json"), "--val", v, "--at", "0", "<i>p1"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = cli(&["force", &path("fig11_fan.json"), "--val", v, "--at", "0", "[i]p1"]);
    assert_eq!(code, 1);
    fs::write(&val, r#"{"p1": [0]}"#).unwrap();
    assert_eq!(cli(&["force", &path("fig11_fan.json"), "--val", v, "--at", "0", "p1"]).0, 2);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn transforms_and_duals() {
    let (code, out, _) = cli(&["transform", "separative-quotient", &path("fig10_doubled_middle.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("map: [0,0,0,1,2]"));
    let (_, out, _) = cli(&["transform", "tighten", &path("fig12_two_tops.json")]);
    assert!(out.contains("map: [0,1,2,3,4,4]"));
    let (_, out, _) = cli(&["transform", "subframe", &path("fig13_tree.json"), "--subset", "0,3,4,5,6"]);
    assert!(out.contains("kind: selective"), "{out}");
    let (code, _, _) = cli(&["transform", "disjoint-union", &path("chain2.json"), &path("p3.json")]);
    assert_eq!(code, 0);
    let (code, out, _) = cli(&["dual", "zeta-f", &path("p3.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("isomorphism: true"));
    let (code, _, _) = cli(&["dual", "zeta-f", &path("fig11_fan.json")]);
    assert_eq!(code, 1);
    let (code, out, _) = cli(&["dual", "under", &path("fig11_fan.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("elements: 8"));
}

#[test]
fn morphism_subcommands() {
    let p3 = path("p3.json");
    let (code, out, _) = cli(&["morphism", "find", &p3, &p3, "--flag", "isomorphism"]);
    assert_eq!(code, 0);
    assert!(out.contains("map: [0,1,2]"));
    let (code, _, _) = cli(&["morphism", "check", &p3, &p3, "--map", "1,0,2", "--grade", "p"]);
    assert_eq!(code, 0);
    let (code, out, _) = cli(&["morphism", "check", &p3, &p3, "--map", "0,0,2", "--flag", "injective"]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn enumeration_and_correspondence() {
    let (_, out, _) = cli(&["enumerate", "posets", "--size", "4", "--count-only"]);
    assert_eq!(out, "count: 16\nverdict: true\n");
    let (_, out, _) = cli(&["enumerate", "baos", "--size", "1", "--count-only"]);
    assert!(out.starts_with("count: 2\n"));
    let (code, out, _) = cli(&["sweep", "e;i|i,i;e", "--max-size", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("result: no divergence, "), "{out}");
    assert!(out.contains(" frames checked\n"));
    let (code, out, _) = cli(&["correspond", "e;i;e;e", "--kripke", "--frame", &path("kripke_reflexive1.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("condition: ∀x∀y∀z((x = y ∧ x = z) → ∃u(y = u ∧ z R[i] u))"), "{out}");
    assert!(out.contains("valid: true"));
}
