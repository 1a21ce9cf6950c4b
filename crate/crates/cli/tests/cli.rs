use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use ontomerge::{are_isomorphic, compute_closure, find_homomorphisms, fixtures, Limits, SearchMode};
use ontomerge_cli::{parse_ontology, serialize_ontology};
use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontomerge")).args(args).env_remove("ONTOMERGE_LIMITS").output().unwrap()
}

fn cli_env(args: &[&str], limits: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontomerge")).args(args).env("ONTOMERGE_LIMITS", limits).output().unwrap()
}

fn path(rel: &str) -> String {
    fixture(rel).to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn canonical_files_round_trip_byte_for_byte() {
    for f in ["person/PS.json", "person/PE.json"] {
        let text = fs::read_to_string(fixture(f)).unwrap();
        let o = parse_ontology(&fixture(f)).unwrap();
        assert_eq!(serialize_ontology(&o), text, "{f}");
    }
}

#[test]
fn validate_accepts_every_kind_of_file() {
    let o = cli(&[
        "validate",
        &path("person/PS.json"),
        &path("person/person-alignment.json"),
        &path("person/manifest.json"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn malformed_inputs_exit_with_two() {
    for (file, needle) in [
        ("bad/duplicate.json", "duplicate concept id `x`"),
        ("bad/syntax.json", "line 6"),
        ("bad/tag-mismatch.json", "tag mismatch"),
        ("bad/not-total.json", "not total"),
        ("bad/undeclared.json", "not declared"),
    ] {
        let o = cli(&["validate", &path(file)]);
        assert_eq!(o.status.code(), Some(2), "{file}");
        assert!(stderr(&o).contains(needle), "{file}: {}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn merge_produces_the_person_pushout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = cli(&["merge", &path("person/person-alignment.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let merged_file = dir.path().join("merged.json");
    fs::write(&merged_file, serde_json::to_string(&doc["merged"]).unwrap()).unwrap();
    let merged = parse_ontology(&merged_file).unwrap();
    assert_eq!(merged.concept_count(), 3);
    assert_eq!(merged.relation_count(), 2);
    assert!(are_isomorphic(&merged, &fixtures::merged_person()));
    assert_eq!(doc["inject_left"]["concepts"]["c1"], doc["inject_right"]["concepts"]["d1"]);
}

#[test]
fn merge_dot_uses_label_then_tag_then_id() {
    let o = cli(&["merge", &path("person/person-alignment.json"), "--dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"c1\" [label=\"person\"]"));
    assert!(dot.contains("\"d2\" [label=\"Employee\"]"));
    assert!(dot.contains("\"d2\" -> \"c1\" [label=\"isa\"]"));
}

#[test]
fn closure_of_the_person_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["closure", &path("person/manifest.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(&o);
    let layers: Vec<u64> = doc["members"].as_array().unwrap().iter().map(|m| m["layer"].as_u64().unwrap()).collect();
    assert_eq!(layers, [1, 1, 2]);
    assert_eq!(doc["members"][2]["provenance"], "(PS ⊔ PE)");
    for m in doc["members"].as_array().unwrap() {
        let f = dir.path().join(m["file"].as_str().unwrap());
        assert_eq!(parse_ontology(&f).unwrap().concept_count() as u64, m["concepts"].as_u64().unwrap());
    }
    assert_eq!(fs::read_to_string(dir.path().join("closure.json")).unwrap(), stdout(&o));

    // same keys as the library run on the equivalent in-memory repository
    let lib = compute_closure(&fixtures::person_repository(), Limits::default()).unwrap();
    let keys: Vec<String> = lib.members().iter().map(|m| m.key.digest()).collect();
    let cli_keys: Vec<String> =
        doc["members"].as_array().unwrap().iter().map(|m| m["key"].as_str().unwrap().to_owned()).collect();
    assert_eq!(keys, cli_keys);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["closure", "graphs/manifest.json"],
        vec!["order", "graphs/manifest.json"],
        vec!["check", "graphs/manifest.json"],
        vec!["merge", "graphs/g1-g2.json"],
    ] {
        let full: Vec<String> =
            args.iter().enumerate().map(|(i, a)| if i == 1 { path(a) } else { (*a).to_owned() }).collect();
        let full: Vec<&str> = full.iter().map(String::as_str).collect();
        assert_eq!(cli(&full).stdout, cli(&full).stdout, "{args:?}");
    }
}

#[test]
fn check_reports_sa_on_the_person_manifest() {
    let o = cli(&["check", &path("person/manifest.json"), "--property", "SA"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["reports"][0]["property"], "SA");
    assert_eq!(doc["reports"][0]["holds"], true);

    let o = cli(&["check", &path("person/manifest.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(&o);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 12);
    assert_eq!(doc["null_extension_associative"], true);
}

#[test]
fn check_exits_three_with_a_counterexample() {
    let o = cli(&["check", &path("graphs/partial.json"), "-p", "sa", "-p", "I"]);
    assert_eq!(o.status.code(), Some(3));
    let doc = json(&o);
    assert_eq!(doc["reports"][0]["holds"], false);
    assert_eq!(doc["reports"][1]["holds"], true);
    assert!(doc["reports"][0]["counterexample"]["equation"].as_str().unwrap().contains('↑'));
    assert!(stderr(&o).contains("SA fails on"));
}

#[test]
fn fully_aligned_graphs_pass_every_check() {
    let o = cli(&["check", &path("graphs/manifest.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = cli(&["closure", &path("graphs/manifest.json")]);
    assert_eq!(json(&o)["members"].as_array().unwrap().len(), 7);
}

#[test]
fn order_writes_poset_and_hasse_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["order", &path("graphs/manifest.json"), "--out", dir.path().to_str().unwrap(), "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert_eq!(dot, fs::read_to_string(dir.path().join("hasse.dot")).unwrap());
    assert_eq!(dot.matches("rank=same").count(), 3);
    assert_eq!(dot.matches(" -> ").count(), 9);
    let poset: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("poset.json")).unwrap()).unwrap();
    assert_eq!(poset["hasse"].as_array().unwrap().len(), 9);
    assert_eq!(poset["classes"].as_array().unwrap().len(), 7);
}

#[test]
fn queries_on_the_person_closure() {
    let m = path("person/manifest.json");
    let lines = |args: &[&str]| -> Vec<String> {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o).lines().map(str::to_owned).collect()
    };
    let max = lines(&["query", &m, "--maximal"]);
    assert_eq!(max.len(), 1);
    assert_eq!(lines(&["query", &m, "--minimal"]), ["PS", "PE"]);
    assert_eq!(lines(&["query", &m, "--sort"]), ["PS", "PE", max[0].as_str()]);
    assert_eq!(lines(&["query", &m, "--above", "PE"]), ["PE", max[0].as_str()]);
    assert_eq!(lines(&["query", &m, "--below", &max[0][..6]]).len(), 3);
    assert_eq!(cli(&["query", &m, "--above", "nope"]).status.code(), Some(1));
}

#[test]
fn provenance_renders_the_merge_tree() {
    let o = cli(&["provenance", &path("graphs/manifest.json"), "G2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(1), Some("G2"));
    let closure = json(&cli(&["closure", &path("graphs/manifest.json")]));
    let top = closure["members"].as_array().unwrap().last().unwrap()["key"].as_str().unwrap().to_owned();
    let o = cli(&["provenance", &path("graphs/manifest.json"), &top]);
    let tree = stdout(&o).lines().nth(1).unwrap().to_owned();
    assert!(tree.contains('⊔'));
    for g in ["G1", "G2", "G3"] {
        assert!(tree.contains(g), "{tree}");
    }
}

#[test]
fn hom_and_iso_match_the_library() {
    let ps = Arc::new(parse_ontology(&fixture("person/PS.json")).unwrap());
    let g1 = Arc::new(parse_ontology(&fixture("graphs/G1.json")).unwrap());
    let g2 = Arc::new(parse_ontology(&fixture("graphs/overlap.json")).unwrap());
    let expected = find_homomorphisms(&g2, &g1, SearchMode::Count, 1_000_000).unwrap().count();
    let o = cli(&["hom", &path("graphs/overlap.json"), &path("graphs/G1.json"), "--count"]);
    assert_eq!(stdout(&o).trim(), expected.to_string());
    let o = cli(&["hom", &path("graphs/overlap.json"), &path("graphs/G1.json"), "--all"]);
    assert_eq!(json(&o).as_array().unwrap().len() as u128, expected);
    let o = cli(&["hom", &path("person/PS.json"), &path("person/PE.json")]);
    assert_eq!(json(&o), Value::Null);
    assert_eq!(find_homomorphisms(&ps, &g1, SearchMode::Count, 1_000).unwrap().count(), 0);

    let o = cli(&["iso", &path("person/PS.json"), &path("person/PE.json")]);
    assert_eq!(json(&o)["isomorphic"], false);
    let o = cli(&["iso", &path("person/PS.json"), &path("person/PS.json")]);
    assert_eq!(json(&o)["isomorphic"], true);
    assert_eq!(json(&o)["mapping"]["concepts"]["c2"], "c2");
}

#[test]
fn limits_from_the_environment() {
    let o = cli_env(&["closure", &path("person/manifest.json")], "max_members=2");
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("max_members"));
    let o = cli_env(&["closure", &path("person/manifest.json")], "max_members=3,max_rounds=8");
    assert_eq!(o.status.code(), Some(0));
    let o = cli_env(&["closure", &path("person/manifest.json")], "max_people=3");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hom_budget_exhaustion_exits_four() {
    let o = cli(&["hom", &path("graphs/G1.json"), &path("graphs/manifest.json"), "--count"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["hom", &path("graphs/overlap.json"), &path("graphs/G1.json"), "--count", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&[]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["query", &path("person/manifest.json")]).status.code(), Some(1));
    assert_eq!(cli(&["check", &path("person/manifest.json"), "--property", "XYZ"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn audit_is_reproducible() {
    let a = cli(&["audit", "--seed", "7", "--samples", "150"]);
    let b = cli(&["audit", "--seed", "7", "--samples", "150"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["implication_violations"], 0);
    assert_eq!(json(&a)["sa_passing"], json(&a)["null_extension_semigroups"]);
}
