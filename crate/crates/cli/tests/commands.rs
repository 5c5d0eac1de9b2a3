use std::path::PathBuf;
use std::process::{Command, Output};

use episteme::checker::check_pseudo;
use episteme::models::{load_model, load_pseudo, validate_pseudo, PseudoModel};
use episteme::syntax::parse_formula;

fn corpus(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(file)
        .display()
        .to_string()
}

fn episteme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_episteme")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn witness(path: &std::path::Path) -> (PseudoModel, usize) {
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let pm = load_pseudo(&doc["model"].to_string()).unwrap();
    let s = pm.state_index(doc["state"].as_str().unwrap()).unwrap();
    (pm, s)
}

#[test]
fn sat_witness_is_a_pseudo_model_satisfying_the_formula() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    let text = "D{a,b} p & ~K a p & ~K b p";
    let out = episteme(&["sat", "--formula", text, "--agents", "a,b", "--witness", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "sat");
    let (pm, s) = witness(&path);
    validate_pseudo(&pm).unwrap();
    let f = parse_formula(text, None, None).unwrap().desugar();
    assert!(check_pseudo(&pm, s, &f).unwrap());
}

#[test]
fn invalid_formula_gets_a_countermodel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counter.json");
    let out = episteme(&["valid", "--formula", "p -> K a p", "--witness", path.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "invalid");
    let (pm, s) = witness(&path);
    let f = parse_formula("~(p -> K a p)", None, None).unwrap().desugar();
    assert!(check_pseudo(&pm, s, &f).unwrap());
}

#[test]
fn unsat_writes_no_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("none.json");
    let out = episteme(&["sat", "--formula", "p & ~p", "--witness", path.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "unsat");
    assert!(!path.exists());
}

#[test]
fn update_out_writes_a_loadable_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("after.json");
    let out = episteme(&[
        "update", "--model", &corpus("ex8.json"), "--event", &format!("{}:hack", corpus("hack.json")),
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let m = load_model(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m.len(), 4);
    assert_eq!(m.state_name(0), "sp@hack");
}

#[test]
fn trivial_map_leaves_the_model_alone() {
    let before = load_model(&std::fs::read_to_string(corpus("ex1.json")).unwrap()).unwrap();
    let out = episteme(&["update", "--model", &corpus("ex1.json"), "--action", "!map(a:{a})"]);
    let after = load_model(&stdout(&out)).unwrap();
    assert_eq!(after.to_json(), before.to_json());
}

#[test]
fn event_action_needs_a_known_event() {
    let out = episteme(&["update", "--model", &corpus("ex8.json"), "--event", &format!("{}:nope", corpus("hack.json"))]);
    assert_eq!(out.status.code(), Some(3));
    let out = episteme(&[
        "update", "--model", &corpus("ex8.json"), "--action", "hack.hack", "--events", &corpus("hack.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(load_model(&stdout(&out)).unwrap().len(), 4);
}

#[test]
fn lenient_loading_adds_the_reader_and_warns() {
    let out = episteme(&[
        "check", "--model", &corpus("ex8.json"), "--state", "sp", "--formula", "[lazy.e] K b p",
        "--events", &corpus("lazy.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn too_many_agents_hits_the_cap() {
    let out = episteme(&["sat", "--formula", "p", "--agents", "a,b,c,d,e"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unknown_event_model_is_semantic() {
    let out = episteme(&["reduce", "--formula", "[nope.e] p"]);
    assert_eq!(out.status.code(), Some(3));
    let out = episteme(&["check", "--model", &corpus("missing.json"), "--state", "s", "--formula", "p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn closure_header_counts_the_listing() {
    for (formula, agents) in [("p", "a,b"), ("D{a} p", "a"), ("{a} <= {b} & K a p", "a,b")] {
        let out = stdout(&episteme(&["closure", "--formula", formula, "--agents", agents]));
        let lines: Vec<&str> = out.lines().collect();
        let n: usize = lines[0].strip_suffix(" formulas").unwrap().parse().unwrap();
        assert_eq!(n, lines.len() - 1, "{formula}");
    }
}

#[test]
fn overlapping_blocks_are_a_document_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"agents":["a"],"states":["s","t"],"relations":{"a":[["s","t"],["t"]]},"valuation":{}}"#,
    )
    .unwrap();
    let out = episteme(&["check", "--model", path.to_str().unwrap(), "--state", "s", "--formula", "p"]);
    assert_eq!(out.status.code(), Some(2));
}
