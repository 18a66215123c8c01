use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gmnl::behavior::behavior_to_json;
use gmnl::targets::pr_box;
use gmnl::{Backend, Behavior, Scenario};
use serde_json::Value;

fn gmnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmnl")).args(args).env_remove("GMNL_FIXTURES_DIR").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let first = gmnl(&["reproduce", "t1-quantum", "--out", s(&a)]);
    let second = gmnl(&["reproduce", "t1-quantum", "--out", s(&b)]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(&a).unwrap(), first.stdout);
    let r = report(&first);
    assert_eq!(check(&r, "p_b0_given_y1")["value"], "1/4");
    assert!(r.get("wall_time_ms").is_none());
}

#[test]
fn timing_only_when_requested() {
    let r = report(&gmnl(&["reproduce", "t1-ghz", "--timing"]));
    assert!(r["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn every_reproduction_passes_in_both_backends() {
    for t in ["t1-quantum", "t1-ghz", "t2", "t3", "rabello-quantum"] {
        for backend in ["exact", "float"] {
            let out = gmnl(&["--backend", backend, "reproduce", t]);
            assert_eq!(out.status.code(), Some(0), "{t} {backend}: {}", String::from_utf8_lossy(&out.stdout));
            assert_eq!(report(&out)["backend"], backend);
        }
    }
}

#[test]
fn malformed_behavior_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"scenario\": {\"parties\": 2,\n \"settings\": [2, 2]}, \"entries\": 3}");
    let out = gmnl(&["check", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("schema") && err.contains("line"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_check_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pr.json", &behavior_to_json(&pr_box()));
    assert_eq!(gmnl(&["check", s(&f), "--checks", "magic"]).status.code(), Some(2));
}

#[test]
fn pr_box_scores_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pr.json", &behavior_to_json(&pr_box()));
    let out = gmnl(&["check", s(&f), "--checks", "validate,no-signaling,chsh,locality"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "chsh")["value"], "4");
    assert_eq!(check(&r, "locality")["value"], "nonlocal");
}

#[test]
fn uniform_behavior_is_certified_local() {
    let dir = tempfile::tempdir().unwrap();
    let u = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact);
    let f = write(dir.path(), "u.json", &behavior_to_json(&u));
    let out = gmnl(&["certify-local", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "local")["value"], "true");
    assert_eq!(r["data"]["certificate"]["kind"], "weights");
}

#[test]
fn certify_local_refuses_float_mode() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pr.json", &behavior_to_json(&pr_box()));
    assert_eq!(gmnl(&["--backend", "float", "certify-local", s(&f)]).status.code(), Some(2));
}

#[test]
fn trine_dilation_passes() {
    let out = gmnl(&["dilate", "--trine"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["outcomes"], 3);
    assert_eq!(r["backend"], "float");
}

#[test]
fn dilation_of_a_povm_file() {
    let dir = tempfile::tempdir().unwrap();
    // {|0><0|/2, |1><1|/2, 1/2}: not projective.
    let f = write(
        dir.path(),
        "p.json",
        r#"{"elements": [[[[0.5,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[0.5,0]]], [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#,
    );
    let out = gmnl(&["dilate", s(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let bad = write(dir.path(), "q.json", r#"{"elements": [[[[1,0]]], [[[0,0],[0,0]]]]}"#);
    assert_eq!(gmnl(&["dilate", s(&bad)]).status.code(), Some(2));
}

#[test]
fn boxless_network_with_constant_maps_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let net = r#"{
        "scenario": {"parties": 3, "settings": [2, 2, 2], "outcomes": [2, 2, 2]},
        "boxes": [],
        "outcomes": [
            [[{"constant": 1}], [{"constant": 0}]],
            [[{"constant": 0}], [{"constant": 0}]],
            [[{"constant": 1}], [{"constant": 1}]]
        ]
    }"#;
    let f = write(dir.path(), "net.json", net);
    let out = gmnl(&["boxnet", "evaluate", s(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let entries = report(&out)["data"]["behavior"]["entries"].as_array().unwrap().clone();
    assert_eq!(entries.len(), 64);
    assert!(entries.iter().all(|e| e == "0" || e == "1"));
    // One outcome per setting tuple.
    assert_eq!(entries.iter().filter(|e| *e == "1").count(), 8);
    // Outcome (1, 0, 1) at all-zero settings: index 1 + 4 = 5.
    assert_eq!(entries[5], "1");
}

#[test]
fn stored_fixtures_match_their_targets() {
    for which in ["t2", "t3"] {
        let out = gmnl(&["boxnet", "show-fixture", which]);
        assert_eq!(out.status.code(), Some(0), "{which}");
        assert!(report(&out)["data"]["note"].as_str().unwrap().starts_with("reconstruction"));
    }
}

#[test]
fn fixtures_dir_override_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let missing = gmnl(&["--fixtures-dir", s(dir.path()), "reproduce", "t2"]);
    assert_eq!(missing.status.code(), Some(2));
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/theorem2_network.json");
    std::fs::copy(src, dir.path().join("theorem2_network.json")).unwrap();
    assert_eq!(gmnl(&["--fixtures-dir", s(dir.path()), "reproduce", "t2"]).status.code(), Some(0));
}

#[test]
fn constrained_frontier_reports_the_true_optimum() {
    let out = gmnl(&["mixture-frontier"]);
    let r = report(&out);
    // The stored target itself satisfies the constraint, so the optimum is 4.
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(check(&r, "optimum")["value"], "4");
    assert_eq!(check(&r, "tsirelson_mixture")["passed"], true);
    assert_eq!(check(&r, "witness_rebuilt")["passed"], true);
    let free = gmnl(&["mixture-frontier", "--no-agreement"]);
    assert_eq!(free.status.code(), Some(0));
}

#[test]
fn builtin_strategy_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&gmnl(&["strategy", "t1-quantum"]));
    let f = write(dir.path(), "s.json", &r["data"]["strategy"].to_string());
    let out = gmnl(&["strategy", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["behavior"], r["data"]["behavior"]);
}

#[test]
fn digest_tracks_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pr.json", &behavior_to_json(&pr_box()));
    let a = report(&gmnl(&["check", s(&f)]));
    let b = report(&gmnl(&["check", s(&f)]));
    assert_eq!(a["inputs_digest"], b["inputs_digest"]);
    let u = Behavior::uniform(Scenario::bipartite_binary(), Backend::Exact);
    std::fs::write(&f, behavior_to_json(&u)).unwrap();
    let c = report(&gmnl(&["check", s(&f)]));
    assert_ne!(a["inputs_digest"], c["inputs_digest"]);
    assert_eq!(a["inputs_digest"].as_str().unwrap().len(), 64);
}
