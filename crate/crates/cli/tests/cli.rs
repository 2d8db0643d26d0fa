use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cech::fixtures::sphere_spliced_pair;
use cech_cli::report::Report;
use cech_cli::scene::{SceneBuilder, SceneDocument};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn scenes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn scene(name: &str) -> String {
    scenes().join(name).to_str().unwrap().to_owned()
}

fn cech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cech")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn verdicts(v: &Value) -> Vec<(String, String)> {
    v["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["claim"].as_str().unwrap().to_owned(), c["verdict"].as_str().unwrap().to_owned()))
        .collect()
}

/// The staged scene on the 2-sphere, regenerated from the fixtures.
fn sphere_staged() -> SceneDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pair = sphere_spliced_pair(&mut rng, 0);
    let nerve = pair.lower.kernel.nerve().clone();
    let mut b = SceneBuilder::new(&nerve);
    b.sequence("lower", ["L", "A", "K", "lower_inclusion", "lower_projection"], &pair.lower)
        .sequence("upper", ["K", "B", "N", "upper_inclusion", "upper_projection"], &pair.upper)
        .extension("spliced", "lower", "upper");
    let mut point = cech::cech::Cochain::zero(&pair.upper.quotient, 0);
    let s = nerve.simplices(0)[0].clone();
    let g = pair.upper.quotient.group(&s).unwrap();
    point.set_value(&pair.upper.quotient, &s, g.generator(0)).unwrap();
    b.cochain("point", "N", &point);
    b.finish()
}

#[test]
fn sphere_staged_scene_is_current() {
    let path = scenes().join("sphere_staged.json");
    let mut fresh = serde_json::to_string_pretty(&sphere_staged()).unwrap();
    fresh.push('\n');
    if std::env::var_os("UPDATE_SCENES").is_some() {
        std::fs::write(&path, &fresh).unwrap();
    }
    let on_disk = std::fs::read_to_string(&path).expect("run with UPDATE_SCENES=1 to create it");
    assert_eq!(on_disk, fresh);
}

#[test]
fn single_open_has_no_first_cohomology() {
    let out = cech(&["cohomology", "--scene", &scene("single_open.json"), "--sheaf", "Z2", "--degree", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["group"], "0");
    assert_eq!(v["outcome"], "verified");
}

#[test]
fn single_open_degree_zero_is_the_group() {
    let out = cech(&["cohomology", "--scene", &scene("single_open.json"), "--sheaf", "Z2", "--degree", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["group"], "Z/2");
}

#[test]
fn broken_restriction_is_located() {
    let out = cech(&["validate", "--scene", &scene("broken_restriction.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["result"]["sheaves"]["F"]["valid"], false);
    let issue = v["result"]["sheaves"]["F"]["issues"][0].as_str().unwrap();
    assert!(issue.contains("{U} -> {U,V}"), "{issue}");
}

#[test]
fn malformed_scenes_exit_two_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{ \"format_version\": \"1\", ", "line"),
        ("version.json", "{ \"format_version\": \"9\" }", "format_version"),
        (
            "unknown_open.json",
            r#"{ "format_version": "1", "cover": { "opens": ["U"], "intersections": [["U", "W"]] } }"#,
            "W",
        ),
        (
            "bad_int.json",
            r#"{ "format_version": "1", "cover": { "opens": ["U"] }, "sheaves": { "F": { "constant": { "generators": "x" } } } }"#,
            "sheaves.F",
        ),
    ];
    for (name, text, needle) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = cech(&["validate", "--scene", path.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{name}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(needle), "{name}: {err}");
        assert!(out.stdout.is_empty());
    }
    let out = cech(&["cohomology", "--scene", &scene("circle.json"), "--sheaf", "Q", "--degree", "1"]);
    assert_eq!(code(&out), 2);
    let out = cech(&["connect", "--scene", &scene("circle.json"), "--seq", "mayer_vietoris", "--cocycle", "loop"]);
    assert_eq!(code(&out), 2, "cocycle on the wrong sheaf");
}

#[test]
fn circle_boundary_hits_the_loop() {
    let out = cech(&["connect", "--scene", &scene("circle.json"), "--seq", "mayer_vietoris", "--cocycle", "point"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(
        verdicts(&v),
        [
            ("cocycle", "verified"),
            ("cocycle", "verified"),
            ("class-nontrivial-in-window", "verified"),
            ("independence", "verified"),
        ]
        .map(|(a, b)| (a.to_owned(), b.to_owned()))
    );
    let h1 = cech(&["cohomology", "--scene", &scene("circle.json"), "--sheaf", "L", "--degree", "1"]);
    assert_eq!(json(&h1)["result"]["group"], "Z");
}

#[test]
fn non_cocycle_input_is_refuted() {
    let out = cech(&["cohomology", "--scene", &scene("circle.json"), "--sheaf", "M", "--degree", "0", "--cocycle", "not_a_cocycle"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(verdicts(&v)[0], ("cocycle".to_owned(), "refuted".to_owned()));
    assert_eq!(v["certificates"][0]["evidence"]["kind"], "boundary");
}

#[test]
fn staged_connect_on_the_sphere() {
    let out = cech(&["staged-connect", "--scene", &scene("sphere_staged.json"), "--ext", "spliced", "--cocycle", "point"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let kinds: Vec<String> = verdicts(&v).into_iter().map(|(k, _)| k).collect();
    assert_eq!(kinds, ["cocycle", "cocycle", "class-nontrivial-in-window", "independence"]);
    assert_eq!(v["result"]["input_degree"], "0");
}

#[test]
fn descent_on_the_sphere() {
    let out = cech(&["descent-check", "--scene", &scene("sphere_descent.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let subjects: Vec<&str> = v["certificates"].as_array().unwrap().iter().map(|c| c["subject"].as_str().unwrap()).collect();
    assert!(subjects.iter().any(|s| s.starts_with("twisted: class of the gerbe")));
    let twisted = v["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["subject"] == "twisted: class of the gerbe in H^2(Z)")
        .unwrap();
    assert_eq!(twisted["claim"], "class-nontrivial-in-window");

    let only = cech(&["descent-check", "--scene", &scene("sphere_descent.json"), "--datum", "mod_two"]);
    assert_eq!(code(&only), 0);
    let v = json(&only);
    assert!(v["result"].get("twisted").is_none());
    for c in v["result"]["mod_two"]["transition_cocycle"].as_array().unwrap() {
        let x = c["value"][0].as_str().unwrap();
        assert!(x == "0" || x == "1", "reduced mod 2: {x}");
    }
}

#[test]
fn lci_glues_chartwise_equations() {
    let out = cech(&["lci", "--scene", &scene("lci.json"), "--data", "chartwise_equations"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["scene"].is_object());
    assert!(v["certificates"].as_array().unwrap().iter().all(|c| c["window"].is_object()));
    let same = cech(&["lci", "--scene", &scene("lci.json"), "--data", "same_equations"]);
    assert_eq!(code(&same), 0);
}

#[test]
fn verify_confirms_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = cech(&[
        "--output",
        report.to_str().unwrap(),
        "connect",
        "--scene",
        &scene("circle.json"),
        "--seq",
        "mayer_vietoris",
        "--cocycle",
        "point",
    ]);
    assert_eq!(code(&out), 0);
    let ok = cech(&["verify", "--certificates", report.to_str().unwrap(), "--scene", &scene("circle.json")]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["result"]["checked"], "4");

    let without_scene = cech(&["verify", "--certificates", report.to_str().unwrap()]);
    assert_eq!(code(&without_scene), 2);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["certificates"][2]["claim"] = "class-trivial".into();
    let forged = dir.path().join("forged.json");
    std::fs::write(&forged, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let bad = cech(&["verify", "--certificates", forged.to_str().unwrap(), "--scene", &scene("circle.json")]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["result"]["certificates"][2]["status"], "mismatch");

    let single = dir.path().join("single.json");
    std::fs::write(&single, serde_json::to_string(&v["certificates"][0]).unwrap()).unwrap();
    let one = cech(&["verify", "--certificates", single.to_str().unwrap(), "--scene", &scene("circle.json")]);
    assert_eq!(code(&one), 0);

    let other = cech(&["verify", "--certificates", report.to_str().unwrap(), "--scene", &scene("single_open.json")]);
    assert_ne!(code(&other), 0, "certificates bound to another scene");
}

fn every_run() -> Vec<Vec<String>> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        s(&["nerve", "--scene", &scene("sphere_descent.json")]),
        s(&["validate", "--scene", &scene("circle.json")]),
        s(&["validate", "--scene", &scene("broken_restriction.json")]),
        s(&["cohomology", "--scene", &scene("circle.json"), "--sheaf", "L", "--degree", "1", "--cocycle", "loop"]),
        s(&["connect", "--scene", &scene("circle.json"), "--seq", "mayer_vietoris", "--cocycle", "point"]),
        s(&["staged-connect", "--scene", &scene("sphere_staged.json"), "--ext", "spliced", "--cocycle", "point"]),
        s(&["descent-check", "--scene", &scene("sphere_descent.json")]),
        s(&["lci", "--scene", &scene("lci.json"), "--data", "chartwise_equations"]),
    ]
}

#[test]
fn output_is_deterministic_and_round_trips() {
    for args in every_run() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cech(&args);
        assert!(!first.stdout.is_empty(), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        let second = cech(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let text = String::from_utf8(first.stdout).expect("utf-8");
        let report: Report = serde_json::from_str(&text).expect("parses as a report");
        assert_eq!(report.render(), text, "{args:?}");
        if let Some(doc) = &report.scene {
            let again: SceneDocument = serde_json::from_str(&serde_json::to_string(doc).unwrap()).unwrap();
            assert_eq!(&again, doc);
        }
    }
}

#[test]
fn integers_are_strings() {
    fn walk(v: &Value, path: &str) {
        match v {
            Value::Number(n) => panic!("number {n} at {path}"),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(x, &format!("{path}[{i}]"))),
            Value::Object(o) => o.iter().for_each(|(k, x)| walk(x, &format!("{path}.{k}"))),
            _ => {}
        }
    }
    for args in every_run() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        walk(&json(&cech(&args)), args[0]);
    }
}

#[test]
fn key_order_is_fixed() {
    let v = json(&cech(&["nerve", "--scene", &scene("circle.json")]));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["format_version", "command", "inputs_digest", "outcome", "result", "certificates"]);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["nerve", "--scene", &scene("circle.json")];
    let stdout = cech(&args).stdout;
    let mut with_file = vec!["--output", path.to_str().unwrap()];
    with_file.extend(args);
    let out = cech(&with_file);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn p2_demo_refutes_nontriviality_and_reverifies() {
    let out = cech(&["p2-demo"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(
        verdicts(&v),
        [
            ("cocycle", "verified"),
            ("class-nontrivial-in-window", "refuted"),
            ("cocycle", "verified"),
            ("class-nontrivial-in-window", "refuted"),
        ]
        .map(|(a, b)| (a.to_owned(), b.to_owned()))
    );
    assert_eq!(v["certificates"][1]["evidence"]["kind"], "coboundary");
    assert!(v["certificates"].as_array().unwrap().iter().all(|c| c["window"]["points"].as_array().unwrap().len() == 7));
    assert_eq!(v["result"]["obstruction"]["group"], "0");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p2.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let check = cech(&["verify", "--certificates", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    assert_eq!(json(&check)["result"]["checked"], "4");
    assert_eq!(cech(&["p2-demo"]).stdout, out.stdout);
}

#[test]
fn injected_lifts_change_the_cocycle_not_the_class() {
    let default = json(&cech(&["connect", "--scene", &scene("circle.json"), "--seq", "mayer_vietoris", "--cocycle", "point"]));
    let out = cech(&[
        "connect", "--scene", &scene("circle.json"), "--seq", "mayer_vietoris", "--cocycle", "point", "--lifts", "through_a",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_ne!(v["result"]["cocycle"], default["result"]["cocycle"]);
    assert_eq!(v["result"]["transcript"][0]["source"], "choice");
    assert_eq!(v["result"]["cocycle"][0]["value"][0], "-1");
    assert_eq!(v["certificates"][2]["claim"], "class-nontrivial-in-window");

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(scene("circle.json")).unwrap()).unwrap();
    doc["lifts"]["through_a"]["entries"][0]["lift"] = serde_json::json!(["1", "1"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad_lift.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let bad = cech(&["connect", "--scene", path.to_str().unwrap(), "--seq", "mayer_vietoris", "--cocycle", "point", "--lifts", "through_a"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8(bad.stderr).unwrap().contains("lifts.through_a"));
}
