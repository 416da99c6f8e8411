use std::path::PathBuf;
use std::process::{Command, Output};

use graded_tannaka::document::bundled_text;
use graded_tannaka::report::sha256_hex;
use serde_json::Value;

fn tannaka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tannaka")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("tannaka-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

fn bundled_json(name: &str) -> Value {
    serde_json::from_str(bundled_text(name).unwrap()).unwrap()
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "machine"]);
    let o = tannaka(&a);
    (code(&o), serde_json::from_slice(&o.stdout).expect("machine report is json"))
}

#[test]
fn bundled_documents_validate() {
    for name in ["point", "genus-1", "surface"] {
        assert_eq!(code(&tannaka(&["validate", name])), 0, "{name}");
    }
}

#[test]
fn broken_differential_is_reported_with_complex_and_degree() {
    let mut doc = bundled_json("point");
    let bad = serde_json::json!({
        "label": "bad",
        "terms": [{"degree": 0, "objects": ["1"]}, {"degree": 1, "objects": ["1"]}, {"degree": 2, "objects": ["1"]}],
        "diffs": [{"degree": 1, "blocks": [["1"]]}, {"degree": 2, "blocks": [["1"]]}]
    });
    doc["complexes"].as_array_mut().unwrap().push(bad);
    let p = scratch("bad.json", &doc.to_string());
    let o = tannaka(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("complex bad: d∘d is nonzero out of degree 2"), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_two() {
    let p = scratch("syntax.json", "{\"format_version\": 1,\n \"name\": }");
    let o = tannaka(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 10"));
    assert_eq!(code(&tannaka(&["validate", "/no/such/document.json"])), 2);
    assert_eq!(code(&tannaka(&["check", "point", "--suite", "nope"])), 2);
    assert_eq!(code(&tannaka(&["hom", "point", "1", "nope"])), 2);
}

#[test]
fn missing_nu_is_named() {
    let mut doc = bundled_json("surface");
    doc["motives"][0]["nu"][1] = Value::Null;
    let p = scratch("nonu.json", &doc.to_string());
    let o = tannaka(&["split", p.to_str().unwrap(), "surface"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("missing ν_1"), "{}", stdout(&o));
}

#[test]
fn hom_reports_bounds() {
    let (c, r) = machine(&["hom", "point", "1", "1"]);
    let h = &r["results"][0];
    assert_eq!(c, 0);
    assert!(h["certified"].as_u64().unwrap() >= 1);
    assert_eq!(h["ambient"], 1);
    assert_eq!(h["met"], true);

    let (c, r) = machine(&["hom", "point", "1", "cone(id_1)"]);
    assert_eq!(c, 0);
    assert_eq!((r["results"][0]["certified"].as_u64(), r["results"][0]["upper"].as_u64()), (Some(0), Some(0)));

    for (a, b, dim) in [("triv", "triv", 1), ("triv", "sign", 0), ("sign", "sign", 1)] {
        let (c, r) = machine(&["hom", "rep-z2", a, b]);
        assert_eq!(c, 0);
        assert_eq!(r["results"][0]["certified"], dim, "{a} {b}");
        assert_eq!(r["results"][0]["met"], true);
    }
}

#[test]
fn split_counts_projectors() {
    for (name, n) in [("point", 1), ("genus-1", 3)] {
        let (c, r) = machine(&["split", name]);
        assert_eq!(c, 0, "{name}");
        assert_eq!(r["results"][0]["projectors"].as_array().unwrap().len(), n);
        assert_eq!(r["results"][0]["degree projectors"], true);
    }
}

#[test]
fn check_suite_passes_on_point() {
    let o = tannaka(&["check", "point", "--suite", "kunneth"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[pass] 1 ⊗ 1"));
}

#[test]
fn machine_report_hash_covers_everything_before_it() {
    let (_, mut r) = machine(&["fiber", "genus-1"]);
    let m = r.as_object_mut().unwrap();
    let hash = m.remove("determinism_hash").unwrap();
    assert_eq!(m.keys().next_back().map(String::as_str), Some("status"));
    assert_eq!(hash, sha256_hex(serde_json::to_string(&m).unwrap().as_bytes()));
}

#[test]
fn reports_replay_and_tampering_is_caught() {
    let o = tannaka(&["hom", "genus-1", "L", "X", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let p = scratch("report.json", &text);
    let r = tannaka(&["replay", "genus-1", p.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    // a report is itself a document
    assert_eq!(code(&tannaka(&["replay", p.to_str().unwrap()])), 0);

    let mut v: Value = serde_json::from_str(&text).unwrap();
    let roots = v["certificates"]["roots"].as_array_mut().unwrap();
    assert!(!roots.is_empty());
    roots[0]["matrix"][0]["rows"][0][0] = Value::from("7");
    let q = scratch("tampered.json", &v.to_string());
    let r = tannaka(&["replay", "genus-1", q.to_str().unwrap()]);
    assert_eq!(code(&r), 1, "{}", stdout(&r));
}
