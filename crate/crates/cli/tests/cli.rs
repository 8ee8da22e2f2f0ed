use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value as Json};
use tempfile::TempDir;

const MODEL: &str = r#"{
    "sorts": {"S": ["a", "b"]},
    "functions": {"f": {"args": ["S"], "result": "S", "table": {"a": "a", "b": "a"}}},
    "relations": {"R": {"args": ["S"], "values": {"a": "0", "b": "1/3"}}},
    "metrics": {"S": {"values": {"a,a": "0", "a,b": "1/2", "b,a": "1/2", "b,b": "0"}}}
}"#;

const HEADER: &str = "sort S\nrel R : S\nfunc f : S -> S\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contlogic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_result(out: &Output) -> Json {
    let report: Json = serde_json::from_slice(&out.stdout).expect("json report");
    report["result"].clone()
}

/// A relation over `carrier` with value `0` on `related` pairs and `1` elsewhere.
fn rel_json(carrier: &[&str], related: &[(&str, &str)]) -> Json {
    let mut rel = serde_json::Map::new();
    for a in carrier {
        for b in carrier {
            let v = if related.contains(&(*a, *b)) {
                "0"
            } else {
                "1"
            };
            rel.insert(format!("{a},{b}"), json!(v));
        }
    }
    Json::Object(rel)
}

fn per_json(carrier: &[&str], related: &[(&str, &str)]) -> Json {
    json!({ "carrier": carrier, "rel": rel_json(carrier, related) })
}

fn check_exit(theory_body: &str) -> Option<i32> {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", MODEL);
    let t = write(&dir, "t.theory", &format!("{HEADER}{theory_body}"));
    run(&["check", s(&m), s(&t)]).status.code()
}

#[test]
fn check_exit_codes() {
    assert_eq!(
        check_exit("top |- E x:S. R(x)\n[x:S, y:S] x = y |- y = x\n"),
        Some(0)
    );
    assert_eq!(check_exit("top |- A x:S. R(x)\n"), Some(1));
    assert_eq!(check_exit("top |- A x:T. R(x)\n"), Some(2));
}

#[test]
fn check_modes_agree_on_json_output() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", MODEL);
    let t = write(
        &dir,
        "t.theory",
        &format!("{HEADER}top |- E x:S. R(x)\ntop |- A x:S. R(x)\n"),
    );
    for mode in ["u", "cmt", "strict"] {
        let out = run(&["--format", "json", "check", s(&m), s(&t), "--mode", mode]);
        assert_eq!(out.status.code(), Some(1), "{mode}");
        let r = json_result(&out);
        assert_eq!(r["mode"], mode);
        assert_eq!(r["valid"], false);
        let valid: Vec<bool> = r["sequents"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v["valid"].as_bool().unwrap())
            .collect();
        assert_eq!(valid, [true, false], "{mode}");
    }
}

#[test]
fn zero_trials_is_a_usage_error() {
    assert_eq!(run(&["--trials", "0", "laws"]).status.code(), Some(2));
}

#[test]
fn laws_pass_and_mutations_fail() {
    assert_eq!(run(&["--trials", "10", "laws"]).status.code(), Some(0));
    let out = run(&[
        "--trials",
        "30",
        "--format",
        "json",
        "laws",
        "--mutate",
        "exists-as-sup",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_result(&out);
    assert_eq!(r["mutation"], "exists-as-sup");
    let failing: Vec<&str> = r["laws"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| !l["failures"].as_array().unwrap().is_empty())
        .map(|l| l["law"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"adjunction-exists"), "{failing:?}");
}

#[test]
fn negation_violates_at_one_and_half() {
    let out = run(&["--format", "json", "classify-connective", "1-x"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_result(&out);
    let v = &r["verdict"];
    assert_eq!(v["verdict"], "violates", "{v}");
    assert_eq!(v["p"], json!(["1/1"]));
    assert_eq!(v["q"], json!(["1/2"]));
    assert_eq!(r["demonstration"]["inputs_equivalent"], true);
    assert_eq!(r["demonstration"]["outputs_equivalent"], false);
}

#[test]
fn max_preserves_and_bad_expression_fails() {
    let r = json_result(&run(&[
        "--format",
        "json",
        "classify-connective",
        "max(x, y)",
    ]));
    assert_eq!(r["verdict"]["verdict"], "preserves");
    assert_eq!(run(&["classify-connective", "x +"]).status.code(), Some(2));
}

#[test]
fn per_commands() {
    let dir = TempDir::new().unwrap();
    let carrier = ["a", "b", "c"];
    let pairs = [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")];
    let per = per_json(&carrier, &pairs);
    let p = write(&dir, "p.json", &per.to_string());
    assert_eq!(run(&["per", "verify", s(&p)]).status.code(), Some(0));

    let sub = json!({ "object": per, "pred": { "a": "0", "b": "0", "c": "1" } });
    let phi = write(&dir, "phi.json", &sub.to_string());
    assert_eq!(run(&["per", "verify", s(&phi)]).status.code(), Some(0));
    let out = run(&["--format", "json", "per", "sub", s(&phi)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_result(&out);
    assert_eq!(r["mono"], true);

    let f = write(&dir, "f.json", &r["inclusion"].to_string());
    assert_eq!(run(&["per", "verify", s(&f)]).status.code(), Some(0));
    assert_eq!(run(&["per", "mono", s(&f)]).status.code(), Some(0));

    let mut e = per_json(&carrier, &pairs);
    e["rel"]["c,c"] = json!("0");
    let e_path = write(&dir, "e.json", &e.to_string());
    let out = run(&["--format", "json", "bridge", "g", s(&e_path)]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "an equivalence relation is not a metric"
    );

    let bad = write(
        &dir,
        "bad.json",
        &per_json(&["a", "b"], &[("a", "b")]).to_string(),
    );
    assert_eq!(run(&["per", "verify", s(&bad)]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["per", "verify", s(&missing)]).status.code(), Some(2));
}

#[test]
fn compose_with_identity_is_identity() {
    let dir = TempDir::new().unwrap();
    let carrier = ["a", "b", "c"];
    let e = per_json(&carrier, &[("a", "a"), ("b", "b"), ("c", "c")]);
    let e_path = write(&dir, "e.json", &e.to_string());
    let m = json_result(&run(&[
        "--format",
        "json",
        "bridge",
        "metric-from-per",
        s(&e_path),
    ]))["metric"]
        .clone();
    let m_path = write(&dir, "m.json", &m.to_string());
    let names: Vec<String> = m["carrier"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let table: serde_json::Map<String, Json> =
        names.iter().map(|n| (n.clone(), json!(n))).collect();
    let map = json!({ "domain": names, "codomain": names, "table": table });
    let map_path = write(&dir, "map.json", &map.to_string());
    let out = run(&[
        "--format",
        "json",
        "bridge",
        "g",
        s(&m_path),
        "--map",
        s(&map_path),
        "--target",
        s(&m_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let f = json_result(&out)["morphism"].clone();
    let f_path = write(&dir, "f.json", &f.to_string());

    let out = run(&["--format", "json", "per", "compose", s(&f_path), s(&f_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_result(&out)["composite"], f);

    let out = run(&["--format", "json", "bridge", "extract", s(&f_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_result(&out)["map"]["table"], map["table"]);
}

#[test]
fn bridge_g_and_product() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"carrier": ["a", "b"], "d": {"a,a": "0", "a,b": "0", "b,a": "0", "b,b": "0"}}"#,
    );
    let r = json_result(&run(&["--format", "json", "bridge", "g", s(&m)]));
    assert_eq!(r["object"]["rel"].as_object().unwrap().len(), 4);
    let out = run(&["--format", "json", "bridge", "product", s(&m), s(&m)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_result(&out)["metric"]["d"].as_object().unwrap().len(),
        16
    );
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let mut reports = Vec::new();
    for _ in 0..2 {
        let o = run(&[
            "--seed",
            "7",
            "--trials",
            "15",
            "--format",
            "json",
            "--out",
            s(&out),
            "laws",
        ]);
        assert_eq!(o.status.code(), Some(0));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
