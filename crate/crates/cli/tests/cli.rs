use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rbc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = rbc(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_line(s: &str) -> Value {
    serde_json::from_str(s.lines().last().expect("output")).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const SQUARE: &str = r#"{"dim": 2, "halfspaces": [
  {"normal": [1, 0], "offset": 1}, {"normal": [-1, 0], "offset": 1},
  {"normal": [0, 1], "offset": 1}, {"normal": [0, -1], "offset": 1}]}"#;

#[test]
fn bounds_examples() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_line(&ok(dir.path(), &["bounds", "--dim", "2", "--d", "2", "--l", "1", "--alpha", "1.5707963"]));
    assert_eq!(v["M"], 25);
    assert!((v["theta_min"].as_f64().unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-6);

    let v = json_line(&ok(dir.path(), &["bounds", "--qd", "--a", "0", "--w", "1"]));
    assert_eq!(v["M"], 6);
    let v = json_line(&ok(dir.path(), &["bounds", "--qd", "--a", "0.3", "--w", "1", "--aperture-detectable"]));
    assert_eq!(v["M"], 5);

    let v = json_line(&ok(dir.path(), &["--degrees", "bounds", "--dim", "2", "--d", "2", "--l", "1", "--alpha", "90"]));
    assert_eq!(v["M"], 25);
}

#[test]
fn errors_are_records_with_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let check = |args: &[&str], category: &str, code: i32| {
        let out = rbc(dir.path(), args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let v: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(v["error"]["category"], category);
    };
    check(&["bounds", "--dim", "2"], "usage", 2);
    check(&["place", "--dim", "3", "--phi", "0.5"], "usage", 2);
    check(&["metrics", "--polytope", "missing.json"], "io", 3);
    std::fs::write(dir.path().join("bad.json"), "{\"dim\": 2}").unwrap();
    check(&["metrics", "--polytope", "bad.json"], "format", 4);
    check(&["bounds", "--dim", "2", "--d", "1", "--l", "2", "--alpha", "1"], "domain", 5);
}

#[test]
fn geometry_formats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("square.json"), SQUARE).unwrap();

    let v = json_line(&ok(d, &["metrics", "--polytope", "square.json"]));
    assert!((v["diameter"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-12);
    let v = json_line(&ok(d, &["metrics", "--polytope", "square.json", "--d", "3", "--l", "1", "--alpha", "1.6"]));
    assert_eq!(v["member"], true);

    ok(d, &["place", "--dim", "2", "--count", "9", "--offset", "0.1", "--seed", "1", "--out", "dirs.json"]);
    ok(d, &["fingerprint", "--polytope", "square.json", "--directions", "dirs.json", "--x-o", "0.1,-0.2", "--cutoff", "10", "--out", "fp.json"]);
    let fp = read(d, "fp.json");
    assert!(d.join("fp.json.manifest.json").exists());

    // a fingerprint read back and written again is unchanged
    let v = json_line(&ok(d, &["reconstruct", "--fingerprint", "fp.json"]));
    assert_eq!(v["ambiguity"], "UNIQUE");
    std::fs::write(d.join("recon.json"), v["polytope"].to_string()).unwrap();
    let m = json_line(&ok(d, &["metrics", "--polytope", "recon.json"]));
    assert!((m["diameter"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-6);

    let parsed: rbc_core::fingerprint::FingerprintFile = serde_json::from_str(&fp).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string(&parsed).unwrap()), fp);

    let dirs = read(d, "dirs.json");
    let set = rbc_core::sphere::DirectionSet::from_json(&dirs).unwrap();
    assert_eq!(format!("{}\n", set.to_json().unwrap()), dirs);

    // reference by path, hits on the side
    let out = ok(d, &["fingerprint", "--polytope", "square.json", "--directions", "dirs.json", "--x-o", "0,0", "--cutoff", "10", "--ref-directions", "--hits", "2"]);
    let hits = json_line(&out);
    assert_eq!(hits["hits"]["facets_below"], serde_json::json!([]));
    let first: rbc_core::fingerprint::FingerprintFile = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert!(matches!(first.directions_ref, rbc_core::fingerprint::DirectionsRef::Path(_)));
}

#[test]
fn open_region_fingerprint_writes_inf() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("strip.json"),
        r#"{"dim": 2, "halfspaces": [{"normal": [0, 1], "offset": 1}, {"normal": [0, -1], "offset": 0}]}"#,
    )
    .unwrap();
    ok(d, &["place", "--dim", "2", "--count", "4", "--seed", "0", "--out", "dirs.json"]);
    let out = ok(d, &["fingerprint", "--polytope", "strip.json", "--directions", "dirs.json", "--x-o", "0,0.5", "--cutoff", "10"]);
    let v = json_line(&out);
    // angles π/2, π, 3π/2, 2π: the second and fourth run along the strip
    assert_eq!(v["t"][1], "inf");
    assert_eq!(v["t"][3], "inf");
    let f = rbc_core::fingerprint::Fingerprint::from_json(out.trim(), None).unwrap();
    assert!(f.distances[1].is_infinite());
}

#[test]
fn dataset_model_round_trip_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-qd", "--n-per-class", "30", "--M", "6", "--labels", "hexagon-vs-strip", "--seed", "4", "--out", "qd.jsonl"]);
    let text = read(d, "qd.jsonl");
    let data = rbc_core::qd::Dataset::read_jsonl(text.as_bytes()).unwrap();
    assert_eq!(data.len(), 60);
    let mut again = Vec::new();
    data.write_jsonl(&mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);

    let out = ok(d, &["train", "--data", "qd.jsonl", "--epochs", "20", "--seed", "3", "--model", "model.json", "--test-out", "test.jsonl", "--out", "train.json"]);
    assert_eq!(out.lines().count(), 20);
    let model = read(d, "model.json");
    let m = rbc_core::classify::MLPModel::from_json(&model).unwrap();
    assert_eq!(m.layer_sizes, vec![6, 128, 64, 32, 2]);
    assert_eq!(format!("{}\n", m.to_json().unwrap()), model);

    ok(d, &["eval", "--model", "model.json", "--data", "test.jsonl", "--out", "eval.json"]);
    let eval: Value = serde_json::from_str(&read(d, "eval.json")).unwrap();
    let train: Value = serde_json::from_str(&read(d, "train.json")).unwrap();
    assert_eq!(eval["accuracy"], train["mlp"]["accuracy"]);

    // replay reproduces every output byte for byte
    for manifest in ["qd.jsonl.manifest.json", "model.json.manifest.json", "eval.json.manifest.json"] {
        let out = rbc(d, &["replay", manifest]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json_line(&String::from_utf8(out.stdout).unwrap());
        assert!(v["outputs"].as_array().unwrap().iter().all(|o| o["identical"] == true), "{v}");
    }

    // a tampered output is reported
    std::fs::write(d.join("eval.json"), "{}\n").unwrap();
    let out = rbc(d, &["replay", "eval.json.manifest.json"]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |w: &'static str, out: &'static str| {
        vec!["--workers", w, "verify", "thm1", "--trials", "20", "--d", "2", "--l", "0.5", "--alpha", "1.0472", "--angle-bound", "at-least", "--seed", "5", "--out", out]
    };
    ok(d, &args("1", "a.json"));
    ok(d, &args("3", "b.json"));
    assert_eq!(read(d, "a.json"), read(d, "b.json"));
    let v: Value = serde_json::from_str(&read(d, "a.json")).unwrap();
    assert_eq!(v["passed"], true);

    ok(d, &["--workers", "1", "gen-qd", "--n-per-class", "10", "--M", "6", "--seed", "2", "--out", "x.jsonl"]);
    ok(d, &["--workers", "4", "gen-qd", "--n-per-class", "10", "--M", "6", "--seed", "2", "--out", "y.jsonl"]);
    assert_eq!(read(d, "x.jsonl"), read(d, "y.jsonl"));
}

#[test]
fn place_greedy_and_verify_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["place", "--dim", "3", "--phi", "0.5", "--seed", "2", "--probes", "20000", "--out", "p.json"]);
    let set = rbc_core::sphere::DirectionSet::from_json(&read(d, "p.json")).unwrap();
    assert!(set.min_pairwise_distance() > 0.5);
    assert_eq!(set.density_radius, Some(0.5));

    let v = json_line(&ok(d, &["verify", "qd", "--trials", "50", "--seed", "1"]));
    assert_eq!(v["check"], "qd");
    let v = json_line(&ok(d, &["verify", "thm2", "--dim", "3", "--trials", "3", "--d", "2", "--l", "1", "--alpha", "1.95", "--seed", "1"]));
    assert_eq!(v["passed"], true);
}
