use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use qmonoidal::fmatrix::suq2;
use qmonoidal::io::{matrix_to_string, parse_matrix};
use qmonoidal::FMatrix;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qmonoidal"));
    c.env_remove("QMONOIDAL_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, f: &FMatrix) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, matrix_to_string(f.matrix()).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_su_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "su02.json", &suq2(0.2));
    let out = run(&["classify-ao", "--input", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["sign"], -1);
    assert_eq!(r["result"]["trace"], 5.2);
    assert_eq!(r["result"]["qdim"], 5.2);
    assert_eq!(r["result"]["beta"], -0.192307692308);
    assert_eq!(r["passed"], true);
    assert_eq!(r["inputs_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn non_admissible_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", &FMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap());
    let out = run(&["classify-ao", "--input", s(&f)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotAoAdmissible"));
    assert_eq!(json(&out)["error"]["kind"], "NotAoAdmissible");

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"n\": 2, \"entries\": [[1]]}").unwrap();
    assert_eq!(run(&["classify-ao", "--input", s(&junk)]).status.code(), Some(3));
    assert_eq!(run(&["classify-ao", "--input", "/nonexistent.json"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["classify-ao"]).status.code(), Some(2));
    assert_eq!(run(&["verify-all", "--tol-check", "1e-12"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn companion_round_trip_and_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let comp = dir.path().join("comp4.json");
    let out = run(&["construct-companion", "--sign", "-1", "--trace", "5.2", "--n", "4", "--output", s(&comp)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&comp).unwrap();
    let m = parse_matrix(&text).unwrap();
    assert_eq!(matrix_to_string(&m).unwrap(), text);
    assert_eq!(parse_matrix(&matrix_to_string(&m).unwrap()).unwrap(), m);

    let su = write(dir.path(), "su02.json", &suq2(0.2));
    let r = json(&run(&["mon-equiv", "--variant", "ao", "--f1", s(&su), "--f2", s(&comp)]));
    assert_eq!(r["result"]["equivalent"], false);
    assert_eq!(r["result"]["monoidally_equivalent"], true);

    let r = json(&run(&["classify-ao", "--input", s(&comp)]));
    assert_eq!(r["result"]["trace"], 5.2);
    let out = run(&["construct-companion", "--sign", "-1", "--trace", "3.9", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn linking_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let su = write(dir.path(), "su02.json", &suq2(0.2));
    let comp = dir.path().join("comp4.json");
    run(&["construct-companion", "--sign", "-1", "--trace", "5.2", "--n", "4", "--output", s(&comp)]);
    let args = ["linking", "--f1", s(&su), "--f2", s(&comp), "--level", "2"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    let (a, b) = (json(&a), json(&b));
    for key in ["result", "residuals", "checks", "inputs_sha256"] {
        assert_eq!(serde_json::to_string(&a[key]).unwrap(), serde_json::to_string(&b[key]).unwrap(), "{key}");
    }
    assert_eq!(a["result"]["basis_sizes"]["aa"], 45);
    assert_eq!(a["result"]["multiplicities"]["a"]["mult"], 4);
    assert_eq!(a["result"]["multiplicities"]["a"]["mult_q"], 5.2);
    assert!(a["result"]["min_gram_eig"].as_f64().unwrap() > 0.0);

    let kms = json(&run(&["linking", "kms", "--f1", s(&su), "--f2", s(&comp), "--level", "2"]));
    assert!(kms["result"]["residuals"]["kms"].as_f64().unwrap() <= 1e-7);
    assert!(kms["result"].get("multiplicities").is_none());
}

#[test]
fn mismatched_linking_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let su = write(dir.path(), "su02.json", &suq2(0.2));
    let id = write(dir.path(), "id.json", &FMatrix::identity(2));
    let out = run(&["linking", "--f1", s(&su), "--f2", s(&id), "--level", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotMonoidallyEquivalent"));
}

#[test]
fn category_cache_hits_on_second_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let su = write(dir.path(), "su02.json", &suq2(0.2));
    let args = ["category", "--input", s(&su), "--level", "3", "--cache-dir", s(&cache)];
    let first = json(&run(&args));
    let second = json(&run(&args));
    assert_eq!(first["cache"], "miss");
    assert_eq!(second["cache"], "hit");
    assert_eq!(first["result"], second["result"]);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let dims: Vec<i64> =
        first["result"]["labels"].as_array().unwrap().iter().map(|l| l["dim"].as_i64().unwrap()).collect();
    assert_eq!(dims, vec![1, 2, 3, 4]);

    // the environment variable selects the same cache
    let out = bin().args(["category", "--input", s(&su), "--level", "3"]).env("QMONOIDAL_CACHE", &cache).output().unwrap();
    assert_eq!(json(&out)["cache"], "hit");
}

#[test]
fn au_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.json", &FMatrix::diagonal(&[2.0, 0.5]).unwrap());
    let r = json(&run(&["classify-au", "--input", s(&f)]));
    assert_eq!(r["result"]["qdim"], 4.25);
    let r = json(&run(&["category", "--variant", "au", "--input", s(&f), "--level", "2"]));
    let ab = r["result"]["labels"].as_array().unwrap().iter().find(|l| l["label"] == "ab").unwrap().clone();
    assert_eq!(ab["dim"], 3);
    let r = json(&run(&["linking", "multiplicities", "--variant", "au", "--f1", s(&f), "--f2", s(&f), "--level", "2"]));
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["multiplicities"]["a"]["mult_q"], 4.25);
}

#[test]
fn cocycle_with_seed_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let su = write(dir.path(), "su02.json", &suq2(0.2));
    let args = ["cocycle", "--f1", s(&su), "--f2", s(&su), "--level", "3", "--seed", "7"];
    let (a, b) = (json(&run(&args)), json(&run(&args)));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["residuals"], b["residuals"]);
    assert_eq!(a["passed"], true);
    assert_eq!(a["result"]["coboundary_equivalent"], true);
}

#[test]
fn verify_all_subset_and_text_output() {
    let out = run(&["verify-all", "--only", "1,2,4", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("[PASS] criterion").count(), 3);
    assert!(text.contains("passed: true"));
}
