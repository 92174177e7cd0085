//! End-to-end tests of the `hamloc` binary: output texts, JSON documents,
//! and the exit-code contract (0 pass, 1 verified failure, 2 bad input).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hamloc::synthetic::degenerate_n4;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hamloc")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin()).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn gen_validate_betti_and_find_class_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gen", "cpn", "--weights", "0,1,2", "--with-model"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "wrote cp2.json\nwrote cp2.model.json\n");

    let out = run_in(dir.path(), &["validate", "cp2.json", "--model", "cp2.model.json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).ends_with("verdict: pass\n"));

    let out = run_in(dir.path(), &["betti", "cp2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "[1, 1, 1]\n");

    let out = run_in(
        dir.path(),
        &["find-class", "cp2.json", "--model", "cp2.model.json", "--degree", "2", "--vanish", "e1"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "degree: 2\nrestrictions: e0 = 1, e1 = 0, e2 = -1\n");

    let out = run_in(
        dir.path(),
        &[
            "find-class",
            "cp2.json",
            "--model",
            "cp2.model.json",
            "--degree",
            "2",
            "--vanish",
            "e0",
            "--vanish",
            "e1",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("no vanishing class"));
}

#[test]
fn integrate_renders_the_documented_string() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["gen", "cpn", "--weights", "0,1,2"]);
    std::fs::write(
        dir.path().join("alpha_sq.json"),
        "{\"degree\": 4, \"restrictions\": {\"e0\": 1, \"e1\": 0, \"e2\": 1}}\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["integrate", "cp2.json", "--class", "alpha_sq.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1 * u^0\n");

    let json = run_in(
        dir.path(),
        &["integrate", "cp2.json", "--class", "alpha_sq.json", "--format", "json"],
    );
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["scalar"], serde_json::json!(1));
    assert_eq!(value["u_exponent"], serde_json::json!(0));
}

#[test]
fn corruptions_are_caught_with_named_identities() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["gen", "cpn", "--weights", "0,1,2"]);

    let out = run_in(
        dir.path(),
        &["gen", "corrupt", "--data", "cp2.json", "--weight", "e0:1:3", "--out", "badweight"],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run_in(dir.path(), &["validate", "badweight.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("moment identity at e = 0: residual -1/6"));

    let out = run_in(
        dir.path(),
        &["gen", "corrupt", "--data", "cp2.json", "--moment", "e1:5/2", "--out", "badmoment"],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run_in(dir.path(), &["validate", "badmoment.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not index-increasing: H(e1) >= H(e2)"));

    let out = run_in(
        dir.path(),
        &["gen", "corrupt", "--data", "cp2.json", "--identity", "--out", "same"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("same.json")).unwrap(),
        std::fs::read_to_string(dir.path().join("cp2.json")).unwrap(),
    );
}

#[test]
fn certify_exit_codes_follow_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["gen", "cpn", "--weights", "0,1,2,3", "--with-model"]);
    let out = run_in(dir.path(), &["certify", "cp3.json", "--model", "cp3.model.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: profile-unimodal"));

    let out = run_in(
        dir.path(),
        &["certify", "cp3.json", "--model", "cp3.model.json", "--mechanism"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: mechanism-verified"));

    let data = fixture("synthetic_n5.json");
    let model = fixture("synthetic_n5.model.json");
    let out = run_in(
        dir.path(),
        &["certify", data.to_str().unwrap(), "--model", model.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("verdict: inconsistent"));
    assert!(text.contains("separators: 7/4, 19/4"));
    assert!(text.contains("total: -45/16 * u^-1"));
}

#[test]
fn certify_refuses_degenerate_and_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (d, m) = degenerate_n4();
    std::fs::write(dir.path().join("deg.json"), d.to_json_string()).unwrap();
    std::fs::write(dir.path().join("deg.model.json"), m.to_json_string(&d).unwrap()).unwrap();
    let out = run_in(dir.path(), &["certify", "deg.json", "--model", "deg.model.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degenerate"));

    std::fs::write(dir.path().join("broken.json"), "{\"half_dim\": 2}").unwrap();
    let out = run_in(dir.path(), &["validate", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: "));

    let out = run_in(dir.path(), &["betti", "absent.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_in(dir.path(), &["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn product_generation_works_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["gen", "cpn", "--weights", "0,1,2", "--with-model"]);
    run_in(dir.path(), &["gen", "cpn", "--weights", "0,1", "--with-model", "--out", "cp1"]);
    let out = run_in(
        dir.path(),
        &[
            "gen",
            "product",
            "--left-data",
            "cp2.json",
            "--left-model",
            "cp2.model.json",
            "--right-data",
            "cp1.json",
            "--right-model",
            "cp1.model.json",
            "--with-model",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let out = run_in(dir.path(), &["betti", "product.json"]);
    assert_eq!(stdout(&out), "[1, 2, 2, 1]\n");
    let out =
        run_in(dir.path(), &["validate", "product.json", "--model", "product.model.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run_in(dir.path(), &["certify", "product.json", "--model", "product.model.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture("synthetic_n5.json");
    let model = fixture("synthetic_n5.model.json");
    let args = [
        "certify",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--format",
        "json",
    ];
    let first = run_in(dir.path(), &args);
    let second = run_in(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    let value: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(value["verdict"], serde_json::json!("inconsistent"));
    assert_eq!(value["separators"], serde_json::json!(["7/4", "19/4"]));
}
