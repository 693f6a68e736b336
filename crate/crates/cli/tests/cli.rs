//! End-to-end runs of the binary against the bundled golden inputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontosep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn strong_votes_is_separable_with_a_type_disjunction() {
    let file = testdata("votes.okb");
    let out = run(&["check", "--task", "strong", "--format", "json", file.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["status"], "separable");
    assert_eq!(json["task"], "strong");
    assert_eq!(json["separator"]["verified"], true);
    assert!(json["separator"]["text"].as_str().unwrap().contains("votes"));
}

#[test]
fn the_self_loop_kb_is_concept_inseparable() {
    let file = testdata("exm11.okb");
    let out = run(&["check", "--task", "weak-nonprojective", file.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("weak-nonprojective: inseparable"));
    assert!(stdout(&out).contains("no witness type at b"));
}

#[test]
fn all_three_votes_tasks_are_separable() {
    let out = run(&["check", testdata("votes.okb").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("== weak-projective: separable"));
    assert!(text.contains("== weak-nonprojective: separable"));
    assert!(text.contains("== strong: separable"));
}

#[test]
fn a_missing_input_is_a_usage_error() {
    let out = run(&["check", "--task", "all", "missing.okb"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn parse_errors_report_positions_on_stderr() {
    let file = testdata("broken.okb");
    let out = run(&["check", file.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("broken.okb:line 1"), "stderr was: {err}");
    assert!(err.contains("expected"), "stderr was: {err}");
}

#[test]
fn verification_accepts_the_label_separator_without_the_axiom() {
    let out = run(&[
        "verify",
        "--formula",
        testdata("person.concept").to_str().unwrap(),
        testdata("example44_k1.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("positive a: entailed"));
    assert!(text.contains("negative b: not entailed"));
    assert!(text.contains("separation holds"));
}

#[test]
fn verification_rejects_the_label_separator_under_the_axiom() {
    let out = run(&[
        "verify",
        "--formula",
        testdata("person.concept").to_str().unwrap(),
        testdata("example44_k2.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("negative b: ENTAILED"));
    assert!(stdout(&out).contains("separation fails"));
}

#[test]
fn the_trivial_concept_never_separates() {
    let out = run(&[
        "verify",
        "--formula",
        testdata("top.concept").to_str().unwrap(),
        testdata("votes.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("negative b: ENTAILED"));
}

#[test]
fn query_formulas_verify_in_weak_mode() {
    let out = run(&[
        "verify",
        "--formula",
        testdata("loop.ucq").to_str().unwrap(),
        testdata("exm11.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("separation holds"));

    let strong = run(&[
        "verify",
        "--mode",
        "strong",
        "--formula",
        testdata("loop.ucq").to_str().unwrap(),
        testdata("exm11.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&strong), 2);
    assert!(stderr(&strong).contains("concept formula"));
}

#[test]
fn strong_verification_checks_the_complement() {
    let out = run(&[
        "verify",
        "--mode",
        "strong",
        "--formula",
        testdata("votes_left.concept").to_str().unwrap(),
        testdata("votes.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("complement entailed"));

    let bare = run(&[
        "verify",
        "--mode",
        "strong",
        "--formula",
        testdata("votes_left.concept").to_str().unwrap(),
        testdata("votes_k1.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&bare), 1);
    assert!(stdout(&bare).contains("complement NOT entailed"));
}

#[test]
fn json_runs_agree_byte_for_byte_outside_the_time_field() {
    let file = testdata("example44_k2.okb");
    let args = ["check", "--format", "json", file.to_str().unwrap()];
    let strip = |out: &Output| -> String {
        stdout(out).lines().filter(|l| !l.contains("time_ms")).collect::<Vec<_>>().join("\n")
    };
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), code(&second));
    assert_eq!(strip(&first), strip(&second));
    assert!(!strip(&first).is_empty());
}

#[test]
fn tight_caps_exit_with_the_resource_code() {
    let file = testdata("votes.okb");
    let out = run(&["check", "--max-closure", "2", file.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("closure"));

    let starved = run(&["check", "--max-nodes", "1", file.to_str().unwrap()]);
    assert_eq!(code(&starved), 4);
    assert!(stderr(&starved).contains("budget"));
}

#[test]
fn the_oracle_subcommand_counts_bounded_models() {
    let out = run(&[
        "oracle",
        "--oracle-domain",
        "1",
        testdata("exm11.okb").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("models at domain bound 1: 1"), "stdout was: {text}");
    assert!(text.contains("complete sweep"));
    assert!(text.contains("kb_satisfiable = true"));

    let brute = run(&["oracle", testdata("votes_k1.okb").to_str().unwrap()]);
    assert_eq!(code(&brute), 0);
    assert!(stdout(&brute).contains("brute-force weak separability (empty ontology): true"));
}
