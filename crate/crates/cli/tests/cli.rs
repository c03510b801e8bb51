//! End-to-end tests driving the `clonelab` binary: exit codes, report text,
//! JSON shape, and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clonelab"))
        .args(args)
        .output()
        .expect("spawn clonelab")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn two() -> String {
    data("two.alg").display().to_string()
}

#[test]
fn close_lists_the_unary_clone_of_negation() {
    let out = run(&["close", "--file", &two(), "--gens", "NOT", "--arity", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("2 operations"), "{text}");
    assert!(text.contains("operation [0, 1]"), "{text}");
    assert!(text.contains("operation [1, 0]"), "{text}");
}

#[test]
fn pol_counts_the_monotone_binary_tables() {
    let out = run(&["pol", "--file", &two(), "--rels", "LEQ", "--arity", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("6 operations"), "{}", stdout(&out));
}

#[test]
fn inv_closes_equality_under_the_lattice_operations() {
    let out = run(&["inv", "--file", &two(), "--gens", "AND,OR", "--rel", "EQ"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("2 tuples"), "{text}");
    assert!(text.contains("tuple [0, 0]"), "{text}");
    assert!(text.contains("tuple [1, 1]"), "{text}");
}

#[test]
fn member_rejects_xor_and_prints_a_certificate() {
    let out = run(&["member", "--file", &two(), "--op", "XOR", "--gens", "AND,OR"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("certificate:"), "{text}");
    assert!(text.contains("\"fragment_size\":4"), "{text}");
}

#[test]
fn member_accepts_a_projection_from_any_generators() {
    let out = run(&["member", "--file", &two(), "--op", "P21", "--gens", "AND"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("RESULT: PASS"), "{}", stdout(&out));
}

#[test]
fn member_over_domains_uses_interpolation() {
    let doms = data("domains_yes.json").display().to_string();
    let out = run(&[
        "member", "--file", &two(), "--op", "XOR", "--gens", "AND,OR", "--domains", &doms,
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("2 domains tested"), "{}", stdout(&out));
}

#[test]
fn local_member_failure_names_the_domain() {
    let doms = data("domains.json").display().to_string();
    let out = run(&[
        "local-member", "--file", &two(), "--op", "XOR", "--gens", "AND,OR", "--domains", &doms,
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("domain 0 admits no interpolant"), "{text}");
    assert!(text.contains("\"domain_index\":0"), "{text}");
    assert!(text.contains("\"restriction\":[0,1,1,0]"), "{text}");
}

#[test]
fn exhausting_the_budget_exits_three() {
    let out = run(&[
        "close", "--file", &two(), "--gens", "AND,OR", "--arity", "2", "--budget", "2",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("budget"), "{}", stderr(&out));
}

#[test]
fn parse_errors_cite_the_offending_line() {
    let bad = data("bad.alg").display().to_string();
    let out = run(&["close", "--file", &bad, "--gens", "BAD", "--arity", "1"]);
    assert_eq!(code(&out), 2);
    let text = stderr(&out);
    assert!(text.contains("line 3"), "{text}");
    assert!(text.contains("outside universe"), "{text}");
}

#[test]
fn unknown_check_kinds_exit_two_and_list_the_choices() {
    let out = run(&["check", "no-such-kind"]);
    assert_eq!(code(&out), 2);
    let text = stderr(&out);
    assert!(text.contains("unknown check kind"), "{text}");
    assert!(text.contains("pol-inv"), "{text}");
}

#[test]
fn check_without_kind_or_file_is_a_usage_error() {
    let out = run(&["check"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("check directives"), "{}", stderr(&out));
}

#[test]
fn missing_required_flags_exit_two() {
    let out = run(&["pol", "--file", &two()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("clonelab"), "{}", stdout(&out));
}

#[test]
fn json_reports_are_machine_readable() {
    let out = run(&[
        "member", "--file", &two(), "--op", "XOR", "--gens", "AND,OR", "--json",
    ]);
    assert_eq!(code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(value["pass"], serde_json::json!(false));
    let certificate = &value["items"][0]["certificate"];
    assert_eq!(certificate["fragment_size"], serde_json::json!(4));
    assert_eq!(
        certificate["operation"]["entries"],
        serde_json::json!([0, 1, 1, 0])
    );
}

#[test]
fn named_generators_feed_the_pol_inv_battery() {
    let out = run(&[
        "check", "pol-inv", "--file", &two(), "--gens", "AND,OR,NOT", "--arity", "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("arity 1"), "{text}");
    assert!(text.contains("arity 2"), "{text}");
    assert!(text.contains("AND,OR,NOT"), "{text}");
}

#[test]
fn directive_files_run_their_batteries_in_order() {
    let suite = data("suite.alg").display().to_string();
    let out = run(&["check", "--file", &suite]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("finite-embed:"), "{text}");
    assert!(text.contains("compactness-witness:"), "{text}");
    assert!(text.contains("translation-lattice:"), "{text}");
    assert!(text.contains("20 trials"), "{text}");
    assert!(text.contains("RESULT: PASS (15 items)"), "{text}");
}

#[test]
fn reports_are_reproducible_for_a_fixed_seed() {
    let first = run(&["check", "finite-embed", "--seed", "11"]);
    let second = run(&["check", "finite-embed", "--seed", "11"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let first = run(&["check", "compactness-witness", "--seed", "9", "--trials", "40", "--json"]);
    let second = run(&["check", "compactness-witness", "--seed", "9", "--trials", "40", "--json"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn dot_export_writes_an_order_diagram() {
    let path = std::env::temp_dir().join(format!("clonelab-cli-test-{}.dot", std::process::id()));
    let out = run(&[
        "check",
        "antichain-join",
        "--dot",
        &path.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).expect("dot file written");
    let _ = std::fs::remove_file(&path);
    assert!(text.starts_with("digraph"), "{text}");
}
