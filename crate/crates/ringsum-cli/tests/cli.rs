//! End-to-end tests of the `ringsum` binary: JSON shapes, frozen values,
//! exit codes, and determinism across thread counts.

use std::process::{Command, Output};

fn ringsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringsum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every stdout line is JSON"))
        .collect()
}

fn single_json(out: &Output) -> serde_json::Value {
    let lines = stdout_json_lines(out);
    assert_eq!(lines.len(), 1, "expected exactly one JSON object");
    lines.into_iter().next().unwrap()
}

#[test]
fn sum_all_methods_agree_on_zmod6() {
    let out = ringsum(&["sum", "--ring", "zmod:6", "--k", "1", "--method", "all"]);
    assert!(out.status.success());
    let v = single_json(&out);
    assert_eq!(v["ring"], "zmod:6");
    assert_eq!(v["k"], 1);
    assert_eq!(v["order"], 6);
    assert_eq!(v["methods"]["composed"]["case"], "v");
    assert_eq!(v["methods"]["composed"]["value"], "-3");
    assert_eq!(v["methods"]["composed"]["element"]["coords"]["1"], 3);
    assert_eq!(v["methods"]["brute"]["element"]["pretty"], "3");
    assert_eq!(v["agreement"]["composed_equals_brute"], true);
    assert_eq!(v["agreement"]["paper_equals_composed"], true);
}

#[test]
fn sum_shows_the_quadratic_table_misprint() {
    let out = ringsum(&["sum", "--ring", "quad:10:1:1", "--k", "24", "--method", "all"]);
    assert!(out.status.success(), "table disagreement is not a failure");
    let v = single_json(&out);
    assert_eq!(v["methods"]["composed"]["value"], "1");
    assert_eq!(v["methods"]["paper"]["value"], "5");
    assert_eq!(v["methods"]["paper"]["case"], "table-n/2");
    assert_eq!(v["agreement"]["composed_equals_brute"], true);
    assert_eq!(v["agreement"]["paper_equals_composed"], false);
}

#[test]
fn sum_spec_round_trips_canonically() {
    let out = ringsum(&["sum", "--ring", "gf:4", "--k", "3", "--method", "composed"]);
    let v = single_json(&out);
    assert_eq!(v["ring"], "gf:2^2");
    assert_eq!(v["methods"]["composed"]["value"], "-1");
}

#[test]
fn sum_brute_handles_rings_without_closed_forms() {
    let out = ringsum(&[
        "sum",
        "--ring",
        "mvq:3:x,y:x^2=2+2*y^2;y^2=1+x",
        "--k",
        "80",
        "--method",
        "brute",
    ]);
    assert!(out.status.success());
    let v = single_json(&out);
    assert_eq!(v["methods"]["brute"]["element"]["coords"]["1"], 2);
    assert_eq!(v["methods"]["brute"]["element"]["coords"]["x*y"], 0);
    assert_eq!(v["methods"]["brute"]["element"]["pretty"], "2");
}

#[test]
fn sum_nilpotent_case_renders_the_located_element() {
    let out = ringsum(&[
        "sum",
        "--ring",
        "product:(quad:2:0:0)x(zmod:3)",
        "--k",
        "3",
        "--method",
        "all",
    ]);
    let v = single_json(&out);
    assert_eq!(v["methods"]["composed"]["case"], "iv");
    assert_eq!(v["methods"]["composed"]["value"], "u");
    assert_eq!(v["methods"]["composed"]["element"]["pretty"], "f0.x");
    assert_eq!(v["agreement"]["composed_equals_brute"], true);
}

#[test]
fn exit_codes_for_bad_input_unsupported_and_resource() {
    // parse error -> 2
    let out = ringsum(&["sum", "--ring", "zmod:", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // k = 0 -> 2
    let out = ringsum(&["sum", "--ring", "zmod:6", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // no closed form -> 3
    let out = ringsum(&["sum", "--ring", "noncommp3:3", "--k", "2", "--method", "composed"]);
    assert_eq!(out.status.code(), Some(3));
    let out = ringsum(&["sum", "--ring", "matrix:2:(zmod:6)", "--k", "2", "--method", "composed"]);
    assert_eq!(out.status.code(), Some(3));
    // enumeration budget -> 4
    let out = ringsum(&["sum", "--ring", "zmod:100", "--k", "2", "--method", "brute", "--max-elements", "10"]);
    assert_eq!(out.status.code(), Some(4));
    // classify of a non-prime-power ring -> 3
    let out = ringsum(&["classify", "--ring", "zmod:6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn max_elements_env_var_is_honored_and_flag_wins() {
    let out = Command::new(env!("CARGO_BIN_EXE_ringsum"))
        .args(["sum", "--ring", "zmod:100", "--k", "2", "--method", "brute"])
        .env("RINGSUM_MAX_ELEMENTS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "env budget should refuse");
    let out = Command::new(env!("CARGO_BIN_EXE_ringsum"))
        .args([
            "sum", "--ring", "zmod:100", "--k", "2", "--method", "brute",
            "--max-elements", "1000",
        ])
        .env("RINGSUM_MAX_ELEMENTS", "10")
        .output()
        .unwrap();
    assert!(out.status.success(), "flag must override the environment");
}

#[test]
fn classify_reports_the_structure_class() {
    let v = single_json(&ringsum(&["classify", "--ring", "quad:2:0:0"]));
    assert_eq!(v["class"]["kind"], "f2x2");
    assert_eq!(v["order"], 4);
    let v = single_json(&ringsum(&["classify", "--ring", "gf:9"]));
    assert_eq!(v["class"]["kind"], "field");
    assert_eq!(v["class"]["p"], 3);
    assert_eq!(v["class"]["s"], 2);
    let v = single_json(&ringsum(&["classify", "--ring", "mvq:3:x,y:x^2=2+2*y^2;y^2=1+x"]));
    assert_eq!(v["class"]["kind"], "field");
    assert_eq!(v["order"], 81);
    let v = single_json(&ringsum(&["classify", "--ring", "noncommp3:3"]));
    assert_eq!(v["class"]["kind"], "other-prime-power");
    assert_eq!(v["commutative"], false);
}

#[test]
fn irreducible_frozen_examples() {
    let v = single_json(&ringsum(&["irreducible", "--p", "2", "--poly", "x^3+x+1"]));
    assert_eq!(v["irreducible"], true);
    let v = single_json(&ringsum(&["irreducible", "--p", "2", "--poly", "x^3+1"]));
    assert_eq!(v["irreducible"], false);
    let out = ringsum(&["irreducible", "--p", "4", "--poly", "x^2+x+1"]);
    assert_eq!(out.status.code(), Some(2), "p must be prime");
}

#[test]
fn maximal_emits_exactly_the_pinned_shape() {
    let out = ringsum(&[
        "maximal", "--p", "3", "--vars", "x,y",
        "--rule", "x^2=2+2*y^2", "--rule", "y^2=1+x",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.trim(), r#"{"maximal":true,"coords":[2,0,0,0]}"#);

    let v = single_json(&ringsum(&["maximal", "--p", "2", "--vars", "x", "--rule", "x^2=x"]));
    assert_eq!(v["maximal"], false);
    let v = single_json(&ringsum(&["maximal", "--p", "3", "--vars", "x", "--rule", "x^2=0"]));
    assert_eq!(v["maximal"], false);
}

#[test]
fn selfpower_minus_one_prints_five_ascending_lines() {
    let out = ringsum(&["search", "selfpower", "--target", "-1", "--max", "100000"]);
    assert!(out.status.success());
    let lines = stdout_json_lines(&out);
    assert_eq!(lines.len(), 5);
    let ms: Vec<u64> = lines.iter().map(|v| v["m"].as_u64().unwrap()).collect();
    assert_eq!(ms, vec![1, 2, 12, 32400, 71280]);
    assert_eq!(lines[4]["fields"], serde_json::json!([16, 81, 5, 11]));
    assert_eq!(lines[0]["degenerate"], true);
}

#[test]
fn selfpower_plus_one_frozen_list() {
    let out = ringsum(&["search", "selfpower", "--target", "+1", "--max", "10000"]);
    let lines = stdout_json_lines(&out);
    let ms: Vec<u64> = lines.iter().map(|v| v["m"].as_u64().unwrap()).collect();
    assert_eq!(ms, vec![1, 2, 6, 42, 720, 1806]);
    let out = ringsum(&["search", "selfpower", "--target", "7", "--max", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selfpower_output_is_independent_of_thread_count() {
    let one = ringsum(&["--jobs", "1", "search", "selfpower", "--target", "+1", "--max", "10000"]);
    let four = ringsum(&["--jobs", "4", "search", "selfpower", "--target", "+1", "--max", "10000"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn giuga_check_and_sweep() {
    let v = single_json(&ringsum(&["search", "giuga", "--check", "1729"]));
    assert_eq!(v["verdict"], "rejected");
    assert_eq!(v["p"], 7);
    assert_eq!(v["condition"], "iii");
    assert_eq!(v["observed"], 14);
    assert_eq!(v["required"], 7);

    let out = ringsum(&["search", "giuga", "--max", "100000"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "no candidates expected");

    let out = ringsum(&["search", "giuga"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_zmod_lists_known_discrepancies_and_exits_zero() {
    let out = ringsum(&["verify", "zmod"]);
    assert!(out.status.success(), "printed-table rows are expected, not failures");
    let lines = stdout_json_lines(&out);
    let row = lines
        .iter()
        .find(|v| v["ring"] == "zmod:8" && v["k"] == 3)
        .expect("zmod:8 k=3 row");
    assert_eq!(row["paper"]["value"], "-4");
    assert_eq!(row["composed"]["value"], "0");
    assert_eq!(row["paper_equals_oracle"], false);
    assert_eq!(row["composed_equals_oracle"], true);
    let summary = lines.last().unwrap();
    assert_eq!(summary["family"], "zmod");
    assert_eq!(summary["composed_vs_oracle"], "ok");
    assert!(summary["discrepancies"].as_u64().unwrap() >= 2);
}

#[test]
fn verify_rejects_unknown_family() {
    let out = ringsum(&["verify", "frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
