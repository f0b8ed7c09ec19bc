//! End-to-end tests of the binary: exit codes, JSON shapes, determinism,
//! and the seed environment variable.

use std::process::{Command, Output};

use serde_json::Value;

fn run_with_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bihyp"));
    cmd.args(args).env_remove("BIHYP_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn bihyp(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const BALL_PRODUCT: &str = r#"{"product":{"dim":2,"parts":[
    {"ball":{"p":2,"r":1.0,"closed":true}},
    {"ball":{"p":2,"r":1.0,"closed":true}},
    {"ball":{"p":2,"r":1.0,"closed":true}},
    {"ball":{"p":2,"r":1.0,"closed":true}}]}}"#;

#[test]
fn mul_of_the_two_units_gives_the_third() {
    let out = bihyp(&["mul", "j1", "j2"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["canonical"], serde_json::json!([0.0, 0.0, 0.0, 1.0]));

    // Eight bare floats are two canonical quadruples; same bytes.
    let floats = bihyp(&["mul", "0", "1", "0", "0", "0", "0", "1", "0"]);
    assert_eq!(out.stdout, floats.stdout);
}

#[test]
fn inverting_an_idempotent_fails_cleanly() {
    let out = bihyp(&["inv", r#"{"idempotent":[1,0,0,0]}"#]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"{\"error\":\"NotInvertible\"}\n");
}

#[test]
fn coordinate_conversions_run_both_ways() {
    let canon = bihyp(&["canon", "1", "2", "3", "4"]);
    assert_eq!(code(&canon), 0);
    let doc = stdout_json(&canon);
    assert_eq!(doc["canonical"], serde_json::json!([1.0, 2.0, 3.0, 4.0]));
    assert_eq!(doc["text"], "1 + 2 j1 + 3 j2 + 4 j3");

    let idem = bihyp(&["idem", "1", "0", "0", "0"]);
    let doc = stdout_json(&idem);
    assert_eq!(doc["idempotent"], serde_json::json!([1.0, 1.0, 1.0, 1.0]));

    let back = bihyp(&["canon", "[1,1,1,1]"]);
    let doc = stdout_json(&back);
    assert_eq!(doc["canonical"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));

    let plain = bihyp(&["canon", "--format", "plain", "1", "2", "3", "4"]);
    assert_eq!(plain.stdout, b"1 + 2 j1 + 3 j2 + 4 j3\n");
}

#[test]
fn order_reports_the_componentwise_relation() {
    let out = bihyp(&["order", "0", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["relation"], "less");
    assert_eq!(doc["strict"], true);
    assert_eq!(doc["le"], true);
    assert_eq!(doc["lt"], true);
    assert_eq!(doc["ge"], false);

    let out = bihyp(&["order", "j1", "0"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["relation"], "incomparable");
    assert_eq!(doc["le"], false);
    assert_eq!(doc["ge"], false);
}

#[test]
fn gauge_routes_agree_on_a_ball_product() {
    let closed = bihyp(&["gauge", "--set", BALL_PRODUCT, "--point", "[0.3,0.4]"]);
    assert_eq!(code(&closed), 0);
    let doc = stdout_json(&closed);
    assert_eq!(doc["method"], "closed_form");
    assert_eq!(doc["value"], serde_json::json!([0.5, 0.5, 0.5, 0.5]));

    let oracle = bihyp(&[
        "gauge",
        "--set",
        BALL_PRODUCT,
        "--point",
        "[0.3,0.4]",
        "--method",
        "bisection",
    ]);
    let doc = stdout_json(&oracle);
    assert_eq!(doc["method"], "bisection");
    for v in doc["value"].as_array().expect("array") {
        assert!((v.as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn seminorm_eval_reads_module_elements() {
    let out = bihyp(&[
        "seminorm-eval",
        "--seminorm",
        r#"{"coordinate":{"kept":[0],"base":{"norms":[1,1,1,1]}}}"#,
        "--vector",
        r#"{"dim":1,"comps":[[2.0],[5.0],[1.0],[7.0]]}"#,
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], serde_json::json!([2.0, 0.0, 0.0, 0.0]));
}

#[test]
fn metric_computes_the_quarter_distance() {
    let out = bihyp(&[
        "metric",
        "--family",
        r#"[{"canonical":{"norm":{"norms":[1,1,1,1]}}}]"#,
        "--x",
        "[0.0]",
        "--y",
        "[1.0]",
        "--truncation",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["truncation"], 5);
    assert_eq!(doc["value"], serde_json::json!([0.25, 0.25, 0.25, 0.25]));
}

#[test]
fn expected_failures_exit_zero_with_identical_bytes() {
    let args = ["verify", "--id", "T5-convexity-fail", "--trials", "200"];
    let a = bihyp(&args);
    let b = bihyp(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let doc = stdout_json(&a);
    assert_eq!(doc["as_expected"], true);
    assert_eq!(doc["report"]["verdict"], "fail");
    assert_eq!(doc["witness_reverified"], true);
    assert!(doc.get("wall_ms").is_none());
}

#[test]
fn env_seed_applies_only_without_the_flag() {
    let args = ["verify", "--id", "T8.pair-sum", "--trials", "60"];
    let via_env = run_with_env(&args, &[("BIHYP_SEED", "9")]);
    let via_flag = bihyp(&["--seed", "9", "verify", "--id", "T8.pair-sum", "--trials", "60"]);
    assert_eq!(via_env.stdout, via_flag.stdout);

    let flag_wins = run_with_env(
        &["verify", "--id", "T8.pair-sum", "--trials", "60", "--seed", "3"],
        &[("BIHYP_SEED", "9")],
    );
    assert_eq!(stdout_json(&flag_wins)["report"]["seed"], 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&bihyp(&["frobnicate"])), 2);
    assert_eq!(code(&bihyp(&["mul", "1", "2", "3"])), 2);
    let bad_env = run_with_env(&["canon", "1", "0", "0", "0"], &[("BIHYP_SEED", "bogus")]);
    assert_eq!(code(&bad_env), 2);
    assert!(bad_env.stdout.is_empty());
}

#[test]
fn unknown_property_is_a_domain_error() {
    let out = bihyp(&["verify", "--id", "nope"]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"{\"error\":\"UnknownProperty\"}\n");
}

#[test]
fn registry_list_is_complete() {
    let out = bihyp(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let rows = doc.as_array().expect("array");
    assert_eq!(rows.len(), 25);
    let ids: Vec<&str> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    for required in [
        "T4.decomposition",
        "T5-convexity-fail",
        "T2.absorbing-stability-fail",
        "gauge.oracle",
        "M.metric-axioms",
    ] {
        assert!(ids.contains(&required), "{required} missing");
    }
    for row in rows {
        assert!(row["claim"].as_str().is_some_and(|c| !c.is_empty()));
        assert!(row.get("instance").is_some());
    }
}

#[test]
fn instance_overrides_load_from_files() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("instance.json");
    let instance = format!(r#"{{"set":{{"set":{}}}}}"#, BALL_PRODUCT);
    std::fs::write(&path, instance).expect("write");
    let out = bihyp(&[
        "verify",
        "--id",
        "T5.convexity",
        "--instance",
        path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["verdict"], "certified_pass");
    assert_eq!(doc["as_expected"], true);
}

#[test]
fn suite_config_files_drive_subsets() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("suite.json");
    std::fs::write(
        &path,
        r#"{"trials":120,"ids":["T4.decomposition","T5.convexity"]}"#,
    )
    .expect("write");
    let out = bihyp(&["verify", "--config", path.to_str().expect("utf-8 path")]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["all_expected"], true);
    assert_eq!(doc["reports"].as_array().expect("array").len(), 2);

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").expect("write");
    let out = bihyp(&["verify", "--config", empty.to_str().expect("utf-8 path")]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"{\"error\":\"ConfigError\"}\n");
}
