use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn orient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orient")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = orient(&["--seed", "7", "gen", "p2p", "-n", "5"]);
    let b = orient(&["--seed", "7", "gen", "p2p", "-n", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = orient(&["--seed", "8", "gen", "p2p", "-n", "5"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn solve_matches_oracle_shape_and_counts_calls() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "line.json",
        r#"{"version":1,"kind":"p2p",
            "vertices":[{"name":"a","reward":0},{"name":"b","reward":1},{"name":"c","reward":1},{"name":"d","reward":1}],
            "metric":{"edges":[["a","b",1],["b","c",1],["c","d",1]]},
            "budget":9,"start":"a","end":"d"}"#,
    );
    let out = orient(&["--format", "rows", "solve", "p2p", &inst]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(rec["reward"], 3);
    assert_eq!(rec["min_excess_calls"], 8);
    let oracle = orient(&["--format", "rows", "oracle", "p2p", &inst]);
    let rec: Value = serde_json::from_str(stdout(&oracle).trim()).unwrap();
    assert_eq!(rec["optimum"], 3);
}

#[test]
fn parse_errors_exit_2_with_details() {
    let dir = tempfile::tempdir().unwrap();
    let bad_prob = write(
        dir.path(),
        "prob.json",
        r#"{"version":1,"kind":"stoch","vertices":[
            {"name":"depot","reward":0,"distribution":[[0,1]]},
            {"name":"pump","reward":2,"distribution":[[1,0.4],[3,0.5]]}],
            "metric":{"matrix":[[0,1],[1,0]]},"budget":5,"start":"depot","end":"depot"}"#,
    );
    let out = orient(&["solve", "stoch", &bad_prob]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pump") && err.contains("9/10"), "{err}");

    let bad_metric = write(
        dir.path(),
        "tri.json",
        r#"{"version":1,"kind":"p2p","vertices":[{"name":"x","reward":1},{"name":"y","reward":1},{"name":"z","reward":1}],
            "metric":{"matrix":[[0,1,5],[1,0,1],[5,1,0]]},"budget":6,"start":"x","end":"z"}"#,
    );
    let out = orient(&["solve", "p2p", &bad_metric]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(x, y, z)"));

    let out = orient(&["solve", "knap", &bad_metric.replace("tri", "missing")]);
    assert_eq!(out.status.code(), Some(2));
    let out = orient(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kind_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&orient(&["--seed", "1", "gen", "p2p", "-n", "3"]));
    let inst = write(dir.path(), "p.json", &text);
    assert_eq!(orient(&["solve", "knap", &inst]).status.code(), Some(2));
}

#[test]
fn empty_bench_passes() {
    let out = orient(&["--format", "rows", "bench"]);
    assert_eq!(out.status.code(), Some(0));
    let last: Value = serde_json::from_str(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(last["instances"], 0);
}

#[test]
fn bench_rows_are_reproducible() {
    let args = ["--seed", "5", "--format", "rows", "bench", "p2p", "tw", "--count", "10"];
    let a = orient(&args);
    let b = orient(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 21);
}

#[test]
fn bench_floor_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let suites = write(
        dir.path(),
        "suite.json",
        r#"[{"name":"strict","kind":"p2p","count":6,"n_min":3,"n_max":6,"ratio_floor":2}]"#,
    );
    let out = orient(&["bench", "--suite-file", &suites]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violation"));
}

#[test]
fn policy_round_trip_through_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&orient(&["--seed", "3", "gen", "stoch", "-n", "4"]));
    let inst = write(dir.path(), "s.json", &text);
    let policy = dir.path().join("policy.json");
    let policy = policy.to_str().unwrap();
    let solved = orient(&["--format", "rows", "solve", "stoch", &inst, "--policy-out", policy]);
    assert!(solved.status.success());
    let sim = |seed: &str| orient(&["--seed", seed, "--format", "rows", "simulate", &inst, policy, "--replicates", "20000"]);
    let a = sim("11");
    assert_eq!(a.stdout, sim("11").stdout);
    let rec: Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    let mean = rec["mean"].as_f64().unwrap();
    let se = rec["std_error"].as_f64().unwrap();
    let exact = match &rec["exact"] {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) => {
            let (n, d) = s.split_once('/').unwrap();
            n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
        }
        other => panic!("{other}"),
    };
    assert!((mean - exact).abs() <= 4.0 * se + 1e-9, "{mean} vs {exact} (se {se})");
}

#[test]
fn tw_slack_report_lists_claims() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&orient(&["--seed", "2", "gen", "tw", "-n", "5"]));
    let inst = write(dir.path(), "t.json", &text);
    let out = orient(&["--format", "rows", "solve", "tw", &inst, "--epsilon", "1/4", "--slack-report"]);
    assert!(out.status.success());
    let rec: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(rec["violations"], 0);
    assert_eq!(rec["margin_s"], 7);
    assert!(rec["slack_report"].as_array().unwrap().iter().all(|v| v["counted"] == true));

    let waiting = stdout(&orient(&["--seed", "2", "gen", "tw", "-n", "4", "--waiting", "2"]));
    let inst = write(dir.path(), "w.json", &waiting);
    let out = orient(&["--format", "rows", "solve", "tw", &inst, "--stochastic", "--replicates", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out_file = dir.path().join("o.txt");
    let out = orient(&["--out", out_file.to_str().unwrap(), "solve", "tw", &inst]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(fs::read_to_string(out_file).unwrap().starts_with("reward"));
}

#[test]
fn bundled_instances_solve_to_their_optimum() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    for (kind, optimum) in [("p2p", "8"), ("knap", "8"), ("stoch", "41/4"), ("tw", "12")] {
        let path = root.join(format!("{kind}.json"));
        let path = path.to_str().unwrap();
        let solved = orient(&["solve", kind, path]);
        assert!(solved.status.success(), "{kind}: {}", String::from_utf8_lossy(&solved.stderr));
        let exact = orient(&["oracle", kind, path]);
        assert!(exact.status.success());
        let first = stdout(&exact).lines().next().unwrap().to_string();
        assert!(first.split_whitespace().nth(1) == Some(optimum), "{kind}: {first}");
    }
}
