//! CLI acceptance: every subcommand run twice with the same configuration
//! and seed produces byte-identical output files, and exit codes follow the
//! 0/1/2 convention.

use std::path::Path;
use std::process::{Command, Output};

fn manetsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manetsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

const SCENARIO: &str = r#"
scenario_id = "cli"
transmission_ranges = [250.0]
node_counts = [12]
replications = 2
base_seed = 17
warmup_s = 20.0
lifetime_dt_sim_s = 0.5
lifetime_horizon_s = 60.0
selectors = ["hnn", "oracle", "greedy", "shortest_path"]
path_cap = 12

[mobility]
node_count = 12

[hnn_params]
mu1 = 32.0
mu2 = 27.0
lambda_gain = 0.45
dt = 1e-3
v_th = 0.23
max_iters = 30000
"#;

const TUNE: &str = r#"
[suite]
instance_count = 2
transmission_ranges = [250.0]
runs_per_eval = 6
base_seed = 5
path_cap = 8

[suite.mobility]
node_count = 12

[suite.reference_params]
mu1 = 1.0
mu2 = 1.0
lambda_gain = 50.0
dt = 1e-5
v_th = 0.1
max_iters = 20000

[suite.solver_base]
mu1 = 32.0
mu2 = 27.0
lambda_gain = 0.45
dt = 1e-3
v_th = 0.23
max_iters = 20000

[pso]
population = 4
max_iterations = 2
seed = 9
"#;

#[test]
fn acceptance_12_simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("scenario.toml"), SCENARIO).unwrap();
    for out in ["a.csv", "b.csv"] {
        let run = manetsim(
            &["simulate", "--config", "scenario.toml", "--out", out],
            dir.path(),
        );
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
    assert_eq!(
        read(dir.path(), "a.summary.csv"),
        read(dir.path(), "b.summary.csv")
    );
    println!("ACCEPTANCE 12a simulate determinism: PASS");
}

#[test]
fn acceptance_12_discover_and_solve_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let discover = |out: &str| {
        let run = manetsim(
            &[
                "discover", "--seed", "5", "--range", "250", "--nodes", "14", "--warmup", "30",
                "--cap", "12", "--out", out,
            ],
            dir.path(),
        );
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
    };
    discover("cache1.json");
    discover("cache2.json");
    assert_eq!(
        read(dir.path(), "cache1.json"),
        read(dir.path(), "cache2.json")
    );

    let solve = || {
        let run = manetsim(
            &[
                "solve",
                "--instance",
                "cache1.json",
                "--mode",
                "link-disjoint",
                "--seed",
                "3",
            ],
            dir.path(),
        );
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
        run.stdout
    };
    let first = solve();
    assert_eq!(first, solve());
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("hnn: selected"), "{text}");
    assert!(text.contains("oracle: selected"), "{text}");
    println!("ACCEPTANCE 12b discover/solve determinism: PASS");
}

#[test]
fn acceptance_12_tune_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tune.toml"), TUNE).unwrap();
    for (out, trace) in [("r1.json", "t1.csv"), ("r2.json", "t2.csv")] {
        let run = manetsim(
            &[
                "tune",
                "--config",
                "tune.toml",
                "--out",
                out,
                "--trace",
                trace,
            ],
            dir.path(),
        );
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
    assert_eq!(read(dir.path(), "r1.json"), read(dir.path(), "r2.json"));
    assert_eq!(read(dir.path(), "t1.csv"), read(dir.path(), "t2.csv"));
    println!("ACCEPTANCE 12c tune determinism: PASS");
}

#[test]
fn exit_codes_follow_the_convention() {
    let dir = tempfile::tempdir().unwrap();

    // 0: success (help).
    let run = manetsim(&["--help"], dir.path());
    assert_eq!(run.status.code(), Some(0));

    // 1: config errors: missing config file, invalid config content,
    // malformed instance data, bad flags.
    let run = manetsim(
        &["simulate", "--config", "missing.toml", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(run.status.code(), Some(1));

    std::fs::write(
        dir.path().join("bad.toml"),
        "transmission_ranges = []\nnode_counts = [5]\nbase_seed = 1\n",
    )
    .unwrap();
    let run = manetsim(
        &["simulate", "--config", "bad.toml", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("configuration error"));

    std::fs::write(
        dir.path().join("bad-instance.json"),
        r#"{"source":0,"destination":1,"paths":[[0,7,7,1]],"path_reliabilities":[0.5]}"#,
    )
    .unwrap();
    let run = manetsim(&["solve", "--instance", "bad-instance.json"], dir.path());
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("repeats node 7"));

    let run = manetsim(&["simulate", "--no-such-flag"], dir.path());
    assert_eq!(run.status.code(), Some(1));

    // 2: runtime errors: output path cannot be written.
    std::fs::write(dir.path().join("scenario.toml"), SCENARIO).unwrap();
    let run = manetsim(
        &[
            "simulate",
            "--config",
            "scenario.toml",
            "--out",
            "no-such-dir/x.csv",
        ],
        dir.path(),
    );
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("runtime error"));

    println!("ACCEPTANCE 12d exit codes: PASS");
}

#[test]
fn discover_requires_paired_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let run = manetsim(
        &["discover", "--seed", "1", "--range", "200", "--source", "3"],
        dir.path(),
    );
    assert_eq!(run.status.code(), Some(1));
}
