//! End-to-end checks of the binary: exit codes, file round-trips,
//! determinism, and the report contents the commands promise.

use std::path::Path;
use std::process::{Command, Output};

fn bigv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bigv"))
        .current_dir(dir)
        .env_remove("BIGV_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(name)).expect("report exists");
    serde_json::from_str(&text).expect("valid json")
}

#[test]
fn simulate_v1_has_perfect_same_setting_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(
        dir.path(),
        &[
            "simulate",
            "--experiment",
            "v1",
            "--n",
            "100000",
            "--seed",
            "7",
            "--out",
            "v1.csv",
            "--summary",
            "v1.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(dir.path(), "v1.json");
    assert_eq!(summary["same_settings"]["p_equal_outcomes"], 1.0);
    let p = summary["different_settings"]["p_equal_outcomes"]
        .as_f64()
        .unwrap();
    let n = summary["different_settings"]["n"].as_f64().unwrap();
    assert!((p - 0.25).abs() < 3.0 * (0.25 * 0.75 / n).sqrt());
}

#[test]
fn simulate_bigv_mixes_evenly() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(
        dir.path(),
        &[
            "simulate", "--experiment", "bigv", "--n", "100000", "--seed", "7",
        ],
    );
    assert_eq!(code(&out), 0);
    let summary = read_json(dir.path(), "summary.json");
    for section in ["same_settings", "different_settings"] {
        let p = summary[section]["p_equal_outcomes"].as_f64().unwrap();
        let n = summary[section]["n"].as_f64().unwrap();
        assert!((p - 0.5).abs() < 3.0 * (0.25 / n).sqrt(), "{section}: {p}");
    }
}

#[test]
fn simulate_rejects_empty_runs_and_bad_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(dir.path(), &["simulate", "--experiment", "v1", "--n", "0"]);
    assert_eq!(code(&out), 1);
    let out = bigv(
        dir.path(),
        &[
            "simulate",
            "--experiment",
            "v1",
            "--n",
            "10",
            "--out",
            "no_such_dir/data.csv",
        ],
    );
    assert_eq!(code(&out), 2);
    let out = bigv(dir.path(), &["simulate", "--n", "10"]);
    assert_eq!(code(&out), 1, "missing experiment is a config error");
}

#[test]
fn analyze_round_trip_and_preselection_recovers_dependence() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(
        dir.path(),
        &[
            "simulate", "--experiment", "bigv", "--n", "100000", "--seed", "11",
            "--out", "bigv.csv",
        ],
    );
    assert_eq!(code(&out), 0);

    // Mixed ensemble: a and B look independent.
    let out = bigv(
        dir.path(),
        &[
            "analyze", "--data", "bigv.csv", "--ci", "a:B", "--out", "mixed.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(dir.path(), "mixed.json");
    assert_eq!(report["analyses"][0]["verdict"], "independent");

    // Sorted by the initial state, the outcome correlation reappears.
    let out = bigv(
        dir.path(),
        &[
            "analyze", "--data", "bigv.csv", "--preselect", "i1", "--ci",
            "A:B:a,b", "--out", "sorted.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), "sorted.json");
    assert_eq!(report["analyses"][0]["verdict"], "dependent");
    assert!(report["preselect"]["fraction"].as_f64().unwrap() > 0.4);

    // No-signalling and posteriors blocks come back well-formed.
    let out = bigv(
        dir.path(),
        &[
            "analyze", "--data", "bigv.csv", "--no-signalling", "--posteriors",
            "--out", "ns.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), "ns.json");
    assert_eq!(report["analyses"][0]["passed"], true);
    assert_eq!(report["analyses"][1]["estimates"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_error_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "not,the,header\n1,2,3\n").unwrap();
    let out = bigv(dir.path(), &["analyze", "--data", "bad.csv"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let out = bigv(dir.path(), &["analyze", "--data", "missing.csv"]);
    assert_eq!(code(&out), 2);

    std::fs::write(
        dir.path().join("tiny.csv"),
        "trial,a,b,A,B,I\n0,0,0,0,0,1\n",
    )
    .unwrap();
    let out = bigv(
        dir.path(),
        &["analyze", "--data", "tiny.csv", "--ci", "a:ghost"],
    );
    assert_eq!(code(&out), 1, "unknown variable is a config error");

    // Masked datasets cannot answer posterior queries.
    let run = bigv(
        dir.path(),
        &[
            "simulate", "--experiment", "bigv", "--n", "100", "--seed", "3",
            "--out", "masked.csv", "--mask-initial",
        ],
    );
    assert_eq!(code(&run), 0);
    let out = bigv(
        dir.path(),
        &["analyze", "--data", "masked.csv", "--posteriors"],
    );
    assert_eq!(code(&out), 1);
    let out = bigv(
        dir.path(),
        &["analyze", "--data", "masked.csv", "--preselect", "i1"],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn scenario_reports_and_classifications() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(dir.path(), &["scenario", "damascus", "--out", "plain.json"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("selection artefact"));
    let report = read_json(dir.path(), "plain.json");
    assert_eq!(report["support"]["selection_corr"], -1.0);
    assert_eq!(report["support"]["far_side_movement"], 0.0);

    let out = bigv(
        dir.path(),
        &["scenario", "damascus", "--constrained", "--out", "locked.json"],
    );
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("CCC"));
    let report = read_json(dir.path(), "locked.json");
    assert_eq!(report["support"]["far_side_movement"], 1.0);
    assert_eq!(report["model"]["constraint"]["node"], "meeting");

    let out = bigv(
        dir.path(),
        &[
            "scenario", "bigv-retro", "--mode", "locked-compatible",
            "--sweep-trials", "25", "--out", "retro.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), "retro.json");
    assert!(!report["faithfulness"]["unfaithful"].as_array().unwrap().is_empty());
    assert_eq!(report["fine_tuning"]["surviving_fraction"], 0.0);

    let out = bigv(dir.path(), &["scenario", "atlantis"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn datasets_are_byte_deterministic_and_seed_env_works() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["one.csv", "two.csv"] {
        let out = bigv(
            dir.path(),
            &[
                "simulate", "--experiment", "bigv", "--n", "20000", "--seed",
                "42", "--out", name, "--summary", "s.json",
            ],
        );
        assert_eq!(code(&out), 0);
    }
    let one = std::fs::read(dir.path().join("one.csv")).unwrap();
    let two = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(one, two);

    // Seed from the environment, then overridden by the flag.
    let out = Command::new(env!("CARGO_BIN_EXE_bigv"))
        .current_dir(dir.path())
        .env("BIGV_SEED", "42")
        .args([
            "simulate", "--experiment", "bigv", "--n", "20000", "--out",
            "env.csv", "--summary", "s.json",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let env_csv = std::fs::read(dir.path().join("env.csv")).unwrap();
    assert_eq!(one, env_csv);

    let out = Command::new(env!("CARGO_BIN_EXE_bigv"))
        .current_dir(dir.path())
        .env("BIGV_SEED", "41")
        .args([
            "simulate", "--experiment", "bigv", "--n", "20000", "--seed", "42",
            "--out", "flag.csv", "--summary", "s.json",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let flag_csv = std::fs::read(dir.path().join("flag.csv")).unwrap();
    assert_eq!(one, flag_csv);
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"experiment": "v2", "n": 5000, "seed": 9, "out": "from_config.csv"}"#,
    )
    .unwrap();
    let out = bigv(dir.path(), &["simulate", "--config", "run.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from_config.csv").exists());

    let out = bigv(
        dir.path(),
        &[
            "simulate", "--config", "run.json", "--out", "override.csv",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("override.csv").exists());

    std::fs::write(dir.path().join("bad.json"), r#"{"mystery": 1}"#).unwrap();
    let out = bigv(dir.path(), &["simulate", "--config", "bad.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn json_dataset_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(
        dir.path(),
        &[
            "simulate", "--experiment", "v2", "--n", "50", "--seed", "2",
            "--format", "json", "--out", "data.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let data = read_json(dir.path(), "data.json");
    let records = data["records"].as_array().unwrap();
    assert_eq!(records.len(), 50);
    assert_eq!(records[0]["I"], 2);
}

#[test]
fn reproduce_passes_clean_and_fails_under_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let out = bigv(dir.path(), &["reproduce", "--out", "claims.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("[PASS]").count(), 11);
    let report = read_json(dir.path(), "claims.json");
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["claims"].as_array().unwrap().len(), 11);

    // Negative control: a mis-signed kernel must fail, name the claim, and
    // still write the report.
    let out = bigv(
        dir.path(),
        &[
            "reproduce", "--out", "faulty.json", "--fault", "flip-singlet-sign",
        ],
    );
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("02-v2-table"));
    let report = read_json(dir.path(), "faulty.json");
    assert_eq!(report["all_passed"], false);
}
