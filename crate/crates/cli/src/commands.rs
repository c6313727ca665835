//! The four subcommands.

use serde_json::json;

use crate::config::{seed_from_env, OutputFormat, ResolvedRun, RunConfig};
use crate::{AnalyzeArgs, AppError, ReproduceArgs, ScenarioArgs, SimulateArgs};
use bigv_core::analysis::{
    counterfactual_support_report, faithfulness_report, fine_tuning_sweep, g2_ci_test, si_check,
    CiStatement, Scenario,
};
use bigv_core::bell::{empirical_posteriors, frame_from_records, read_csv, sample_trials};
use bigv_core::report::{run_acceptance, Fault};
use bigv_core::scm::{
    bigv_retro_scm, constrain_collider, damascus_constrained, damascus_scm, Constraint, RetroMode,
};
use bigv_core::table::{JointTable, VarDef};
use bigv_core::{Dataset, ExperimentKind, InitialLabel, TrialRecord};

fn write_text(path: &str, text: &str) -> Result<(), AppError> {
    std::fs::write(path, text).map_err(|e| AppError::Io(format!("cannot write {path}: {e}")))
}

fn write_json(path: &str, value: &serde_json::Value) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    write_text(path, &text)
}

fn parse_experiment(s: &str) -> Result<ExperimentKind, AppError> {
    s.parse::<ExperimentKind>().map_err(AppError::from)
}

fn parse_label(s: &str) -> Result<InitialLabel, AppError> {
    match s.to_ascii_lowercase().as_str() {
        "i1" | "1" => Ok(InitialLabel::I1),
        "i2" | "2" => Ok(InitialLabel::I2),
        other => Err(AppError::Config(format!(
            "unknown initial label `{other}` (expected i1 or i2)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn resolve_run(args: SimulateArgs) -> Result<ResolvedRun, AppError> {
    let config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let experiment = args
        .experiment
        .or(config.experiment.clone())
        .ok_or_else(|| AppError::Config("--experiment is required".into()))?;
    let kind = parse_experiment(&experiment)?;
    let n = args
        .n
        .or(config.n)
        .ok_or_else(|| AppError::Config("--n is required".into()))?;
    let seed = match args.seed {
        Some(s) => s,
        None => seed_from_env()?.or(config.seed).unwrap_or(0),
    };
    let format = args
        .format
        .map(|f| match f.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(AppError::Config(format!("unknown format `{other}`"))),
        })
        .transpose()?
        .or(config.format)
        .unwrap_or(OutputFormat::Csv);
    let default_out = match format {
        OutputFormat::Csv => "dataset.csv",
        OutputFormat::Json => "dataset.json",
    };
    Ok(ResolvedRun {
        kind,
        n,
        seed,
        policy: config.policy()?,
        out: args.out.or(config.out).unwrap_or_else(|| default_out.into()),
        summary: args
            .summary
            .or(config.summary)
            .unwrap_or_else(|| "summary.json".into()),
        format,
        mask_initial: args.mask_initial || config.mask_initial.unwrap_or(false),
    })
}

fn dataset_json(ds: &Dataset, mask_initial: bool) -> serde_json::Value {
    json!({
        "schema_version": 1,
        "experiment": ds.kind.name(),
        "seed": ds.seed,
        "setting_policy": ds.policy.label(),
        "records": ds.records.iter().map(|r| json!({
            "trial": r.trial,
            "a": r.a.index(),
            "b": r.b.index(),
            "A": r.outcome_a.index(),
            "B": r.outcome_b.index(),
            "I": if mask_initial { None } else { r.initial.map(|l| l.tag()) },
        })).collect::<Vec<_>>(),
    })
}

pub fn simulate(args: SimulateArgs) -> Result<(), AppError> {
    let run = resolve_run(args)?;
    let ds = sample_trials(run.kind, run.n, run.seed, &run.policy)?;
    match run.format {
        OutputFormat::Csv => write_text(&run.out, &ds.to_csv(run.mask_initial))?,
        OutputFormat::Json => write_json(&run.out, &dataset_json(&ds, run.mask_initial))?,
    }
    let summary = ds.summary();
    write_json(
        &run.summary,
        &serde_json::to_value(&summary).expect("serializable summary"),
    )?;
    println!(
        "simulated {} trials of {} (seed {}) -> {} (summary {})",
        run.n,
        run.kind.name(),
        run.seed,
        run.out,
        run.summary
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

type CiSpec = (Vec<String>, Vec<String>, Vec<String>);

fn parse_ci_spec(spec: &str) -> Result<CiSpec, AppError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(AppError::Config(format!(
            "bad --ci spec `{spec}` (expected X:Y or X:Y:Z1,Z2)"
        )));
    }
    let split = |s: &str| -> Vec<String> {
        s.split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(str::to_string)
            .collect()
    };
    let x = split(parts[0]);
    let y = split(parts[1]);
    let z = if parts.len() == 3 { split(parts[2]) } else { Vec::new() };
    if x.is_empty() || y.is_empty() {
        return Err(AppError::Config(format!("empty variable set in `{spec}`")));
    }
    Ok((x, y, z))
}

/// Empirical joint over (a, b, A, B) with cell frequencies.
fn empirical_table(records: &[TrialRecord]) -> Result<JointTable, AppError> {
    let vars = vec![
        VarDef::new("a", &["0", "1", "2"]),
        VarDef::new("b", &["0", "1", "2"]),
        VarDef::new("A", &["0", "1"]),
        VarDef::new("B", &["0", "1"]),
    ];
    let mut counts = vec![0u64; 36];
    for r in records {
        let flat = ((r.a.index() * 3 + r.b.index()) * 2 + r.outcome_a.index()) * 2
            + r.outcome_b.index();
        counts[flat] += 1;
    }
    let n = records.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(JointTable::new(vars, probs)?)
}

pub fn analyze(args: AnalyzeArgs) -> Result<(), AppError> {
    let text = std::fs::read_to_string(&args.data)
        .map_err(|e| AppError::Io(format!("cannot read {}: {e}", args.data)))?;
    let mut records = read_csv(&text)?;
    if records.is_empty() {
        return Err(AppError::Config(format!("{} holds no trials", args.data)));
    }

    let mut preselect_block = serde_json::Value::Null;
    if let Some(label) = &args.preselect {
        let label = parse_label(label)?;
        let total = records.len();
        records.retain(|r| r.initial == Some(label));
        if records.is_empty() {
            return Err(AppError::Config(format!(
                "preselection on {label} kept no records (is the initial column masked?)"
            )));
        }
        preselect_block = json!({
            "label": label.tag(),
            "kept": records.len(),
            "fraction": records.len() as f64 / total as f64,
        });
    }

    let frame = frame_from_records(&records);
    let mut analyses = Vec::new();

    for spec in &args.ci {
        let (x, y, z) = parse_ci_spec(spec)?;
        let xs: Vec<&str> = x.iter().map(String::as_str).collect();
        let ys: Vec<&str> = y.iter().map(String::as_str).collect();
        let zs: Vec<&str> = z.iter().map(String::as_str).collect();
        let result = g2_ci_test(&frame, &xs, &ys, &zs, args.alpha)?;
        let mut value = serde_json::to_value(&result).expect("serializable test");
        value["type"] = json!("ci");
        analyses.push(value);
    }

    if args.no_signalling {
        let alice = g2_ci_test(&frame, &["A"], &["b"], &["a"], args.alpha)?;
        let bob = g2_ci_test(&frame, &["B"], &["a"], &["b"], args.alpha)?;
        let empirical = bigv_core::analysis::no_signalling_check(&empirical_table(&records)?)?;
        let passed = !alice.dependent() && !bob.dependent();
        analyses.push(json!({
            "type": "no_signalling",
            "alice_outcome_vs_remote_setting": serde_json::to_value(&alice).unwrap(),
            "bob_outcome_vs_remote_setting": serde_json::to_value(&bob).unwrap(),
            "max_empirical_deviation": empirical.max_deviation,
            "passed": passed,
        }));
    }

    if args.posteriors {
        let estimates = empirical_posteriors(&records).ok_or_else(|| {
            AppError::Config("posteriors need the initial-state column (unmasked)".into())
        })?;
        analyses.push(json!({
            "type": "posteriors",
            "estimates": serde_json::to_value(&estimates).unwrap(),
        }));
    }

    let report = json!({
        "schema_version": 1,
        "dataset": args.data,
        "n_records": records.len(),
        "alpha": args.alpha,
        "preselect": preselect_block,
        "analyses": analyses,
    });
    write_json(&args.out, &report)?;
    println!("analyzed {} records -> {}", records.len(), args.out);
    Ok(())
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

fn parse_mode(mode: Option<&str>, epsilon: f64) -> Result<RetroMode, AppError> {
    match mode.unwrap_or("locked-compatible") {
        "locked-compatible" => Ok(RetroMode::LockedCompatible),
        "unlocked-demo" => Ok(RetroMode::UnlockedDemo { epsilon }),
        other => Err(AppError::Config(format!(
            "unknown mode `{other}` (expected locked-compatible or unlocked-demo)"
        ))),
    }
}

pub fn scenario(args: ScenarioArgs) -> Result<(), AppError> {
    let scenario: Scenario = args.name.parse()?;
    let seed = match args.seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let support = counterfactual_support_report(scenario, args.constrained)?;
    let mut report = json!({
        "schema_version": 1,
        "scenario": support.scenario,
        "constrained": args.constrained,
        "support": serde_json::to_value(&support).expect("serializable support"),
    });

    match scenario {
        Scenario::Damascus => {
            report["model"] = if args.constrained {
                damascus_constrained().to_json()
            } else {
                damascus_scm().to_json()
            };
        }
        Scenario::BigvRetro => {
            let mode = parse_mode(args.mode.as_deref(), args.epsilon)?;
            let scm = bigv_retro_scm(mode)?;
            report["mode"] = match mode {
                RetroMode::LockedCompatible => json!("locked-compatible"),
                RetroMode::UnlockedDemo { epsilon } => json!({
                    "name": "unlocked-demo",
                    "epsilon": epsilon,
                    "note": "illustrative setting-dependent parameterization, not a physical proposal",
                }),
            };
            let faithfulness = faithfulness_report(&scm)?;
            report["faithfulness"] = json!({
                "implied": faithfulness.implied,
                "actual": faithfulness.actual,
                "unfaithful": faithfulness.unfaithful,
                "faithful_violations": faithfulness.faithful_violations,
            });
            let joint = scm.exact_joint()?;
            report["statistical_independence"] = json!([
                serde_json::to_value(&si_check(&joint, "I", "a")?).unwrap(),
                serde_json::to_value(&si_check(&joint, "I", "b")?).unwrap(),
            ]);
            // The flat-row coincidence only exists in locked-compatible mode,
            // so that is the only mode with a sweep target.
            report["fine_tuning"] = match mode {
                RetroMode::LockedCompatible => {
                    let sweep = fine_tuning_sweep(
                        &scm,
                        &CiStatement::new("a", "I", &[]),
                        args.sweep_epsilon,
                        args.sweep_trials,
                        seed,
                    )?;
                    serde_json::to_value(&sweep).expect("serializable sweep")
                }
                RetroMode::UnlockedDemo { .. } => serde_json::Value::Null,
            };
            report["model"] = if args.constrained {
                constrain_collider(
                    scm,
                    Constraint {
                        node: "I".into(),
                        value: "2".into(),
                    },
                )?
                .to_json()
            } else {
                scm.to_json()
            };
        }
    }

    write_json(&args.out, &report)?;
    println!(
        "scenario {}{}: classification \"{}\" -> {}",
        support.scenario,
        if args.constrained { " (constrained)" } else { "" },
        support.classification,
        args.out
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

pub fn reproduce(args: ReproduceArgs) -> Result<(), AppError> {
    let fault = args
        .fault
        .as_deref()
        .map(|f| f.parse::<Fault>())
        .transpose()?;
    let report = run_acceptance(fault)?;
    for claim in &report.claims {
        let status = if claim.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {} — {}", claim.id, claim.title);
        for check in &claim.checks {
            if !check.passed {
                println!(
                    "       failed: {} — measured {}, requirement {}",
                    check.name, check.measured, check.requirement
                );
            }
        }
    }
    write_json(
        &args.out,
        &serde_json::to_value(&report).expect("serializable report"),
    )?;
    if !report.all_passed {
        return Err(AppError::Acceptance(
            report.failing().iter().map(|c| c.id.clone()).collect(),
        ));
    }
    println!("all claims pass -> {}", args.out);
    Ok(())
}
