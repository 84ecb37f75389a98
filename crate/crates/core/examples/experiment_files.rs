//! Driving the experiment layer from code: build a config, run it, and
//! audit the produced trace — the same plumbing the CLI commands use.
//!
//! Run with: cargo run --example experiment_files

use std::fs;

use calibration_lab::config::{ExperimentConfig, LoadedConfig, NatureSpec};
use calibration_lab::experiment::{cmd_audit, cmd_run};
use calibration_lab::forecasters::{BetaBernoulliSpec, ForecasterSpec};
use calibration_lab::RuleSpec;

fn main() {
    let dir = std::env::temp_dir().join("calibration-lab-example");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();

    let config = ExperimentConfig {
        schema_version: 1,
        forecaster: ForecasterSpec::BetaBernoulli(BetaBernoulliSpec { alpha: 1.0, beta: 1.0 }),
        nature: NatureSpec::iid(0.45),
        rules: vec![RuleSpec::all_days(), RuleSpec::high(), RuleSpec::low()],
        horizon: 5_000,
        checkpoints: None,
        tolerance: 0.03,
        burn_in: 100,
        seed: Some(1234),
        out_dir: None,
        runs: None,
        game: None,
    };
    config.validate(&dir).unwrap();
    println!("canonical config:\n{}", config.to_canonical_json().unwrap());

    let loaded = LoadedConfig {
        config,
        base_dir: dir.clone(),
    };

    let run_dir = dir.join("run");
    let written = cmd_run(&loaded, &run_dir).unwrap();
    for path in &written {
        println!("wrote {}", path.display());
    }

    // Re-audit the trace we just wrote; the checkpoint log comes back
    // byte-identical because discrepancies recompute exactly from the
    // recorded forecasts.
    let audit_dir = dir.join("reaudit");
    cmd_audit(&loaded, &run_dir.join("trace.csv"), &audit_dir).unwrap();
    let a = fs::read(run_dir.join("audit.csv")).unwrap();
    let b = fs::read(audit_dir.join("audit.csv")).unwrap();
    assert_eq!(a, b);
    println!("\nre-audit of trace.csv reproduced audit.csv byte for byte");

    let verdict = fs::read_to_string(run_dir.join("verdict.json")).unwrap();
    println!("\nverdict.json:\n{verdict}");
}
