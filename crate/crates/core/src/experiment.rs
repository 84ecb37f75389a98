//! The file-producing commands behind the CLI.
//!
//! Every command reads one experiment config and writes its artifacts
//! into an output directory. Outputs are deterministic functions of the
//! config: no timestamps, no platform-dependent formatting, and no
//! dependence on worker count.

use std::fs;
use std::path::{Path, PathBuf};

use crate::adversary::adversarial_stream;
use crate::audit::{audit_recorded, audit_traced, verdict};
use crate::config::{LoadedConfig, NatureSpec};
use crate::error::{Error, Result};
use crate::game::{play_game, GameOptions};
use crate::mc::{dawid_mc_check_detailed, predictive_sample, McOptions};
use crate::model::{Bit, Prefix};
use crate::rng::nth_unit;
use crate::rules::build_rules;
use crate::trace::{audit_to_csv, csv_f64, trace_to_csv, ExternalTrace};

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn require_seed(loaded: &LoadedConfig, what: &str) -> Result<u64> {
    loaded
        .config
        .seed
        .ok_or_else(|| Error::config(format!("{what} requires a master seed")))
}

/// Produce the configured nature's outcome sequence of length `horizon`.
pub fn generate_outcomes(loaded: &LoadedConfig, horizon: u64) -> Result<Prefix> {
    let config = &loaded.config;
    match &config.nature {
        NatureSpec::Iid(iid) => {
            let seed = require_seed(loaded, "an iid nature")?;
            Ok((1..=horizon)
                .map(|k| Bit::from(nth_unit(seed, k) < iid.theta))
                .collect())
        }
        NatureSpec::File(file) => {
            let path = config.resolve(&loaded.base_dir, &file.path);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let bits = Prefix::parse(text.trim_end())?;
            if (bits.len() as u64) < horizon {
                return Err(Error::OutcomesExhausted {
                    needed: horizon,
                    got: bits.len() as u64,
                });
            }
            Ok(bits)
        }
        NatureSpec::Adversarial(_) => {
            let forecaster = config.forecaster.build()?;
            adversarial_stream(forecaster.as_ref(), horizon)
        }
        NatureSpec::Predictive(_) => {
            let seed = require_seed(loaded, "a predictive nature")?;
            let forecaster = config.forecaster.build()?;
            predictive_sample(forecaster.as_ref(), horizon, seed)
        }
    }
}

/// `run`: audit the configured forecaster against its nature, writing
/// `trace.csv`, `audit.csv`, and `verdict.json`.
pub fn cmd_run(loaded: &LoadedConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = &loaded.config;
    let forecaster = config.forecaster.build()?;
    let rules = build_rules(&config.rules)?;
    let outcomes = generate_outcomes(loaded, config.horizon)?;
    let (audit, trace) = audit_traced(
        forecaster.as_ref(),
        outcomes.bits(),
        &rules,
        config.horizon,
        &config.checkpoint_days(),
    )?;
    let v = verdict(&audit, config.tolerance, config.burn_in)?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let paths = [
        out_dir.join("trace.csv"),
        out_dir.join("audit.csv"),
        out_dir.join("verdict.json"),
    ];
    write_file(&paths[0], trace_to_csv(&trace).as_bytes())?;
    write_file(&paths[1], audit_to_csv(&audit).as_bytes())?;
    write_file(&paths[2], &to_pretty_json(&v)?)?;
    Ok(paths.to_vec())
}

/// `sample`: write the configured nature's outcome sequence as a
/// '0'/'1' text file, `sequence.txt`.
pub fn cmd_sample(loaded: &LoadedConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let outcomes = generate_outcomes(loaded, loaded.config.horizon)?;
    let truncated = outcomes.truncated(loaded.config.horizon as usize);
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join("sequence.txt");
    write_file(&path, format!("{truncated}\n").as_bytes())?;
    Ok(vec![path])
}

/// `game`: play the configured prefix game, writing `transcript.jsonl`.
pub fn cmd_game(loaded: &LoadedConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = &loaded.config;
    let game = config
        .game
        .as_ref()
        .ok_or_else(|| Error::config("the game command needs a \"game\" config section"))?;
    let forecaster = config.forecaster.build()?;
    let p1 = game.p1.build(config.seed)?;
    let transcript = play_game(
        forecaster.as_ref(),
        p1.as_ref(),
        GameOptions {
            rounds: game.rounds,
            cap_per_turn: game.cap_per_turn,
            seed: config.seed,
        },
    )?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join("transcript.jsonl");
    let mut buf = Vec::new();
    transcript.write_jsonl(&mut buf)?;
    write_file(&path, &buf)?;
    Ok(vec![path])
}

/// `mc`: Monte Carlo self-calibration check, writing `report.json` and
/// the per-run `runs.csv`.
pub fn cmd_mc(loaded: &LoadedConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = &loaded.config;
    let runs = config
        .runs
        .ok_or_else(|| Error::config("the mc command needs \"runs\" in the config"))?;
    let master_seed = require_seed(loaded, "the mc command")?;
    let forecaster = config.forecaster.build()?;
    let rules = build_rules(&config.rules)?;
    let (report, results) = dawid_mc_check_detailed(
        forecaster.as_ref(),
        &rules,
        McOptions {
            horizon: config.horizon,
            runs,
            tolerance: config.tolerance,
            master_seed,
        },
    )?;

    let mut csv = String::from("run,rule,count,final_mean\n");
    for result in &results {
        for (rule, stats) in rules.iter().zip(result.finals.iter()) {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                result.run,
                rule.name(),
                stats.count(),
                stats.mean().map(csv_f64).unwrap_or_default()
            ));
        }
    }

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let paths = [out_dir.join("report.json"), out_dir.join("runs.csv")];
    write_file(&paths[0], &to_pretty_json(&report)?)?;
    write_file(&paths[1], csv.as_bytes())?;
    Ok(paths.to_vec())
}

/// `audit`: recompute discrepancies from a recorded trace file and audit
/// them under the config's rules, writing `audit.csv` and `verdict.json`.
/// The horizon is the trace's own length.
pub fn cmd_audit(loaded: &LoadedConfig, trace_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = &loaded.config;
    let text = fs::read_to_string(trace_path).map_err(|e| Error::io(trace_path, e))?;
    let external = ExternalTrace::parse(&text)?;
    let rules = build_rules(&config.rules)?;
    let horizon = external.len();
    let checkpoints = match &config.checkpoints {
        Some(days) => days.clone(),
        None => crate::audit::default_checkpoints(horizon),
    };
    let audit = audit_recorded(&external.forecasts, &external.outcomes, &rules, &checkpoints)?;
    let v = verdict(&audit, config.tolerance, config.burn_in)?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let paths = [out_dir.join("audit.csv"), out_dir.join("verdict.json")];
    write_file(&paths[0], audit_to_csv(&audit).as_bytes())?;
    write_file(&paths[1], &to_pretty_json(&v)?)?;
    Ok(paths.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn loaded(json: &str, dir: &Path) -> LoadedConfig {
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        config.validate(dir).unwrap();
        LoadedConfig {
            config,
            base_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn run_with_adversarial_constant() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = loaded(
            r#"{
                "schema_version": 1,
                "forecaster": {"type": "constant", "p": 0.7},
                "nature": {"adversarial": {}},
                "rules": [{"type": "all_days"}, {"type": "high"}, {"type": "low"}],
                "horizon": 100,
                "tolerance": 0.25
            }"#,
            dir.path(),
        );
        let out = dir.path().join("out");
        cmd_run(&cfg, &out).unwrap();
        let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
        let mut lines = trace.lines();
        assert_eq!(lines.next().unwrap(), "day,bit,forecast,discrepancy");
        let mut rows = 0;
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[1], "0");
            assert_eq!(fields[2].parse::<f64>().unwrap(), 0.7);
            assert_eq!(fields[3].parse::<f64>().unwrap(), -0.7);
            rows += 1;
        }
        assert_eq!(rows, 100);
        let verdict_json = fs::read_to_string(out.join("verdict.json")).unwrap();
        assert!(verdict_json.contains("violation"));
    }

    #[test]
    fn run_then_audit_reproduces_audit_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = loaded(
            r#"{
                "schema_version": 1,
                "forecaster": {"type": "beta_bernoulli", "alpha": 1, "beta": 1},
                "nature": {"iid": {"theta": 0.4}},
                "rules": [{"type": "all_days"}, {"type": "high"}, {"type": "low"}],
                "horizon": 500,
                "tolerance": 0.1,
                "seed": 99
            }"#,
            dir.path(),
        );
        let run_out = dir.path().join("run");
        cmd_run(&cfg, &run_out).unwrap();
        let audit_out = dir.path().join("audit");
        cmd_audit(&cfg, &run_out.join("trace.csv"), &audit_out).unwrap();
        let a = fs::read(run_out.join("audit.csv")).unwrap();
        let b = fs::read(audit_out.join("audit.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_nature_too_short_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bits.txt"), "0".repeat(50)).unwrap();
        let cfg = loaded(
            r#"{
                "schema_version": 1,
                "forecaster": {"type": "constant", "p": 0.5},
                "nature": {"file": {"path": "bits.txt"}},
                "rules": [{"type": "all_days"}],
                "horizon": 100,
                "tolerance": 0.1
            }"#,
            dir.path(),
        );
        match cmd_run(&cfg, &dir.path().join("out")) {
            Err(Error::OutcomesExhausted { needed: 100, got: 50 }) => {}
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn game_command_writes_the_expected_transcript() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = loaded(
            r#"{
                "schema_version": 1,
                "forecaster": {"type": "constant", "p": 0.9},
                "nature": {"adversarial": {}},
                "rules": [{"type": "high"}, {"type": "low"}],
                "horizon": 10,
                "tolerance": 0.25,
                "game": {"p1": {"type": "fixed", "string": "1"}, "rounds": 1}
            }"#,
            dir.path(),
        );
        let out = dir.path().join("out");
        cmd_game(&cfg, &out).unwrap();
        let text = fs::read_to_string(out.join("transcript.jsonl")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(second["string"], "0");
        assert_eq!(second["high_mean"].as_f64().unwrap(), -0.4);
    }

    #[test]
    fn sample_writes_prefix_text() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = loaded(
            r#"{
                "schema_version": 1,
                "forecaster": {"type": "constant", "p": 1.0},
                "nature": {"predictive": {}},
                "rules": [{"type": "all_days"}],
                "horizon": 8,
                "tolerance": 0.1,
                "seed": 5
            }"#,
            dir.path(),
        );
        let out = dir.path().join("out");
        cmd_sample(&cfg, &out).unwrap();
        let text = fs::read_to_string(out.join("sequence.txt")).unwrap();
        assert_eq!(text, "11111111\n");
    }
}
