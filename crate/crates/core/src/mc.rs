//! Monte Carlo check of a forecaster's confidence in its own calibration.
//!
//! Sampling each day's bit with the forecaster's own predictive
//! probability draws the data sequence from the forecaster's prior. A
//! Bayesian forecaster assigns probability one to the set of sequences on
//! which it is calibrated, so audits of self-sampled runs should show
//! small final means under every rule with enough selected days. The
//! check here is a finite spot-check over a finite rule family, not a
//! certification: the measure-one statement quantifies over all
//! computable selection rules and infinite horizons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::audit;
use crate::error::{Error, Result};
use crate::forecasters::Forecaster;
use crate::model::{Bit, BucketStats, Prefix};
use crate::rng::{nth_unit, split_seed};
use crate::rules::SelectionRule;

/// Minimum selected days for a rule's final mean to count toward the
/// pass fraction; smaller samples are tallied as insufficient instead of
/// passing vacuously.
pub const MIN_SELECTED_DAYS: u64 = 100;

/// Draw a sequence from the forecaster's own prior: day k's bit is one
/// exactly when the k-th uniform variate of the seeded stream falls below
/// the forecast given the sampled prefix so far.
pub fn predictive_sample(forecaster: &dyn Forecaster, horizon: u64, seed: u64) -> Result<Prefix> {
    if horizon < 1 {
        return Err(Error::config("horizon must be at least 1"));
    }
    let mut ev = forecaster.evaluator();
    let mut out = Prefix::with_capacity(horizon as usize);
    for day in 1..=horizon {
        let pi = ev.next_forecast().map_err(|e| day_error(e, day))?;
        let bit = Bit::from(nth_unit(seed, day) < pi.value());
        ev.observe(bit).map_err(|e| day_error(e, day))?;
        out.push(bit);
    }
    Ok(out)
}

fn day_error(err: Error, day: u64) -> Error {
    match err {
        e @ (Error::PriorContradicted { .. } | Error::InvalidForecast { .. }) => e,
        Error::Config(reason) => Error::InvalidForecast { day, reason },
        other => other,
    }
}

/// Monte Carlo parameters.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub horizon: u64,
    pub runs: u64,
    pub tolerance: f64,
    pub master_seed: u64,
}

/// Final per-rule statistics of a single run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: u64,
    pub finals: Vec<BucketStats>,
}

/// Aggregate report for one rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRuleReport {
    pub rule: String,
    /// Runs where the rule selected at least [`MIN_SELECTED_DAYS`] days.
    pub evaluated_runs: u64,
    pub insufficient_runs: u64,
    /// Fraction of evaluated runs with |final mean| within tolerance.
    pub pass_fraction: Option<f64>,
    pub worst_abs_final_mean: Option<f64>,
    pub mean_abs_final_mean: Option<f64>,
}

/// Aggregate Monte Carlo report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub runs: u64,
    pub horizon: u64,
    pub tolerance: f64,
    pub master_seed: u64,
    pub rules: Vec<McRuleReport>,
}

/// Run the self-sampled calibration check: `runs` independent predictive
/// samples, each audited against `rules` at the given horizon.
///
/// Run j's sample stream is seeded by `split_seed(master_seed, j)`, a
/// pure function of the master seed and the run index, so results do not
/// depend on worker count or scheduling; aggregation reduces in run-index
/// order.
pub fn dawid_mc_check(
    forecaster: &dyn Forecaster,
    rules: &[SelectionRule],
    options: McOptions,
) -> Result<McReport> {
    Ok(dawid_mc_check_detailed(forecaster, rules, options)?.0)
}

/// Like [`dawid_mc_check`], also returning per-run final statistics.
pub fn dawid_mc_check_detailed(
    forecaster: &dyn Forecaster,
    rules: &[SelectionRule],
    options: McOptions,
) -> Result<(McReport, Vec<RunResult>)> {
    if options.runs < 1 {
        return Err(Error::config("at least one run required"));
    }
    if !(options.tolerance.is_finite() && options.tolerance > 0.0) {
        return Err(Error::config(format!(
            "tolerance must be a positive finite number, got {}",
            options.tolerance
        )));
    }
    if rules.is_empty() {
        return Err(Error::config("at least one selection rule required"));
    }

    let results: Vec<RunResult> = (0..options.runs)
        .into_par_iter()
        .map(|run| {
            let seed = split_seed(options.master_seed, run);
            let sample = predictive_sample(forecaster, options.horizon, seed)?;
            let audit = audit(
                forecaster,
                sample.bits(),
                rules,
                options.horizon,
                &[options.horizon],
            )?;
            Ok(RunResult {
                run,
                finals: audit.final_stats().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rule_reports = Vec::with_capacity(rules.len());
    for (i, rule) in rules.iter().enumerate() {
        let mut evaluated = 0u64;
        let mut insufficient = 0u64;
        let mut passes = 0u64;
        let mut worst: Option<f64> = None;
        let mut abs_sum = 0.0;
        for result in &results {
            let stats = &result.finals[i];
            if stats.count() < MIN_SELECTED_DAYS {
                insufficient += 1;
                continue;
            }
            evaluated += 1;
            let abs_mean = stats.mean().expect("count >= 1").abs();
            if abs_mean <= options.tolerance {
                passes += 1;
            }
            worst = Some(worst.map_or(abs_mean, |w| w.max(abs_mean)));
            abs_sum += abs_mean;
        }
        rule_reports.push(McRuleReport {
            rule: rule.name().to_string(),
            evaluated_runs: evaluated,
            insufficient_runs: insufficient,
            pass_fraction: (evaluated > 0).then(|| passes as f64 / evaluated as f64),
            worst_abs_final_mean: worst,
            mean_abs_final_mean: (evaluated > 0).then(|| abs_sum / evaluated as f64),
        });
    }

    Ok((
        McReport {
            runs: options.runs,
            horizon: options.horizon,
            tolerance: options.tolerance,
            master_seed: options.master_seed,
            rules: rule_reports,
        },
        results,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecasters::{BetaBernoulli, Constant};
    use crate::rules::{all_days_rule, high_rule, low_rule};

    #[test]
    fn degenerate_priors_sample_constant_sequences() {
        let ones = predictive_sample(&Constant::new(1.0).unwrap(), 50, 9).unwrap();
        assert!(ones.iter().all(|b| b.is_one()));
        let zeros = predictive_sample(&Constant::new(0.0).unwrap(), 50, 9).unwrap();
        assert!(zeros.iter().all(|b| !b.is_one()));
    }

    #[test]
    fn predictive_sample_is_seed_deterministic() {
        let f = BetaBernoulli::new(1.0, 1.0).unwrap();
        assert_eq!(
            predictive_sample(&f, 300, 5).unwrap(),
            predictive_sample(&f, 300, 5).unwrap()
        );
        assert_ne!(
            predictive_sample(&f, 300, 5).unwrap(),
            predictive_sample(&f, 300, 6).unwrap()
        );
    }

    #[test]
    fn uniform_prior_spreads_the_fraction_of_ones() {
        // Under Beta(1,1) the long-run fraction of ones converges to a
        // uniform theta: across seeds the fraction has mean about 0.5 and
        // standard deviation about 1/sqrt(12) = 0.289.
        let f = BetaBernoulli::new(1.0, 1.0).unwrap();
        let horizon = 10_000u64;
        let seeds = 500u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for s in 0..seeds {
            let sample = predictive_sample(&f, horizon, split_seed(404, s)).unwrap();
            let frac = sample.iter().filter(|b| b.is_one()).count() as f64 / horizon as f64;
            sum += frac;
            sumsq += frac * frac;
        }
        let mean = sum / seeds as f64;
        let sd = (sumsq / seeds as f64 - mean * mean).sqrt();
        assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
        assert!((sd - 0.289).abs() < 0.05, "sd {sd}");
    }

    #[test]
    fn tiny_check_is_well_formed() {
        let f = BetaBernoulli::new(1.0, 1.0).unwrap();
        let rules = vec![all_days_rule(), high_rule(), low_rule()];
        let (report, results) = dawid_mc_check_detailed(
            &f,
            &rules,
            McOptions {
                horizon: 1,
                runs: 1,
                tolerance: 0.02,
                master_seed: 3,
            },
        )
        .unwrap();
        assert_eq!(report.runs, 1);
        assert_eq!(results.len(), 1);
        for rule in &report.rules {
            // One day can never reach the minimum selected count.
            assert_eq!(rule.evaluated_runs, 0);
            assert_eq!(rule.insufficient_runs, 1);
            assert_eq!(rule.pass_fraction, None);
        }
    }

    #[test]
    fn constant_half_passes_comfortably() {
        // Hoeffding puts each run's failure probability near 1e-35 at
        // this horizon and tolerance.
        let f = Constant::new(0.5).unwrap();
        let rules = vec![all_days_rule()];
        let report = dawid_mc_check(
            &f,
            &rules,
            McOptions {
                horizon: 100_000,
                runs: 100,
                tolerance: 0.02,
                master_seed: 11,
            },
        )
        .unwrap();
        assert_eq!(report.rules[0].evaluated_runs, 100);
        assert_eq!(report.rules[0].pass_fraction, Some(1.0));
        assert!(report.rules[0].worst_abs_final_mean.unwrap() >= report.rules[0].mean_abs_final_mean.unwrap());
    }

    #[test]
    fn report_is_deterministic_and_worker_independent() {
        let f = BetaBernoulli::new(1.0, 1.0).unwrap();
        let options = McOptions {
            horizon: 2_000,
            runs: 16,
            tolerance: 0.05,
            master_seed: 21,
        };
        let rules = || vec![all_days_rule(), high_rule(), low_rule()];
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| dawid_mc_check(&f, &rules(), options))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| dawid_mc_check(&f, &rules(), options))
            .unwrap();
        assert_eq!(single, many);
        let again = dawid_mc_check(&f, &rules(), options).unwrap();
        assert_eq!(single, again);
    }
}
