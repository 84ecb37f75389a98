//! Calibration auditing: mean discrepancy over each rule's selected days.
//!
//! An audit runs a forecaster down an outcome sequence day by day, folds
//! each day's discrepancy into the statistics of every rule that selects
//! the day, and records per-rule `(count, mean)` checkpoints. Verdicts
//! summarize an audit at a finite horizon: they report consistency with
//! calibration, never calibration itself, which is a statement about
//! limits that no finite run can certify.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecasters::Forecaster;
use crate::model::{discrepancy, Bit, BucketStats, Forecast, Prefix};
use crate::rules::SelectionRule;

/// One day of a run: what was forecast and what happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub day: u64,
    pub bit: Bit,
    pub forecast: f64,
    pub discrepancy: f64,
}

/// Per-rule `(count, mean)` snapshot at a checkpoint day.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub day: u64,
    pub rule: String,
    pub count: u64,
    pub mean: Option<f64>,
}

/// Completed audit: final per-rule statistics plus the checkpoint log.
#[derive(Debug, Clone)]
pub struct CalibrationAudit {
    horizon: u64,
    rule_names: Vec<String>,
    finals: Vec<BucketStats>,
    log: Vec<CheckpointRow>,
}

impl CalibrationAudit {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn rule_names(&self) -> &[String] {
        &self.rule_names
    }

    pub fn final_stats(&self) -> &[BucketStats] {
        &self.finals
    }

    pub fn final_stats_for(&self, rule: &str) -> Option<&BucketStats> {
        self.rule_names
            .iter()
            .position(|n| n == rule)
            .map(|i| &self.finals[i])
    }

    /// Checkpoint rows, day-major and in rule order within a day.
    pub fn checkpoint_log(&self) -> &[CheckpointRow] {
        &self.log
    }
}

/// Every power of two up to the horizon, plus the horizon itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut days = Vec::new();
    let mut d = 1u64;
    while d <= horizon {
        days.push(d);
        match d.checked_mul(2) {
            Some(next) => d = next,
            None => break,
        }
    }
    if days.last() != Some(&horizon) {
        days.push(horizon);
    }
    days
}

fn validate_checkpoints(checkpoints: &[u64], horizon: u64) -> Result<Vec<u64>> {
    let mut days = checkpoints.to_vec();
    for w in days.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::config(format!(
                "checkpoint days must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let (Some(&first), Some(&last)) = (days.first(), days.last()) {
        if first < 1 || last > horizon {
            return Err(Error::config(format!(
                "checkpoint days must lie in 1..={horizon}"
            )));
        }
    }
    // The final horizon is always checkpointed so that final means are
    // part of the log.
    if days.last() != Some(&horizon) {
        days.push(horizon);
    }
    Ok(days)
}

/// Audit a forecaster against a recorded outcome sequence.
///
/// The forecaster is queried exactly once per day; every rule sees only
/// the prefix before the day and the day's forecast.
pub fn audit(
    forecaster: &dyn Forecaster,
    outcomes: &[Bit],
    rules: &[SelectionRule],
    horizon: u64,
    checkpoints: &[u64],
) -> Result<CalibrationAudit> {
    let mut ev = forecaster.evaluator();
    let forecast_for_day = move |_: &Prefix, bit: Bit| -> Result<Forecast> {
        let pi = ev.next_forecast()?;
        ev.observe(bit)?;
        Ok(pi)
    };
    Ok(audit_impl(forecast_for_day, outcomes, rules, horizon, checkpoints, false)?.0)
}

/// Like [`audit`], additionally returning the full day-level trace.
pub fn audit_traced(
    forecaster: &dyn Forecaster,
    outcomes: &[Bit],
    rules: &[SelectionRule],
    horizon: u64,
    checkpoints: &[u64],
) -> Result<(CalibrationAudit, Vec<TraceRow>)> {
    let mut ev = forecaster.evaluator();
    let forecast_for_day = move |_: &Prefix, bit: Bit| -> Result<Forecast> {
        let pi = ev.next_forecast()?;
        ev.observe(bit)?;
        Ok(pi)
    };
    let (audit, trace) = audit_impl(forecast_for_day, outcomes, rules, horizon, checkpoints, true)?;
    Ok((audit, trace.expect("trace requested")))
}

/// Audit recorded (forecast, outcome) pairs from an external source. The
/// source forecaster is a black box; discrepancies are recomputed from
/// its recorded forecasts, which is admissible because rules only need
/// the prefix and the forecast.
pub fn audit_recorded(
    forecasts: &[f64],
    outcomes: &[Bit],
    rules: &[SelectionRule],
    checkpoints: &[u64],
) -> Result<CalibrationAudit> {
    if forecasts.len() != outcomes.len() {
        return Err(Error::config(format!(
            "{} forecasts for {} outcomes",
            forecasts.len(),
            outcomes.len()
        )));
    }
    let horizon = forecasts.len() as u64;
    let forecast_for_day = |prefix: &Prefix, _: Bit| -> Result<Forecast> {
        let p = forecasts[prefix.len()];
        Forecast::new(p).map_err(|_| Error::InvalidForecast {
            day: prefix.next_day(),
            reason: format!("recorded forecast {p} outside [0, 1]"),
        })
    };
    Ok(audit_impl(forecast_for_day, outcomes, rules, horizon, checkpoints, false)?.0)
}

fn audit_impl(
    mut forecast_for_day: impl FnMut(&Prefix, Bit) -> Result<Forecast>,
    outcomes: &[Bit],
    rules: &[SelectionRule],
    horizon: u64,
    checkpoints: &[u64],
    want_trace: bool,
) -> Result<(CalibrationAudit, Option<Vec<TraceRow>>)> {
    if horizon < 1 {
        return Err(Error::config("horizon must be at least 1"));
    }
    if rules.is_empty() {
        return Err(Error::config("at least one selection rule required"));
    }
    if (outcomes.len() as u64) < horizon {
        return Err(Error::OutcomesExhausted {
            needed: horizon,
            got: outcomes.len() as u64,
        });
    }
    let checkpoints = validate_checkpoints(checkpoints, horizon)?;

    let mut prefix = Prefix::with_capacity(horizon as usize);
    let mut stats = vec![BucketStats::new(); rules.len()];
    let mut log = Vec::with_capacity(checkpoints.len() * rules.len());
    let mut trace = want_trace.then(|| Vec::with_capacity(horizon as usize));
    let mut next_cp = checkpoints.iter().copied().peekable();

    for day in 1..=horizon {
        let bit = outcomes[(day - 1) as usize];
        let pi = forecast_for_day(&prefix, bit).map_err(|e| at_day(e, day))?;
        let d = discrepancy(bit, pi);
        for (rule, bucket) in rules.iter().zip(stats.iter_mut()) {
            if rule.selects(&prefix, pi) {
                bucket.update(d);
            }
        }
        prefix.push(bit);
        if let Some(rows) = trace.as_mut() {
            rows.push(TraceRow {
                day,
                bit,
                forecast: pi.value(),
                discrepancy: d,
            });
        }
        if next_cp.peek() == Some(&day) {
            next_cp.next();
            for (rule, bucket) in rules.iter().zip(stats.iter()) {
                log.push(CheckpointRow {
                    day,
                    rule: rule.name().to_string(),
                    count: bucket.count(),
                    mean: bucket.mean(),
                });
            }
        }
    }

    Ok((
        CalibrationAudit {
            horizon,
            rule_names: rules.iter().map(|r| r.name().to_string()).collect(),
            finals: stats,
            log,
        },
        trace,
    ))
}

/// Give day context to errors coming out of an evaluator.
fn at_day(err: Error, day: u64) -> Error {
    match err {
        e @ (Error::PriorContradicted { .. } | Error::InvalidForecast { .. }) => e,
        Error::Config(reason) => Error::InvalidForecast { day, reason },
        other => other,
    }
}

/// Finite-horizon reading of an audit, per rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleStatus {
    /// Every informative checkpoint mean stayed inside the tolerance.
    ConsistentWithCalibration,
    /// Some checkpoint past burn-in had |mean| at or above the tolerance.
    Violation,
    /// Fewer selected days than the burn-in; no verdict.
    InsufficientData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleVerdict {
    pub rule: String,
    pub count: u64,
    pub final_mean: Option<f64>,
    /// Largest |checkpoint mean| among checkpoints where the rule had at
    /// least `burn_in` selected days.
    pub max_abs_mean_past_burn_in: Option<f64>,
    pub status: RuleStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub horizon: u64,
    pub tolerance: f64,
    pub burn_in: u64,
    pub rules: Vec<RuleVerdict>,
}

/// Summarize an audit: a rule with fewer than `burn_in` selected days is
/// insufficient-data; otherwise it is a violation exactly when some
/// checkpoint past burn-in has |mean| at or above `tolerance`.
pub fn verdict(audit: &CalibrationAudit, tolerance: f64, burn_in: u64) -> Result<AuditVerdict> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::config(format!(
            "tolerance must be a positive finite number, got {tolerance}"
        )));
    }
    let rules = audit
        .rule_names
        .iter()
        .zip(audit.finals.iter())
        .map(|(name, stats)| {
            let tail_max = audit
                .log
                .iter()
                .filter(|row| &row.rule == name && row.count >= burn_in)
                .filter_map(|row| row.mean.map(f64::abs))
                .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.max(m))));
            let status = if stats.count() < burn_in {
                RuleStatus::InsufficientData
            } else if tail_max.is_some_and(|m| m >= tolerance) {
                RuleStatus::Violation
            } else {
                RuleStatus::ConsistentWithCalibration
            };
            RuleVerdict {
                rule: name.clone(),
                count: stats.count(),
                final_mean: stats.mean(),
                max_abs_mean_past_burn_in: tail_max,
                status,
            }
        })
        .collect();
    Ok(AuditVerdict {
        horizon: audit.horizon,
        tolerance,
        burn_in,
        rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecasters::{Constant, ForecasterSpec};
    use crate::model::Forecast;
    use crate::rules::{all_days_rule, high_rule, low_rule, SelectionRule};

    fn bits(s: &str) -> Vec<Bit> {
        Prefix::parse(s).unwrap().bits().to_vec()
    }

    #[test]
    fn audit_direct_summation_example() {
        let f = Constant::new(0.7).unwrap();
        let audit = audit(&f, &bits("10"), &[all_days_rule()], 2, &[1, 2]).unwrap();
        let stats = &audit.final_stats()[0];
        assert_eq!(stats.count(), 2);
        // Discrepancies 0.3 and -0.7 sum to -0.4.
        assert!((stats.sum() + 0.4).abs() < 1e-12);
        assert!((stats.mean().unwrap() + 0.2).abs() < 1e-12);
    }

    #[test]
    fn low_rule_never_fires_for_high_constant() {
        let f = Constant::new(0.7).unwrap();
        let audit = audit(&f, &bits("110010"), &[low_rule()], 6, &[6]).unwrap();
        assert_eq!(audit.final_stats()[0].count(), 0);
        assert_eq!(audit.final_stats()[0].mean(), None);
    }

    /// Test double with perfect hindsight: its "forecast" for day k is
    /// the day-k outcome itself, wired in from the known stream. The
    /// descriptor is a placeholder; nothing here reads it.
    struct Hindsight(Vec<Bit>);

    impl Forecaster for Hindsight {
        fn spec(&self) -> ForecasterSpec {
            ForecasterSpec::Constant(crate::forecasters::ConstantSpec { p: 0.0 })
        }

        fn evaluator(&self) -> Box<dyn crate::forecasters::Evaluator + '_> {
            struct Eval<'a> {
                outcomes: &'a [Bit],
                day: usize,
            }
            impl crate::forecasters::Evaluator for Eval<'_> {
                fn next_forecast(&self) -> Result<Forecast> {
                    Forecast::new(self.outcomes[self.day].as_f64())
                }
                fn observe(&mut self, _bit: Bit) -> Result<()> {
                    self.day += 1;
                    Ok(())
                }
            }
            Box::new(Eval {
                outcomes: &self.0,
                day: 0,
            })
        }
    }

    #[test]
    fn perfect_hindsight_means_are_zero() {
        let outcomes = bits("1101001011");
        let f = Hindsight(outcomes.clone());
        let rules = vec![all_days_rule(), high_rule(), low_rule()];
        let audit = audit(&f, &outcomes, &rules, 10, &[10]).unwrap();
        for stats in audit.final_stats() {
            if stats.count() > 0 {
                assert_eq!(stats.mean(), Some(0.0));
            }
        }
    }

    #[test]
    fn exhausted_outcomes_error() {
        let f = Constant::new(0.5).unwrap();
        match audit(&f, &bits("10"), &[all_days_rule()], 5, &[5]) {
            Err(Error::OutcomesExhausted { needed: 5, got: 2 }) => {}
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn checkpoint_counts_monotone_and_means_bounded() {
        let f = Constant::new(0.3).unwrap();
        let audit = audit(
            &f,
            &bits("110100101101010011"),
            &[all_days_rule(), low_rule()],
            18,
            &default_checkpoints(18),
        )
        .unwrap();
        for name in audit.rule_names() {
            let mut prev = 0;
            for row in audit.checkpoint_log().iter().filter(|r| &r.rule == name) {
                assert!(row.count >= prev);
                prev = row.count;
                if let Some(m) = row.mean {
                    assert!(m.abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn default_checkpoints_powers_of_two() {
        assert_eq!(default_checkpoints(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(default_checkpoints(8), vec![1, 2, 4, 8]);
        assert_eq!(default_checkpoints(1), vec![1]);
    }

    #[test]
    fn audit_prefix_consistency() {
        // An audit of the first half of a doubled run matches the audit
        // at the shorter horizon, checkpoint for checkpoint.
        let f = crate::forecasters::BetaBernoulli::new(1.0, 1.0).unwrap();
        let outcomes = bits("11010010110101001101001011010100");
        let rules = || vec![all_days_rule(), high_rule(), low_rule()];
        let short = audit(&f, &outcomes[..16], &rules(), 16, &default_checkpoints(16)).unwrap();
        let long = audit(&f, &outcomes, &rules(), 32, &default_checkpoints(32)).unwrap();
        for row in short.checkpoint_log() {
            let twin = long
                .checkpoint_log()
                .iter()
                .find(|r| r.day == row.day && r.rule == row.rule)
                .unwrap();
            assert_eq!(twin.count, row.count);
            assert_eq!(twin.mean, row.mean);
        }
    }

    #[test]
    fn rules_cannot_see_the_current_outcome() {
        // Two streams sharing the first k-1 bits but differing at day k
        // must produce identical day-k selections for any rule.
        let f = Constant::new(0.5).unwrap();
        let rule = || {
            SelectionRule::custom("probe", |prefix: &Prefix, pi: Forecast| {
                (prefix.len() as u64 + prefix.bits().iter().map(|b| b.as_u8() as u64).sum::<u64>())
                    .is_multiple_of(2)
                    && pi.value() >= 0.25
            })
            .unwrap()
        };
        let a = bits("1010");
        let b = bits("1011"); // differs only at day 4
        let audit_a = audit(&f, &a, &[rule()], 4, &[3, 4]).unwrap();
        let audit_b = audit(&f, &b, &[rule()], 4, &[3, 4]).unwrap();
        let count = |au: &CalibrationAudit, day| {
            au.checkpoint_log()
                .iter()
                .find(|r| r.day == day)
                .unwrap()
                .count
        };
        // Selection of day 4 happened before its outcome differed.
        assert_eq!(
            count(&audit_a, 4) - count(&audit_a, 3),
            count(&audit_b, 4) - count(&audit_b, 3)
        );
    }

    #[test]
    fn verdict_statuses() {
        let f = Constant::new(0.5).unwrap();
        let outcomes: Vec<Bit> = (0..200).map(|i| Bit::from_u8((i % 2) as u8).unwrap()).collect();
        let rules = vec![all_days_rule(), low_rule()];
        let audit = audit(&f, &outcomes, &rules, 200, &default_checkpoints(200)).unwrap();
        let v = verdict(&audit, 0.25, 100).unwrap();
        // Alternating outcomes against 0.5: means hover near zero.
        assert_eq!(v.rules[0].status, RuleStatus::ConsistentWithCalibration);
        // The low rule never selects: insufficient data.
        assert_eq!(v.rules[1].status, RuleStatus::InsufficientData);
        assert_eq!(v.rules[1].count, 0);
        assert!(verdict(&audit, 0.0, 100).is_err());
    }

    #[test]
    fn verdict_flags_violation() {
        // Constant 0.9 against all-zero outcomes: mean discrepancy -0.9.
        let f = Constant::new(0.9).unwrap();
        let outcomes = vec![Bit::ZERO; 150];
        let audit = audit(&f, &outcomes, &[high_rule()], 150, &default_checkpoints(150)).unwrap();
        let v = verdict(&audit, 0.25, 100).unwrap();
        assert_eq!(v.rules[0].status, RuleStatus::Violation);
        assert!((v.rules[0].final_mean.unwrap() + 0.9).abs() < 1e-12);
    }
}
