//! Nature strategies that defeat high-low calibration.
//!
//! The pointwise adversary makes a day snowy exactly when the forecast
//! probability is below 0.5. Every low-selected day then has discrepancy
//! above 0.5 and every high-selected day has discrepancy at or below
//! -0.5, so whichever bucket is nonempty carries a mean far from zero.
//!
//! The same bit rule drives Player 2's turns in the sequence game: she
//! extends the prefix with adversarial bits until the cumulative low-mean
//! reaches 0.25 or the cumulative high-mean reaches -0.25. Both stopping
//! thresholds are inclusive; turns that end at exactly 0.25 in magnitude
//! still defeat convergence when achieved again and again.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecasters::{Evaluator, Forecaster};
use crate::model::{discrepancy, Bit, BucketStats, Forecast, Prefix};

/// The adversarial outcome for a day: snow exactly when the forecast
/// probability is below 0.5.
#[inline]
pub fn oakes_dawid_bit(forecast: Forecast) -> Bit {
    if forecast.value() < 0.5 {
        Bit::ONE
    } else {
        Bit::ZERO
    }
}

/// Play the pointwise adversary against a forecaster for `horizon` days,
/// feeding each day's bit back into the forecaster's own data stream.
pub fn adversarial_stream(forecaster: &dyn Forecaster, horizon: u64) -> Result<Prefix> {
    if horizon < 1 {
        return Err(Error::config("horizon must be at least 1"));
    }
    let mut ev = forecaster.evaluator();
    let mut out = Prefix::with_capacity(horizon as usize);
    for day in 1..=horizon {
        let pi = ev.next_forecast().map_err(|e| stamp_day(e, day))?;
        let bit = oakes_dawid_bit(pi);
        ev.observe(bit).map_err(|e| stamp_day(e, day))?;
        out.push(bit);
    }
    Ok(out)
}

fn stamp_day(err: Error, day: u64) -> Error {
    match err {
        e @ (Error::PriorContradicted { .. } | Error::InvalidForecast { .. }) => e,
        Error::Config(reason) => Error::InvalidForecast { day, reason },
        other => other,
    }
}

/// Cumulative high/low bucket statistics for one realized sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HighLowStats {
    pub high: BucketStats,
    pub low: BucketStats,
}

impl HighLowStats {
    pub fn new() -> HighLowStats {
        HighLowStats::default()
    }

    /// Fold a day into the bucket its forecast selects.
    #[inline]
    pub fn fold(&mut self, forecast: Forecast, d: f64) {
        if forecast.is_high() {
            self.high.update(d);
        } else {
            self.low.update(d);
        }
    }

    /// Recompute the statistics of a forecaster along a prefix from
    /// scratch.
    pub fn from_run(forecaster: &dyn Forecaster, prefix: &Prefix) -> Result<HighLowStats> {
        let mut ev = forecaster.evaluator();
        let mut stats = HighLowStats::new();
        for (i, bit) in prefix.iter().enumerate() {
            let pi = ev.next_forecast().map_err(|e| stamp_day(e, i as u64 + 1))?;
            stats.fold(pi, discrepancy(bit, pi));
            ev.observe(bit).map_err(|e| stamp_day(e, i as u64 + 1))?;
        }
        Ok(stats)
    }
}

/// Which stopping inequality ended a Player-2 turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopCondition {
    /// Mean discrepancy over low-forecast days reached 0.25.
    #[serde(rename = "low_mean_ge_0.25")]
    LowMeanHit,
    /// Mean discrepancy over high-forecast days reached -0.25.
    #[serde(rename = "high_mean_le_-0.25")]
    HighMeanHit,
}

/// Result of one Player-2 turn.
#[derive(Debug, Clone)]
pub struct TurnOutcome {
    /// Bits appended this turn; always nonempty.
    pub extension: Prefix,
    /// The inequality that held at the final bit.
    pub condition: StopCondition,
    /// Cumulative high/low statistics after the turn.
    pub stats_after: HighLowStats,
    pub bits_used: u64,
}

/// Check the two stopping inequalities, low side first. Either requires
/// at least one selected day: a vacuous mean never fires.
fn fired(stats: &HighLowStats) -> Option<StopCondition> {
    if stats.low.mean().is_some_and(|m| m >= 0.25) {
        return Some(StopCondition::LowMeanHit);
    }
    if stats.high.mean().is_some_and(|m| m <= -0.25) {
        return Some(StopCondition::HighMeanHit);
    }
    None
}

/// Extend an in-flight run with adversarial bits until a stopping
/// condition holds, checking after every appended bit.
///
/// The caller's evaluator must already have observed the whole current
/// prefix; `stats` must be the true cumulative statistics along it.
pub(crate) fn player2_extend(
    ev: &mut dyn Evaluator,
    mut stats: HighLowStats,
    prefix_len: u64,
    cap: u64,
) -> Result<TurnOutcome> {
    let mut extension = Prefix::new();
    loop {
        if extension.len() as u64 >= cap {
            return Err(Error::CapExceeded { cap, prefix_len });
        }
        let day = prefix_len + extension.len() as u64 + 1;
        let pi = ev.next_forecast().map_err(|e| stamp_day(e, day))?;
        let bit = oakes_dawid_bit(pi);
        stats.fold(pi, discrepancy(bit, pi));
        ev.observe(bit).map_err(|e| stamp_day(e, day))?;
        extension.push(bit);
        if let Some(condition) = fired(&stats) {
            return Ok(TurnOutcome {
                bits_used: extension.len() as u64,
                extension,
                condition,
                stats_after: stats,
            });
        }
    }
}

/// Play one Player-2 turn from `current_prefix`.
///
/// Each appended bit is adversarial for its own day (1 when the forecast
/// is below 0.5, else 0); the turn ends at the first bit after which the
/// low-mean is at least 0.25 or the high-mean is at most -0.25. Old
/// low-day discrepancies exceed -0.5 and new ones exceed 0.5, so the low
/// side fires within 3 times its old count; symmetrically for the high
/// side; every appended bit feeds one of the two, which bounds the turn
/// by `3 * current_prefix.len() + 1` bits. `cap` must be at least that
/// bound; running past `cap` means the inputs were corrupted.
pub fn player2_turn(
    forecaster: &dyn Forecaster,
    current_prefix: &Prefix,
    stats: HighLowStats,
    cap: u64,
) -> Result<TurnOutcome> {
    let bound = turn_bit_bound(current_prefix.len() as u64);
    if cap < bound {
        return Err(Error::config(format!(
            "cap {cap} is below the termination bound {bound} for a prefix of length {}",
            current_prefix.len()
        )));
    }
    let mut ev = forecaster.evaluator();
    let mut replayed = HighLowStats::new();
    for (i, bit) in current_prefix.iter().enumerate() {
        let pi = ev.next_forecast().map_err(|e| stamp_day(e, i as u64 + 1))?;
        replayed.fold(pi, discrepancy(bit, pi));
        ev.observe(bit).map_err(|e| stamp_day(e, i as u64 + 1))?;
    }
    debug_assert_eq!(
        replayed, stats,
        "caller-supplied bucket statistics disagree with a from-scratch recount"
    );
    player2_extend(ev.as_mut(), stats, current_prefix.len() as u64, cap)
}

/// Guaranteed-sufficient bit budget for a Player-2 turn starting from a
/// prefix of length `prefix_len`.
pub fn turn_bit_bound(prefix_len: u64) -> u64 {
    3 * prefix_len + 1
}
