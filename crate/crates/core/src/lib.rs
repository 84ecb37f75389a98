//! A simulation laboratory for sequential probabilistic forecasting of
//! binary sequences.
//!
//! Nature reveals an infinite binary sequence one bit at a time; a
//! forecasting system announces, each day, a probability that the next
//! bit is a one. The day's *discrepancy* is the outcome minus that
//! probability, and a forecaster is *calibrated* with respect to a
//! selection rule when the mean discrepancy over the rule's selected
//! days tends to zero. This crate makes the constructive side of that
//! story runnable:
//!
//! - [`forecasters`] — forecasting systems: constants, conjugate
//!   Beta-Bernoulli and order-1 Markov Bayesians, finite mixtures, and
//!   seeded mixed strategies.
//! - [`rules`] / [`audit`] — admissible selection rules (all days, high
//!   and low forecasts, bands, day parities, previous-bit) and the
//!   calibration auditor with checkpointed means and finite-horizon
//!   verdicts.
//! - [`adversary`] — the pointwise adversary that makes it snow exactly
//!   when the forecast is below 0.5, defeating high-low calibration of
//!   any forecaster on the sequence it builds, plus the bounded Player-2
//!   turn built from the same bit rule.
//! - [`game`] — the alternating prefix game on binary sequences (the
//!   Banach-Mazur game on Cantor space, with basic open sets named by
//!   finite strings). Player 2's strategy ends every one of her turns
//!   with a bucket mean at least 0.25 away from zero, witnessing that
//!   the sequences on which a fixed forecaster stays high-low calibrated
//!   form a meagre set.
//! - [`mc`] — Monte Carlo checks that a Bayesian forecaster looks
//!   calibrated on data sampled from its own prior, at finite horizon
//!   and over a finite rule family.
//! - [`config`] / [`experiment`] / [`cli`] — a strict JSON experiment
//!   schema and the file-producing commands behind the `calibration-lab`
//!   binary.
//!
//! Everything is deterministic given the config: one pinned SplitMix64
//! generator ([`rng`]) supplies all randomness through seeds and
//! counter-addressed streams, so reruns are byte-identical and parallel
//! Monte Carlo runs are independent of worker count.
//!
//! ```
//! use calibration_lab::{adversarial_stream, BetaBernoulli, HighLowStats};
//!
//! let forecaster = BetaBernoulli::new(1.0, 1.0).unwrap();
//! let sequence = adversarial_stream(&forecaster, 1000).unwrap();
//! let stats = HighLowStats::from_run(&forecaster, &sequence).unwrap();
//! assert!(stats.low.mean().unwrap() > 0.5);
//! assert!(stats.high.mean().unwrap() <= -0.5);
//! ```

pub mod adversary;
pub mod audit;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod forecasters;
pub mod game;
pub mod mc;
pub mod model;
pub mod rng;
pub mod rules;
pub mod trace;

pub use adversary::{
    adversarial_stream, oakes_dawid_bit, player2_turn, turn_bit_bound, HighLowStats,
    StopCondition, TurnOutcome,
};
pub use audit::{
    audit, audit_recorded, audit_traced, default_checkpoints, verdict, AuditVerdict,
    CalibrationAudit, CheckpointRow, RuleStatus, RuleVerdict, TraceRow,
};
pub use config::{load_config, ExperimentConfig, GameSection, LoadedConfig, NatureSpec};
pub use error::{Error, Result};
pub use forecasters::{
    BetaBernoulli, Constant, Evaluator, Forecaster, ForecasterSpec, Markov, MixedStrategy,
    Mixture, MixtureComponent,
};
pub use game::{
    play_game, FixedP1, GameOptions, GameTranscript, Move, MoveRecord, Player, Player1Spec,
    Player1Strategy, PredictiveSamplerP1, RandomP1,
};
pub use mc::{
    dawid_mc_check, dawid_mc_check_detailed, predictive_sample, McOptions, McReport,
    McRuleReport, RunResult, MIN_SELECTED_DAYS,
};
pub use model::{discrepancy, Bit, BucketStats, Forecast, Prefix};
pub use rng::{nth_u64, nth_unit, split_seed, SplitMix64};
pub use rules::{
    all_days_rule, band_rule, build_rules, high_rule, low_rule, parity_rule, prev_bit_rule,
    RuleSpec, SelectionRule,
};
pub use trace::ExternalTrace;
