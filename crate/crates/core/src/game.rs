//! The sequence-building game on binary prefixes.
//!
//! Two players alternately append nonempty finite bit strings to a shared
//! prefix, Player 1 moving first. A move stands for the basic open set of
//! all infinite sequences extending the prefix after it, so the played
//! sets nest by construction and the game realizes one infinite sequence
//! in the limit. Player 1 is arbitrary; Player 2 plays adversarial bits
//! until the cumulative low-mean reaches 0.25 or the cumulative high-mean
//! reaches -0.25, which she can force within `3 * k + 1` bits from any
//! prefix of length k. Achieving that on every one of her turns defeats
//! high-low calibration of the forecaster along the realized sequence.
//!
//! Moves are required to be nonempty: repeating the previous set is legal
//! in the abstract game but loses no generality here and guarantees
//! progress.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::adversary::{player2_extend, turn_bit_bound, HighLowStats, StopCondition};
use crate::error::{Error, Result};
use crate::forecasters::{Forecaster, ForecasterSpec};
use crate::model::{discrepancy, Bit, Prefix};
use crate::rng::nth_unit;

/// Whose move a transcript entry records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// One move: the string played and, for Player 2, the condition that
/// ended the turn.
#[derive(Debug, Clone)]
pub struct Move {
    pub player: Player,
    pub string: Prefix,
    pub condition: Option<StopCondition>,
}

/// A move plus the cumulative state right after it.
#[derive(Debug, Clone)]
pub struct MoveRecord {
    pub mv: Move,
    /// Total days played once this move is on the board.
    pub day_count_after: u64,
    pub stats_after: HighLowStats,
}

/// Full record of a played game.
#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub forecaster: ForecasterSpec,
    pub player1: Player1Spec,
    pub rounds: u64,
    pub seed: Option<u64>,
    pub moves: Vec<MoveRecord>,
}

impl GameTranscript {
    /// The realized data sequence: the moves' strings concatenated in
    /// order.
    pub fn sequence(&self) -> Prefix {
        let mut out = Prefix::new();
        for record in &self.moves {
            out.extend_from(&record.mv.string);
        }
        out
    }

    /// Serialize as JSON Lines, one record per move.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for (i, record) in self.moves.iter().enumerate() {
            let line = TranscriptLine {
                move_index: i as u64 + 1,
                player: match record.mv.player {
                    Player::One => 1,
                    Player::Two => 2,
                },
                string: record.mv.string.to_string(),
                day_count_after: record.day_count_after,
                low_count: record.stats_after.low.count(),
                low_mean: record.stats_after.low.mean(),
                high_count: record.stats_after.high.count(),
                high_mean: record.stats_after.high.mean(),
                condition: record.mv.condition,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TranscriptLine {
    move_index: u64,
    player: u8,
    string: String,
    day_count_after: u64,
    low_count: u64,
    low_mean: Option<f64>,
    high_count: u64,
    high_mean: Option<f64>,
    condition: Option<StopCondition>,
}

/// A Player 1 strategy: any rule for choosing the next nonempty string
/// from the current prefix, possibly consulting the forecaster.
pub trait Player1Strategy {
    fn spec(&self) -> Player1Spec;
    fn next_string(&self, current: &Prefix, forecaster: &dyn Forecaster) -> Result<Prefix>;
}

/// Always plays the same fixed string.
#[derive(Debug, Clone)]
pub struct FixedP1 {
    string: Prefix,
}

impl FixedP1 {
    pub fn new(string: Prefix) -> Result<FixedP1> {
        if string.is_empty() {
            return Err(Error::config("fixed player-1 string must be nonempty"));
        }
        Ok(FixedP1 { string })
    }
}

impl Player1Strategy for FixedP1 {
    fn spec(&self) -> Player1Spec {
        Player1Spec::Fixed(FixedP1Spec {
            string: self.string.to_string(),
        })
    }

    fn next_string(&self, _current: &Prefix, _forecaster: &dyn Forecaster) -> Result<Prefix> {
        Ok(self.string.clone())
    }
}

/// Plays `n` fair-coin bits per turn. The bit for global day k is a pure
/// function of `(seed, k)`, so games replay exactly.
#[derive(Debug, Clone)]
pub struct RandomP1 {
    n: u64,
    seed: u64,
}

impl RandomP1 {
    pub fn new(n: u64, seed: u64) -> Result<RandomP1> {
        if n < 1 {
            return Err(Error::config("random player 1 needs n >= 1 bits per turn"));
        }
        Ok(RandomP1 { n, seed })
    }
}

impl Player1Strategy for RandomP1 {
    fn spec(&self) -> Player1Spec {
        Player1Spec::Random(RandomP1Spec { n: self.n })
    }

    fn next_string(&self, current: &Prefix, _forecaster: &dyn Forecaster) -> Result<Prefix> {
        let mut out = Prefix::new();
        for i in 0..self.n {
            let day = current.len() as u64 + i + 1;
            out.push(Bit::from(nth_unit(self.seed, day) < 0.5));
        }
        Ok(out)
    }
}

/// Plays `n` bits per turn, each drawn with the forecaster's own
/// probability of a one: the calibration-friendliest opponent, sampling
/// from the forecaster's predictive distribution.
#[derive(Debug, Clone)]
pub struct PredictiveSamplerP1 {
    n: u64,
    seed: u64,
}

impl PredictiveSamplerP1 {
    pub fn new(n: u64, seed: u64) -> Result<PredictiveSamplerP1> {
        if n < 1 {
            return Err(Error::config(
                "predictive-sampler player 1 needs n >= 1 bits per turn",
            ));
        }
        Ok(PredictiveSamplerP1 { n, seed })
    }
}

impl Player1Strategy for PredictiveSamplerP1 {
    fn spec(&self) -> Player1Spec {
        Player1Spec::PredictiveSampler(RandomP1Spec { n: self.n })
    }

    fn next_string(&self, current: &Prefix, forecaster: &dyn Forecaster) -> Result<Prefix> {
        let mut ev = forecaster.evaluator();
        for bit in current.iter() {
            ev.observe(bit)?;
        }
        let mut out = Prefix::new();
        for i in 0..self.n {
            let day = current.len() as u64 + i + 1;
            let pi = ev.next_forecast()?;
            let bit = Bit::from(nth_unit(self.seed, day) < pi.value());
            ev.observe(bit)?;
            out.push(bit);
        }
        Ok(out)
    }
}

/// Serializable Player 1 descriptor. Seeded strategies take their seed
/// from the experiment's master seed at build time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Player1Spec {
    Fixed(FixedP1Spec),
    Random(RandomP1Spec),
    PredictiveSampler(RandomP1Spec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedP1Spec {
    pub string: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomP1Spec {
    pub n: u64,
}

impl Player1Spec {
    pub fn build(&self, seed: Option<u64>) -> Result<Box<dyn Player1Strategy>> {
        match self {
            Player1Spec::Fixed(s) => Ok(Box::new(FixedP1::new(Prefix::parse(&s.string)?)?)),
            Player1Spec::Random(s) => Ok(Box::new(RandomP1::new(
                s.n,
                seed.ok_or_else(|| Error::config("random player 1 requires a seed"))?,
            )?)),
            Player1Spec::PredictiveSampler(s) => Ok(Box::new(PredictiveSamplerP1::new(
                s.n,
                seed.ok_or_else(|| Error::config("predictive-sampler player 1 requires a seed"))?,
            )?)),
        }
    }
}

/// Game parameters.
#[derive(Debug, Clone, Copy)]
pub struct GameOptions {
    pub rounds: u64,
    /// Optional extra headroom for Player-2 turns. The effective cap per
    /// turn is never below the guaranteed bound `3 * prefix_len + 1`.
    pub cap_per_turn: Option<u64>,
    /// Recorded in the transcript for provenance.
    pub seed: Option<u64>,
}

impl GameOptions {
    pub fn new(rounds: u64) -> GameOptions {
        GameOptions {
            rounds,
            cap_per_turn: None,
            seed: None,
        }
    }
}

/// Play `rounds` full round pairs: Player 1 then Player 2, starting from
/// the empty prefix. All days are audited into the cumulative high/low
/// statistics, Player 1's included.
pub fn play_game(
    forecaster: &dyn Forecaster,
    player1: &dyn Player1Strategy,
    options: GameOptions,
) -> Result<GameTranscript> {
    if options.rounds < 1 {
        return Err(Error::config("a game needs at least one round"));
    }
    let mut prefix = Prefix::new();
    let mut ev = forecaster.evaluator();
    let mut stats = HighLowStats::new();
    let mut moves = Vec::with_capacity(2 * options.rounds as usize);

    for _ in 0..options.rounds {
        // Player 1.
        let string = player1.next_string(&prefix, forecaster)?;
        if string.is_empty() {
            return Err(Error::EmptyMove);
        }
        for bit in string.iter() {
            let day = prefix.next_day();
            let pi = ev.next_forecast().map_err(|e| day_error(e, day))?;
            stats.fold(pi, discrepancy(bit, pi));
            ev.observe(bit).map_err(|e| day_error(e, day))?;
            prefix.push(bit);
        }
        moves.push(MoveRecord {
            mv: Move {
                player: Player::One,
                string,
                condition: None,
            },
            day_count_after: prefix.len() as u64,
            stats_after: stats,
        });

        // Player 2.
        let bound = turn_bit_bound(prefix.len() as u64);
        let cap = options.cap_per_turn.map_or(bound, |c| c.max(bound));
        let turn = player2_extend(ev.as_mut(), stats, prefix.len() as u64, cap)?;
        stats = turn.stats_after;
        prefix.extend_from(&turn.extension);
        moves.push(MoveRecord {
            mv: Move {
                player: Player::Two,
                string: turn.extension,
                condition: Some(turn.condition),
            },
            day_count_after: prefix.len() as u64,
            stats_after: stats,
        });
    }

    Ok(GameTranscript {
        forecaster: forecaster.spec(),
        player1: player1.spec(),
        rounds: options.rounds,
        seed: options.seed,
        moves,
    })
}

fn day_error(err: Error, day: u64) -> Error {
    match err {
        e @ (Error::PriorContradicted { .. } | Error::InvalidForecast { .. }) => e,
        Error::Config(reason) => Error::InvalidForecast { day, reason },
        other => other,
    }
}
