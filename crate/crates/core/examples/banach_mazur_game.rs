//! The alternating prefix game on binary sequences (the Banach-Mazur
//! game on Cantor space, with basic open sets named by finite strings).
//!
//! Player 1 plays whatever it likes; Player 2 appends adversarial bits
//! until the running low-mean reaches 0.25 or the running high-mean
//! reaches -0.25, then ends her turn. She succeeds on every turn, within
//! 3k+1 bits from any k-day prefix, which is what makes the set of
//! sequences where the forecaster stays high-low calibrated a meagre one.
//!
//! Run with: cargo run --example banach_mazur_game

use calibration_lab::{
    play_game, BetaBernoulli, GameOptions, Player, Prefix, PredictiveSamplerP1,
};

fn main() {
    let forecaster = BetaBernoulli::new(1.0, 1.0).unwrap();
    // The friendliest Player 1 there is: it samples from the
    // forecaster's own predictive distribution.
    let player1 = PredictiveSamplerP1::new(12, 7).unwrap();

    let transcript = play_game(&forecaster, &player1, GameOptions::new(8)).unwrap();

    println!("{:>4} {:>6} {:>6} {:>24} {:>12} {:>12}  condition", "move", "player", "bits", "string", "low mean", "high mean");
    for (i, record) in transcript.moves.iter().enumerate() {
        let string = record.mv.string.to_string();
        let shown = if string.len() > 24 {
            format!("...{}", &string[string.len() - 21..])
        } else {
            string
        };
        println!(
            "{:>4} {:>6} {:>6} {:>24} {:>12} {:>12}  {}",
            i + 1,
            match record.mv.player {
                Player::One => "1",
                Player::Two => "2",
            },
            record.mv.string.len(),
            shown,
            record.stats_after.low.mean().map_or("-".into(), |m| format!("{m:+.4}")),
            record.stats_after.high.mean().map_or("-".into(), |m| format!("{m:+.4}")),
            record
                .mv
                .condition
                .map_or(String::new(), |c| format!("{c:?}")),
        );
    }

    let sequence: Prefix = transcript.sequence();
    println!("\nrealized sequence: {} days", sequence.len());

    // Every Player-2 move ended with one bucket mean at least 0.25 from
    // zero; done forever, that defeats high-low calibration outright.
    for record in transcript.moves.iter().filter(|r| r.mv.player == Player::Two) {
        let low = record.stats_after.low.mean().unwrap_or(f64::NEG_INFINITY);
        let high = record.stats_after.high.mean().unwrap_or(f64::INFINITY);
        assert!(low >= 0.25 || high <= -0.25);
    }
}
