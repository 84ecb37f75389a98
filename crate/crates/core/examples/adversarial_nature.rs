//! The pointwise adversary in action: Nature makes it snow exactly when
//! the forecast probability is below 0.5, and every forecaster's
//! high/low bucket means end up pinned far from zero.
//!
//! Run with: cargo run --example adversarial_nature

use calibration_lab::{
    adversarial_stream, BetaBernoulli, Constant, Forecaster, HighLowStats, Markov,
};

fn main() {
    let horizon = 10_000;
    let forecasters: Vec<(&str, Box<dyn Forecaster>)> = vec![
        ("constant(0.7)", Box::new(Constant::new(0.7).unwrap())),
        ("constant(0.3)", Box::new(Constant::new(0.3).unwrap())),
        ("beta_bernoulli(1,1)", Box::new(BetaBernoulli::new(1.0, 1.0).unwrap())),
        ("markov(1,1)", Box::new(Markov::new(1.0, 1.0).unwrap())),
    ];

    println!("adversarial nature, horizon {horizon}");
    println!("{:<22} {:>10} {:>12} {:>10} {:>12}", "forecaster", "low days", "low mean", "high days", "high mean");
    for (name, f) in &forecasters {
        let stream = adversarial_stream(f.as_ref(), horizon).unwrap();
        let stats = HighLowStats::from_run(f.as_ref(), &stream).unwrap();
        println!(
            "{:<22} {:>10} {:>12} {:>10} {:>12}",
            name,
            stats.low.count(),
            stats.low.mean().map_or("-".into(), |m| format!("{m:+.4}")),
            stats.high.count(),
            stats.high.mean().map_or("-".into(), |m| format!("{m:+.4}")),
        );

        // The margins are structural: every low-selected day has
        // discrepancy above 0.5, every high-selected day at or below -0.5.
        if let Some(m) = stats.low.mean() {
            assert!(m > 0.5);
        }
        if let Some(m) = stats.high.mean() {
            assert!(m <= -0.5);
        }
    }

    // A peek at how the adversary toys with the uniform-prior Bayesian:
    // the first bits force the posterior mean back and forth across 0.5.
    let f = BetaBernoulli::new(1.0, 1.0).unwrap();
    let stream = adversarial_stream(&f, 16).unwrap();
    println!("\nbeta_bernoulli(1,1) first 16 adversarial bits: {stream}");
}
