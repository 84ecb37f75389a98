//! Randomizing over deterministic forecasters does not help against the
//! pointwise adversary: Nature only ever reacts to the probability
//! actually announced each day.
//!
//! The mixed strategy pre-commits its daily component choice to a seeded
//! stream indexed by the day number, so it is replayable and auditable
//! like any deterministic forecaster.
//!
//! Run with: cargo run --example mixed_strategy

use calibration_lab::{adversarial_stream, Constant, HighLowStats, MixedStrategy};

fn main() {
    let mixed = MixedStrategy::new(
        vec![
            Box::new(Constant::new(0.2).unwrap()),
            Box::new(Constant::new(0.8).unwrap()),
        ],
        vec![1.0, 1.0],
        31_337,
    )
    .unwrap();

    // Which component speaks on each of the first days is fixed by the
    // seed alone.
    let draws: Vec<usize> = (1..=20).map(|k| mixed.component_for_day(k)).collect();
    println!("component drawn on days 1..=20: {draws:?}");

    let horizon = 10_000;
    let stream = adversarial_stream(&mixed, horizon).unwrap();
    let stats = HighLowStats::from_run(&mixed, &stream).unwrap();

    println!("\nadversarial stream vs the mixed strategy, horizon {horizon}:");
    println!(
        "  low  days {:>6}  mean {:+.4}",
        stats.low.count(),
        stats.low.mean().unwrap()
    );
    println!(
        "  high days {:>6}  mean {:+.4}",
        stats.high.count(),
        stats.high.mean().unwrap()
    );

    // Same margins as for any deterministic forecaster: when the
    // announced probability is 0.2 the day is snowy (discrepancy +0.8),
    // when it is 0.8 the day is dry (discrepancy -0.8).
    assert!(stats.low.mean().unwrap() > 0.5);
    assert!(stats.high.mean().unwrap() <= -0.5);

    // Replays are bit-identical.
    let again = adversarial_stream(&mixed, horizon).unwrap();
    assert_eq!(stream, again);
    println!("\nreplay matches bit for bit");
}
