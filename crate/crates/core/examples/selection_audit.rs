//! Auditing a forecaster against a family of selection rules, with
//! checkpointed means and a finite-horizon verdict.
//!
//! Run with: cargo run --example selection_audit

use calibration_lab::{
    all_days_rule, audit_traced, band_rule, default_checkpoints, high_rule, low_rule, nth_unit,
    parity_rule, prev_bit_rule, verdict, BetaBernoulli, Bit,
};

fn main() {
    // Nature: an unfair coin. Forecaster: a uniform-prior Bayesian that
    // has to learn the rate.
    let theta = 0.35;
    let horizon = 20_000u64;
    let seed = 2024;
    let outcomes: Vec<Bit> = (1..=horizon)
        .map(|k| Bit::from(nth_unit(seed, k) < theta))
        .collect();

    let forecaster = BetaBernoulli::new(1.0, 1.0).unwrap();
    let rules = vec![
        all_days_rule(),
        high_rule(),
        low_rule(),
        band_rule(0.3, 0.4).unwrap(),
        parity_rule(2, 0).unwrap(),
        prev_bit_rule(Bit::ONE),
    ];

    let (audit, trace) = audit_traced(
        &forecaster,
        &outcomes,
        &rules,
        horizon,
        &default_checkpoints(horizon),
    )
    .unwrap();

    println!("first days of the run:");
    for row in trace.iter().take(5) {
        println!(
            "  day {:>2}  bit {}  forecast {:.4}  discrepancy {:+.4}",
            row.day, row.bit, row.forecast, row.discrepancy
        );
    }

    println!("\ncheckpoint means for the all-days rule:");
    for row in audit.checkpoint_log().iter().filter(|r| r.rule == "all") {
        println!(
            "  day {:>6}  count {:>6}  mean {}",
            row.day,
            row.count,
            row.mean.map_or("-".into(), |m| format!("{m:+.5}")),
        );
    }

    let v = verdict(&audit, 0.02, 100).unwrap();
    println!("\nverdict at tolerance 0.02, burn-in 100 selected days:");
    for rule in &v.rules {
        println!(
            "  {:<14} count {:>6}  final mean {:>9}  status {:?}",
            rule.rule,
            rule.count,
            rule.final_mean.map_or("-".into(), |m| format!("{m:+.5}")),
            rule.status,
        );
    }
}
