//! A Bayesian forecaster is certain it will be calibrated: on data drawn
//! from its own prior, audits come back clean. The same forecaster fed
//! its own adversarial stream fails badly. Both facts, side by side.
//!
//! Run with: cargo run --release --example dawid_monte_carlo

use calibration_lab::{
    adversarial_stream, all_days_rule, audit, dawid_mc_check, high_rule, low_rule, verdict,
    BetaBernoulli, McOptions,
};

fn main() {
    let forecaster = BetaBernoulli::new(1.0, 1.0).unwrap();
    let horizon = 50_000;

    // Self-sampled runs: sequences drawn from the forecaster's prior.
    let rules = vec![all_days_rule(), high_rule(), low_rule()];
    let report = dawid_mc_check(
        &forecaster,
        &rules,
        McOptions {
            horizon,
            runs: 100,
            tolerance: 0.02,
            master_seed: 8,
        },
    )
    .unwrap();

    println!("self-sampled beta_bernoulli(1,1), horizon {horizon}, 100 runs, tolerance 0.02");
    println!(
        "{:<8} {:>10} {:>12} {:>10} {:>12}",
        "rule", "evaluated", "insufficient", "pass", "worst |mean|"
    );
    for rule in &report.rules {
        println!(
            "{:<8} {:>10} {:>12} {:>10} {:>12}",
            rule.rule,
            rule.evaluated_runs,
            rule.insufficient_runs,
            rule.pass_fraction.map_or("-".into(), |p| format!("{p:.3}")),
            rule.worst_abs_final_mean.map_or("-".into(), |w| format!("{w:.4}")),
        );
    }

    // The contrast: the same forecaster on its own adversarial stream.
    let stream = adversarial_stream(&forecaster, horizon).unwrap();
    let hostile = audit(
        &forecaster,
        stream.bits(),
        &[high_rule(), low_rule()],
        horizon,
        &[horizon],
    )
    .unwrap();
    let v = verdict(&hostile, 0.25, 100).unwrap();
    println!("\nsame forecaster on its own adversarial stream:");
    for rule in &v.rules {
        println!(
            "{:<8} count {:>6}  final mean {:>8}  status {:?}",
            rule.rule,
            rule.count,
            rule.final_mean.map_or("-".into(), |m| format!("{m:+.4}")),
            rule.status,
        );
    }
}
