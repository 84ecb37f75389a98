//! Probabilistic forecasting systems.
//!
//! A forecasting system maps the finite record of outcomes seen so far to
//! a probability that the next bit is a one. Every implementation here is
//! deterministic: equal prefixes yield bit-identical forecasts. The
//! mixed-strategy forecaster derives its daily component choice from its
//! seed and the day index alone, so it is deterministic in the same sense.
//!
//! Bayesian forecasters are represented by their one-step predictive
//! functions rather than by explicit measures on sequence space; a prior
//! is implementable here exactly when its predictive is computable from
//! running statistics of the prefix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bit, Forecast, Prefix};
use crate::rng::nth_unit;

/// Run-local incremental evaluation state for one pass over a sequence.
///
/// `next_forecast` returns the forecast for the day following the bits
/// observed so far and may be called any number of times between
/// observations; `observe` folds in the realized outcome and advances to
/// the next day.
pub trait Evaluator {
    fn next_forecast(&self) -> Result<Forecast>;
    fn observe(&mut self, bit: Bit) -> Result<()>;
}

/// A probabilistic forecasting system.
pub trait Forecaster: Send + Sync {
    /// Structured self-description; round-trips through the config schema.
    fn spec(&self) -> ForecasterSpec;

    /// Fresh evaluator positioned at the empty prefix.
    fn evaluator(&self) -> Box<dyn Evaluator + '_>;

    /// Forecast for the day after `prefix`, by replaying the prefix
    /// through a fresh evaluator.
    fn forecast(&self, prefix: &Prefix) -> Result<Forecast> {
        let mut ev = self.evaluator();
        for bit in prefix.iter() {
            ev.observe(bit)?;
        }
        ev.next_forecast()
    }
}

// ---------------------------------------------------------------------------
// Constant

/// Forecasts the same probability on every day.
#[derive(Debug, Clone)]
pub struct Constant {
    p: Forecast,
}

impl Constant {
    pub fn new(p: f64) -> Result<Constant> {
        Ok(Constant {
            p: Forecast::new(p)
                .map_err(|_| Error::config(format!("constant forecaster: p must be in [0, 1], got {p}")))?,
        })
    }
}

impl Forecaster for Constant {
    fn spec(&self) -> ForecasterSpec {
        ForecasterSpec::Constant(ConstantSpec { p: self.p.value() })
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(ConstantEval { p: self.p })
    }
}

struct ConstantEval {
    p: Forecast,
}

impl Evaluator for ConstantEval {
    fn next_forecast(&self) -> Result<Forecast> {
        Ok(self.p)
    }

    fn observe(&mut self, _bit: Bit) -> Result<()> {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Beta-Bernoulli

/// Conjugate i.i.d. Bayesian forecaster: with `s` ones in `n` observed
/// days, the day-(n+1) forecast is `(alpha + s) / (alpha + beta + n)`.
///
/// Empirical-rate forecasting is this forecaster with user-chosen
/// pseudocounts; the improper `alpha = beta = 0` case is rejected because
/// the day-1 forecast would be undefined.
#[derive(Debug, Clone)]
pub struct BetaBernoulli {
    alpha: f64,
    beta: f64,
}

impl BetaBernoulli {
    pub fn new(alpha: f64, beta: f64) -> Result<BetaBernoulli> {
        validate_beta_params("beta_bernoulli", alpha, beta)?;
        Ok(BetaBernoulli { alpha, beta })
    }
}

fn validate_beta_params(name: &str, alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("{name}: alpha must be a positive finite number, got {alpha}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::config(format!("{name}: beta must be a positive finite number, got {beta}")));
    }
    Ok(())
}

impl Forecaster for BetaBernoulli {
    fn spec(&self) -> ForecasterSpec {
        ForecasterSpec::BetaBernoulli(BetaBernoulliSpec {
            alpha: self.alpha,
            beta: self.beta,
        })
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(BetaBernoulliEval {
            alpha: self.alpha,
            beta: self.beta,
            ones: 0,
            days: 0,
        })
    }
}

struct BetaBernoulliEval {
    alpha: f64,
    beta: f64,
    ones: u64,
    days: u64,
}

impl Evaluator for BetaBernoulliEval {
    fn next_forecast(&self) -> Result<Forecast> {
        Forecast::new((self.alpha + self.ones as f64) / (self.alpha + self.beta + self.days as f64))
    }

    fn observe(&mut self, bit: Bit) -> Result<()> {
        self.ones += bit.as_u8() as u64;
        self.days += 1;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Order-1 Markov

/// Order-1 Bayesian forecaster: one Beta-Bernoulli predictive per state,
/// where the state is the previous day's bit and the counts are the
/// observed transitions out of that state. With no data for the current
/// state (including day 1) the forecast is `alpha / (alpha + beta)`.
#[derive(Debug, Clone)]
pub struct Markov {
    alpha: f64,
    beta: f64,
}

impl Markov {
    pub fn new(alpha: f64, beta: f64) -> Result<Markov> {
        validate_beta_params("markov", alpha, beta)?;
        Ok(Markov { alpha, beta })
    }
}

impl Forecaster for Markov {
    fn spec(&self) -> ForecasterSpec {
        ForecasterSpec::Markov(MarkovSpec {
            alpha: self.alpha,
            beta: self.beta,
        })
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(MarkovEval {
            alpha: self.alpha,
            beta: self.beta,
            last: None,
            transitions: [[0; 2]; 2],
        })
    }
}

struct MarkovEval {
    alpha: f64,
    beta: f64,
    last: Option<Bit>,
    /// transitions[state][next bit]
    transitions: [[u64; 2]; 2],
}

impl Evaluator for MarkovEval {
    fn next_forecast(&self) -> Result<Forecast> {
        let (ones, days) = match self.last {
            None => (0, 0),
            Some(state) => {
                let row = self.transitions[state.as_u8() as usize];
                (row[1], row[0] + row[1])
            }
        };
        Forecast::new((self.alpha + ones as f64) / (self.alpha + self.beta + days as f64))
    }

    fn observe(&mut self, bit: Bit) -> Result<()> {
        if let Some(state) = self.last {
            self.transitions[state.as_u8() as usize][bit.as_u8() as usize] += 1;
        }
        self.last = Some(bit);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Finite mixture

/// One component of a finite mixture prior.
pub struct MixtureComponent {
    pub weight: f64,
    pub forecaster: Box<dyn Forecaster>,
}

/// Finite mixture prior over component forecasting systems.
///
/// The forecast after prefix `w` is the posterior-weighted average of the
/// component forecasts, where component `i`'s posterior weight is
/// proportional to `weight_i` times its marginal likelihood of `w` (the
/// product of its one-step forecasts of the realized bits). Posterior
/// weights are tracked in log space; marginal likelihoods underflow past
/// roughly 10^3 days in linear space.
///
/// Observing a prefix that has probability zero under every component is
/// a "prior contradicted" error carrying the offending day.
pub struct Mixture {
    components: Vec<MixtureComponent>,
}

impl Mixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Mixture> {
        if components.is_empty() {
            return Err(Error::config("mixture: at least one component required"));
        }
        for (i, c) in components.iter().enumerate() {
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(Error::config(format!(
                    "mixture: component {i} weight must be a positive finite number, got {}",
                    c.weight
                )));
            }
        }
        Ok(Mixture { components })
    }
}

impl Forecaster for Mixture {
    fn spec(&self) -> ForecasterSpec {
        ForecasterSpec::Mixture(MixtureSpec {
            components: self
                .components
                .iter()
                .map(|c| WeightedComponentSpec {
                    weight: c.weight,
                    forecaster: c.forecaster.spec(),
                })
                .collect(),
        })
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(MixtureEval {
            states: self
                .components
                .iter()
                .map(|c| ComponentState {
                    eval: c.forecaster.evaluator(),
                    log_post: c.weight.ln(),
                    alive: true,
                })
                .collect(),
            day: 0,
            contradicted_at: None,
        })
    }
}

struct ComponentState<'a> {
    eval: Box<dyn Evaluator + 'a>,
    log_post: f64,
    alive: bool,
}

struct MixtureEval<'a> {
    states: Vec<ComponentState<'a>>,
    day: u64,
    contradicted_at: Option<u64>,
}

impl Evaluator for MixtureEval<'_> {
    fn next_forecast(&self) -> Result<Forecast> {
        if let Some(day) = self.contradicted_at {
            return Err(Error::PriorContradicted { day });
        }
        let max_lp = self
            .states
            .iter()
            .filter(|s| s.alive)
            .map(|s| s.log_post)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for state in self.states.iter().filter(|s| s.alive) {
            let w = (state.log_post - max_lp).exp();
            let p = state.eval.next_forecast()?;
            num += w * p.value();
            den += w;
        }
        Forecast::new((num / den).clamp(0.0, 1.0))
    }

    fn observe(&mut self, bit: Bit) -> Result<()> {
        if let Some(day) = self.contradicted_at {
            return Err(Error::PriorContradicted { day });
        }
        self.day += 1;
        let mut any_alive = false;
        for state in &mut self.states {
            if !state.alive {
                continue;
            }
            let p = state.eval.next_forecast()?.value();
            let likelihood = if bit.is_one() { p } else { 1.0 - p };
            state.log_post += likelihood.ln();
            if state.log_post.is_finite() {
                state.eval.observe(bit)?;
                any_alive = true;
            } else {
                state.alive = false;
            }
        }
        if !any_alive {
            self.contradicted_at = Some(self.day);
            return Err(Error::PriorContradicted { day: self.day });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Mixed strategy

/// Randomized forecaster that pre-commits, per day, which deterministic
/// component to follow. The day-k component index is a pure function of
/// `(seed, k)`, so the draw sequence never depends on query order and the
/// whole forecaster remains replayable.
pub struct MixedStrategy {
    components: Vec<Box<dyn Forecaster>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    seed: u64,
}

impl MixedStrategy {
    pub fn new(components: Vec<Box<dyn Forecaster>>, weights: Vec<f64>, seed: u64) -> Result<MixedStrategy> {
        if components.is_empty() {
            return Err(Error::config("mixed_strategy: at least one component required"));
        }
        if weights.len() != components.len() {
            return Err(Error::config(format!(
                "mixed_strategy: {} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(format!(
                    "mixed_strategy: weight {i} must be a nonnegative finite number, got {w}"
                )));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::config("mixed_strategy: weights must not all be zero"));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(MixedStrategy {
            components,
            weights,
            cumulative,
            seed,
        })
    }

    /// Component drawn on day `k` (1-indexed).
    pub fn component_for_day(&self, k: u64) -> usize {
        let u = nth_unit(self.seed, k);
        pick_index(&self.cumulative, u)
    }
}

fn pick_index(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

impl Forecaster for MixedStrategy {
    fn spec(&self) -> ForecasterSpec {
        ForecasterSpec::MixedStrategy(MixedStrategySpec {
            components: self.components.iter().map(|c| c.spec()).collect(),
            weights: self.weights.clone(),
            seed: self.seed,
        })
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(MixedStrategyEval {
            owner: self,
            evals: self.components.iter().map(|c| c.evaluator()).collect(),
            day: 0,
        })
    }
}

struct MixedStrategyEval<'a> {
    owner: &'a MixedStrategy,
    evals: Vec<Box<dyn Evaluator + 'a>>,
    day: u64,
}

impl Evaluator for MixedStrategyEval<'_> {
    fn next_forecast(&self) -> Result<Forecast> {
        let idx = self.owner.component_for_day(self.day + 1);
        self.evals[idx].next_forecast()
    }

    fn observe(&mut self, bit: Bit) -> Result<()> {
        for ev in &mut self.evals {
            ev.observe(bit)?;
        }
        self.day += 1;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Descriptors

/// Serializable forecaster descriptor, e.g.
/// `{"type": "beta_bernoulli", "alpha": 1, "beta": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForecasterSpec {
    Constant(ConstantSpec),
    BetaBernoulli(BetaBernoulliSpec),
    Markov(MarkovSpec),
    Mixture(MixtureSpec),
    MixedStrategy(MixedStrategySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSpec {
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaBernoulliSpec {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovSpec {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub components: Vec<WeightedComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedComponentSpec {
    pub weight: f64,
    pub forecaster: ForecasterSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedStrategySpec {
    pub components: Vec<ForecasterSpec>,
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl ForecasterSpec {
    /// Construct the described forecaster, validating all parameters.
    pub fn build(&self) -> Result<Box<dyn Forecaster>> {
        match self {
            ForecasterSpec::Constant(s) => Ok(Box::new(Constant::new(s.p)?)),
            ForecasterSpec::BetaBernoulli(s) => Ok(Box::new(BetaBernoulli::new(s.alpha, s.beta)?)),
            ForecasterSpec::Markov(s) => Ok(Box::new(Markov::new(s.alpha, s.beta)?)),
            ForecasterSpec::Mixture(s) => {
                let components = s
                    .components
                    .iter()
                    .map(|c| {
                        Ok(MixtureComponent {
                            weight: c.weight,
                            forecaster: c.forecaster.build()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Box::new(Mixture::new(components)?))
            }
            ForecasterSpec::MixedStrategy(s) => {
                let components = s
                    .components
                    .iter()
                    .map(|c| c.build())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Box::new(MixedStrategy::new(components, s.weights.clone(), s.seed)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forecast_str(f: &dyn Forecaster, prefix: &str) -> f64 {
        f.forecast(&Prefix::parse(prefix).unwrap()).unwrap().value()
    }

    #[test]
    fn constant_is_constant() {
        let f = Constant::new(0.5).unwrap();
        assert_eq!(forecast_str(&f, ""), 0.5);
        let f = Constant::new(0.9).unwrap();
        assert_eq!(forecast_str(&f, "0101"), 0.9);
    }

    #[test]
    fn constant_rejects_out_of_range() {
        assert!(Constant::new(1.5).is_err());
        assert!(Constant::new(-0.1).is_err());
    }

    #[test]
    fn beta_bernoulli_predictives() {
        let f = BetaBernoulli::new(1.0, 1.0).unwrap();
        assert_eq!(forecast_str(&f, ""), 0.5);
        assert!((forecast_str(&f, "101") - 0.6).abs() < 1e-15);
        let f = BetaBernoulli::new(2.0, 1.0).unwrap();
        assert!((forecast_str(&f, "0") - 0.5).abs() < 1e-15);
    }

    #[test]
    fn beta_bernoulli_rejects_nonpositive_params() {
        assert!(BetaBernoulli::new(0.0, 1.0).is_err());
        assert!(BetaBernoulli::new(1.0, 0.0).is_err());
        assert!(BetaBernoulli::new(0.0, 0.0).is_err());
        assert!(BetaBernoulli::new(-1.0, 1.0).is_err());
        assert!(BetaBernoulli::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn markov_predictives() {
        let f = Markov::new(1.0, 1.0).unwrap();
        assert_eq!(forecast_str(&f, ""), 0.5);
        // "11": one transition out of state 1, into 1.
        assert!((forecast_str(&f, "11") - 2.0 / 3.0).abs() < 1e-15);
        // "10": state 0 has no observed exits.
        assert_eq!(forecast_str(&f, "10"), 0.5);
    }

    fn zero_one_mixture() -> Mixture {
        Mixture::new(vec![
            MixtureComponent {
                weight: 0.5,
                forecaster: Box::new(Constant::new(0.0).unwrap()),
            },
            MixtureComponent {
                weight: 0.5,
                forecaster: Box::new(Constant::new(1.0).unwrap()),
            },
        ])
        .unwrap()
    }

    #[test]
    fn mixture_symmetric_start() {
        assert_eq!(forecast_str(&zero_one_mixture(), ""), 0.5);
    }

    #[test]
    fn mixture_posterior_collapse() {
        // After a 1, the theta=0 component has likelihood 0.
        assert_eq!(forecast_str(&zero_one_mixture(), "1"), 1.0);
    }

    #[test]
    fn mixture_prior_contradicted() {
        let f = zero_one_mixture();
        match f.forecast(&Prefix::parse("10").unwrap()) {
            Err(Error::PriorContradicted { day }) => assert_eq!(day, 2),
            other => panic!("expected prior contradiction, got {other:?}"),
        }
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        assert!(Mixture::new(vec![]).is_err());
        assert!(Mixture::new(vec![MixtureComponent {
            weight: 0.0,
            forecaster: Box::new(Constant::new(0.5).unwrap()),
        }])
        .is_err());
    }

    fn two_point_mixed(seed: u64) -> MixedStrategy {
        MixedStrategy::new(
            vec![
                Box::new(Constant::new(0.2).unwrap()),
                Box::new(Constant::new(0.8).unwrap()),
            ],
            vec![1.0, 1.0],
            seed,
        )
        .unwrap()
    }

    #[test]
    fn mixed_strategy_single_component_degenerates() {
        let single = MixedStrategy::new(
            vec![Box::new(BetaBernoulli::new(1.0, 1.0).unwrap())],
            vec![1.0],
            7,
        )
        .unwrap();
        let base = BetaBernoulli::new(1.0, 1.0).unwrap();
        for prefix in ["", "1", "101", "0010"] {
            assert_eq!(forecast_str(&single, prefix), forecast_str(&base, prefix));
        }
    }

    #[test]
    fn mixed_strategy_support() {
        let f = two_point_mixed(3);
        let mut ev = f.evaluator();
        for day in 1..=200u64 {
            let p = ev.next_forecast().unwrap().value();
            assert!(p == 0.2 || p == 0.8, "day {day}: forecast {p}");
            ev.observe(Bit::ZERO).unwrap();
        }
    }

    #[test]
    fn mixed_strategy_draw_frequencies() {
        // Equal weights: component 1 drawn on roughly half of 10^4 days.
        let f = two_point_mixed(12345);
        let mut ones = 0u64;
        for k in 1..=10_000u64 {
            if f.component_for_day(k) == 1 {
                ones += 1;
            }
        }
        let frac = ones as f64 / 10_000.0;
        assert!((0.45..=0.55).contains(&frac), "fraction {frac}");
    }

    #[test]
    fn mixed_strategy_rejects_bad_inputs() {
        assert!(MixedStrategy::new(vec![], vec![], 1).is_err());
        assert!(MixedStrategy::new(
            vec![Box::new(Constant::new(0.5).unwrap())],
            vec![0.0],
            1
        )
        .is_err());
        assert!(MixedStrategy::new(
            vec![Box::new(Constant::new(0.5).unwrap())],
            vec![1.0, 1.0],
            1
        )
        .is_err());
    }

    #[test]
    fn determinism_across_runs() {
        let specs: Vec<Box<dyn Forecaster>> = vec![
            Box::new(Constant::new(0.7).unwrap()),
            Box::new(BetaBernoulli::new(1.0, 1.0).unwrap()),
            Box::new(Markov::new(1.0, 1.0).unwrap()),
            Box::new(
                Mixture::new(vec![
                    MixtureComponent {
                        weight: 0.5,
                        forecaster: Box::new(Constant::new(0.3).unwrap()),
                    },
                    MixtureComponent {
                        weight: 0.5,
                        forecaster: Box::new(BetaBernoulli::new(1.0, 1.0).unwrap()),
                    },
                ])
                .unwrap(),
            ),
            Box::new(two_point_mixed(99)),
        ];
        for f in &specs {
            let run = |f: &dyn Forecaster| -> Vec<u64> {
                let mut ev = f.evaluator();
                let mut out = Vec::new();
                for k in 0..1000u64 {
                    out.push(ev.next_forecast().unwrap().value().to_bits());
                    ev.observe(Bit::from_u8((k % 3 == 0) as u8).unwrap()).unwrap();
                }
                out
            };
            assert_eq!(run(f.as_ref()), run(f.as_ref()));
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let f = MixedStrategy::new(
            vec![
                Box::new(Constant::new(0.2).unwrap()),
                Box::new(BetaBernoulli::new(1.0, 2.0).unwrap()),
            ],
            vec![1.0, 3.0],
            42,
        )
        .unwrap();
        let spec = f.spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ForecasterSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        back.build().unwrap();
    }

    #[test]
    fn spec_parses_tagged_form() {
        let spec: ForecasterSpec =
            serde_json::from_str(r#"{"type":"beta_bernoulli","alpha":1,"beta":1}"#).unwrap();
        assert_eq!(
            spec,
            ForecasterSpec::BetaBernoulli(BetaBernoulliSpec { alpha: 1.0, beta: 1.0 })
        );
    }

    #[test]
    fn spec_rejects_unknown_fields() {
        let r = serde_json::from_str::<ForecasterSpec>(
            r#"{"type":"beta_bernoulli","alpha":1,"beta":1,"gamma":2}"#,
        );
        assert!(r.is_err(), "unknown field must be rejected, got {r:?}");
    }

    #[test]
    fn spec_build_validates_parameters() {
        let spec: ForecasterSpec =
            serde_json::from_str(r#"{"type":"beta_bernoulli","alpha":-1,"beta":1}"#).unwrap();
        let err = match spec.build() {
            Err(e) => e,
            Ok(_) => panic!("negative alpha must be rejected"),
        };
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    // -----------------------------------------------------------------
    // Conjugacy oracle: grid integration of the posterior predictive.

    /// Posterior predictive P(next = 1 | s ones, f zeros) under a
    /// Beta(alpha, beta) prior, by Simpson integration over theta.
    fn grid_predictive(alpha: f64, beta: f64, ones: u32, zeros: u32) -> f64 {
        let n = 1 << 14;
        let h = 1.0 / n as f64;
        let density = |theta: f64| -> f64 {
            theta.powf(alpha - 1.0 + ones as f64) * (1.0 - theta).powf(beta - 1.0 + zeros as f64)
        };
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            let m = a + h / 2.0;
            let b = a + h;
            let (fa, fm, fb) = (density(a), density(m), density(b));
            den += h / 6.0 * (fa + 4.0 * fm + fb);
            num += h / 6.0 * (a * fa + 4.0 * m * fm + b * fb);
        }
        num / den
    }

    #[test]
    fn conjugacy_matches_grid_integration() {
        for (alpha, beta) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            let f = BetaBernoulli::new(alpha, beta).unwrap();
            for len in 0..=8u32 {
                for pattern in 0..(1u32 << len) {
                    let mut prefix = Prefix::new();
                    let mut ones = 0;
                    for i in 0..len {
                        let bit = (pattern >> i) & 1;
                        ones += bit;
                        prefix.push(Bit::from_u8(bit as u8).unwrap());
                    }
                    let got = f.forecast(&prefix).unwrap().value();
                    let want = grid_predictive(alpha, beta, ones, len - ones);
                    assert!(
                        (got - want).abs() < 1e-6,
                        "alpha={alpha} beta={beta} prefix={prefix}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn markov_matches_from_scratch_recount() {
        // Streaming transition counts against a naive recount per prefix.
        let f = Markov::new(1.5, 0.5).unwrap();
        let seq = Prefix::parse("1101001110100101").unwrap();
        let mut ev = f.evaluator();
        for k in 0..seq.len() {
            let streamed = ev.next_forecast().unwrap().value();
            let prefix = seq.truncated(k);
            let naive = {
                let bits = prefix.bits();
                match bits.last() {
                    None => 1.5 / 2.0,
                    Some(&state) => {
                        let mut ones = 0u64;
                        let mut total = 0u64;
                        for w in bits.windows(2) {
                            if w[0] == state {
                                total += 1;
                                ones += w[1].as_u8() as u64;
                            }
                        }
                        (1.5 + ones as f64) / (2.0 + total as f64)
                    }
                }
            };
            assert!((streamed - naive).abs() < 1e-15, "day {}", k + 1);
            ev.observe(seq.bits()[k]).unwrap();
        }
    }

    #[test]
    fn mixture_marginal_likelihood_telescopes() {
        // Product of realized one-step mixture forecasts equals the
        // weight-averaged component marginal likelihoods.
        let components: Vec<(f64, Box<dyn Forecaster>)> = vec![
            (0.25, Box::new(Constant::new(0.3).unwrap())),
            (0.5, Box::new(BetaBernoulli::new(1.0, 1.0).unwrap())),
            (0.25, Box::new(Markov::new(2.0, 1.0).unwrap())),
        ];
        let mixture = Mixture::new(
            components
                .iter()
                .map(|(w, f)| MixtureComponent {
                    weight: *w,
                    forecaster: f.spec().build().unwrap(),
                })
                .collect(),
        )
        .unwrap();
        let seq = Prefix::parse("0110100111001011").unwrap();

        let mut mixture_ml = 1.0;
        let mut ev = mixture.evaluator();
        for &bit in seq.bits() {
            let p = ev.next_forecast().unwrap().value();
            mixture_ml *= if bit.is_one() { p } else { 1.0 - p };
            ev.observe(bit).unwrap();
        }

        let mut weighted = 0.0;
        for (w, f) in &components {
            let mut ml = 1.0;
            let mut ev = f.evaluator();
            for &bit in seq.bits() {
                let p = ev.next_forecast().unwrap().value();
                ml *= if bit.is_one() { p } else { 1.0 - p };
                ev.observe(bit).unwrap();
            }
            weighted += w * ml;
        }

        let rel = (mixture_ml - weighted).abs() / weighted.abs();
        assert!(rel < 1e-12, "relative gap {rel}");
    }
}
