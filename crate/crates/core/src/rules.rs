//! Selection rules: admissible subsequence choosers.
//!
//! A rule decides whether day k joins its subsequence using only the
//! first k-1 outcomes and the day-k forecast; the interface hands it
//! nothing else, so a rule can never peek at the day's own outcome.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bit, Forecast, Prefix};

type SelectFn = dyn Fn(&Prefix, Forecast) -> bool + Send + Sync;

/// A named, admissible day-selection rule.
pub struct SelectionRule {
    name: String,
    select: Box<SelectFn>,
}

impl SelectionRule {
    /// Build a rule from an arbitrary admissible predicate. Names appear
    /// as CSV fields and so must avoid commas, quotes, and line breaks.
    pub fn custom(
        name: impl Into<String>,
        select: impl Fn(&Prefix, Forecast) -> bool + Send + Sync + 'static,
    ) -> Result<SelectionRule> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c == ',' || c == '"' || c.is_control()) {
            return Err(Error::config(format!(
                "rule name {name:?} must be nonempty and free of commas, quotes, and control characters"
            )));
        }
        Ok(SelectionRule {
            name,
            select: Box::new(select),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn selects(&self, prefix_before_day: &Prefix, forecast: Forecast) -> bool {
        (self.select)(prefix_before_day, forecast)
    }
}

impl std::fmt::Debug for SelectionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SelectionRule").field("name", &self.name).finish()
    }
}

/// Days with forecast at or above 0.5 (the tie belongs here).
pub fn high_rule() -> SelectionRule {
    SelectionRule::custom("high", |_, pi| pi.is_high()).unwrap()
}

/// Days with forecast strictly below 0.5.
pub fn low_rule() -> SelectionRule {
    SelectionRule::custom("low", |_, pi| !pi.is_high()).unwrap()
}

/// Every day.
pub fn all_days_rule() -> SelectionRule {
    SelectionRule::custom("all", |_, _| true).unwrap()
}

/// Days with forecast in `[lo, hi)`. `hi` may be at most the first float
/// above 1.0, which lets a band include forecasts equal to 1.
pub fn band_rule(lo: f64, hi: f64) -> Result<SelectionRule> {
    let max_hi = 1.0 + f64::EPSILON;
    if !(lo.is_finite() && hi.is_finite()) || !(0.0 <= lo && lo < hi && hi <= max_hi) {
        return Err(Error::config(format!(
            "band rule requires 0 <= lo < hi <= 1+ulp, got lo={lo}, hi={hi}"
        )));
    }
    SelectionRule::custom(format!("band[{lo}..{hi})"), move |_, pi| {
        lo <= pi.value() && pi.value() < hi
    })
}

/// Days whose 1-indexed day number k satisfies k = r (mod m). The day
/// number is a function of the prefix (its length plus one), so this rule
/// is admissible.
pub fn parity_rule(m: u64, r: u64) -> Result<SelectionRule> {
    if m < 1 || r >= m {
        return Err(Error::config(format!(
            "parity rule requires m >= 1 and 0 <= r < m, got m={m}, r={r}"
        )));
    }
    SelectionRule::custom(format!("day%{m}=={r}"), move |prefix, _| {
        prefix.next_day() % m == r
    })
}

/// Days whose previous outcome was `b`; never selects day 1.
pub fn prev_bit_rule(b: Bit) -> SelectionRule {
    SelectionRule::custom(format!("prev={b}"), move |prefix, _| prefix.last() == Some(b)).unwrap()
}

/// Serializable rule descriptor for the config schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RuleSpec {
    AllDays(EmptyRuleSpec),
    High(EmptyRuleSpec),
    Low(EmptyRuleSpec),
    Band(BandSpec),
    Parity(ParitySpec),
    PrevBit(PrevBitSpec),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmptyRuleSpec {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParitySpec {
    pub m: u64,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrevBitSpec {
    pub bit: u8,
}

impl RuleSpec {
    pub fn all_days() -> RuleSpec {
        RuleSpec::AllDays(EmptyRuleSpec {})
    }

    pub fn high() -> RuleSpec {
        RuleSpec::High(EmptyRuleSpec {})
    }

    pub fn low() -> RuleSpec {
        RuleSpec::Low(EmptyRuleSpec {})
    }

    pub fn build(&self) -> Result<SelectionRule> {
        match self {
            RuleSpec::AllDays(_) => Ok(all_days_rule()),
            RuleSpec::High(_) => Ok(high_rule()),
            RuleSpec::Low(_) => Ok(low_rule()),
            RuleSpec::Band(s) => band_rule(s.lo, s.hi),
            RuleSpec::Parity(s) => parity_rule(s.m, s.r),
            RuleSpec::PrevBit(s) => Ok(prev_bit_rule(Bit::from_u8(s.bit)?)),
        }
    }
}

/// Build every rule in a descriptor list, rejecting duplicate names.
pub fn build_rules(specs: &[RuleSpec]) -> Result<Vec<SelectionRule>> {
    if specs.is_empty() {
        return Err(Error::config("at least one selection rule required"));
    }
    let rules = specs.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
    for i in 1..rules.len() {
        if rules[..i].iter().any(|r| r.name() == rules[i].name()) {
            return Err(Error::config(format!("duplicate rule {:?}", rules[i].name())));
        }
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(p: f64) -> Forecast {
        Forecast::new(p).unwrap()
    }

    #[test]
    fn high_low_partition_the_tie() {
        let empty = Prefix::new();
        assert!(high_rule().selects(&empty, pf(0.5)));
        assert!(!low_rule().selects(&empty, pf(0.5)));
        assert!(low_rule().selects(&empty, pf(0.49)));
        assert!(high_rule().selects(&empty, pf(1.0)));
    }

    #[test]
    fn exactly_one_of_high_low_selects() {
        let empty = Prefix::new();
        let (high, low) = (high_rule(), low_rule());
        for i in 0..=100 {
            let pi = pf(i as f64 / 100.0);
            assert_ne!(high.selects(&empty, pi), low.selects(&empty, pi));
        }
    }

    #[test]
    fn band_includes_one_with_ulp_bound() {
        let rule = band_rule(0.9, 1.0 + f64::EPSILON).unwrap();
        let empty = Prefix::new();
        assert!(rule.selects(&empty, pf(0.95)));
        assert!(rule.selects(&empty, pf(1.0)));
        assert!(!rule.selects(&empty, pf(0.89)));
    }

    #[test]
    fn band_validates_bounds() {
        assert!(band_rule(0.5, 0.5).is_err());
        assert!(band_rule(-0.1, 0.5).is_err());
        assert!(band_rule(0.2, 1.1).is_err());
        assert!(band_rule(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn parity_even_days() {
        let rule = parity_rule(2, 0).unwrap();
        let day2 = Prefix::parse("1").unwrap();
        assert!(rule.selects(&day2, pf(0.5)));
        assert!(!rule.selects(&Prefix::new(), pf(0.5)));
        assert!(parity_rule(0, 0).is_err());
        assert!(parity_rule(2, 2).is_err());
    }

    #[test]
    fn prev_bit_skips_day_one() {
        let rule = prev_bit_rule(Bit::ONE);
        assert!(!rule.selects(&Prefix::new(), pf(0.5)));
        assert!(rule.selects(&Prefix::parse("01").unwrap(), pf(0.5)));
        assert!(!rule.selects(&Prefix::parse("10").unwrap(), pf(0.5)));
    }

    #[test]
    fn custom_rejects_csv_breaking_names() {
        assert!(SelectionRule::custom("a,b", |_, _| true).is_err());
        assert!(SelectionRule::custom("", |_, _| true).is_err());
        assert!(SelectionRule::custom("ok-name", |_, _| true).is_ok());
    }

    #[test]
    fn specs_round_trip() {
        let specs = vec![
            RuleSpec::all_days(),
            RuleSpec::high(),
            RuleSpec::Band(BandSpec { lo: 0.9, hi: 1.0 }),
            RuleSpec::Parity(ParitySpec { m: 2, r: 0 }),
            RuleSpec::PrevBit(PrevBitSpec { bit: 1 }),
        ];
        let json = serde_json::to_string(&specs).unwrap();
        let back: Vec<RuleSpec> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, specs);
        build_rules(&back).unwrap();
    }

    #[test]
    fn duplicate_rules_rejected() {
        assert!(build_rules(&[RuleSpec::high(), RuleSpec::high()]).is_err());
        assert!(build_rules(&[]).is_err());
    }
}
