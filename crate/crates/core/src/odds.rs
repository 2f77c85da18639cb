//! Odds representations and the two-outcome revenue scheme.
//!
//! Everything here is normalised to a $1 stake: the house receives $1 when the
//! event does not happen and pays the scheme's `payout` when it does.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OddsError {
    #[error("probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("probability {0} is degenerate here (must lie strictly between 0 and 1)")]
    DegenerateProbability(f64),
    #[error("decimal odds must be finite and greater than 1, got {0}")]
    InvalidDecimal(f64),
    #[error("fractional odds must be finite and non-negative, got {0}")]
    InvalidFractional(f64),
    #[error("margin must be finite and non-negative, got {0}")]
    InvalidMargin(f64),
    #[error("margin {epsilon} exceeds the fair payout {fair_payout}; the house would pay a negative amount")]
    MarginTooLarge { epsilon: f64, fair_payout: f64 },
    #[error("payout must be finite and non-negative, got {0}")]
    InvalidPayout(f64),
}

/// A probability in the closed unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self, OddsError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(OddsError::ProbabilityOutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

/// Total payout per unit stake, stake included. Always strictly above 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DecimalOdds(f64);

impl DecimalOdds {
    pub fn new(value: f64) -> Result<Self, OddsError> {
        if value.is_finite() && value > 1.0 {
            Ok(Self(value))
        } else {
            Err(OddsError::InvalidDecimal(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Net payout per unit stake.
    pub fn to_fractional(self) -> FractionalOdds {
        FractionalOdds(self.0 - 1.0)
    }
}

/// Net payout per unit stake.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FractionalOdds(f64);

impl FractionalOdds {
    pub fn new(value: f64) -> Result<Self, OddsError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(OddsError::InvalidFractional(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The house's revenue on a $1 bet: it pays `payout` with probability
/// `win_prob` and receives $1 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoOutcomeScheme {
    win_prob: Probability,
    payout: f64,
}

impl TwoOutcomeScheme {
    /// Amount the house receives when the event does not happen.
    pub const RECEIVE: f64 = 1.0;

    pub fn new(win_prob: Probability, payout: f64) -> Result<Self, OddsError> {
        if !payout.is_finite() || payout < 0.0 {
            return Err(OddsError::InvalidPayout(payout));
        }
        Ok(Self { win_prob, payout })
    }

    pub fn win_prob(&self) -> Probability {
        self.win_prob
    }

    pub fn payout(&self) -> f64 {
        self.payout
    }

    pub fn receive(&self) -> f64 {
        Self::RECEIVE
    }

    /// House revenue for a single play.
    pub fn house_revenue(&self, event_happened: bool) -> f64 {
        if event_happened {
            -self.payout
        } else {
            Self::RECEIVE
        }
    }

    /// Player revenue for a single play; the exact negation of the house's.
    pub fn player_revenue(&self, event_happened: bool) -> f64 {
        -self.house_revenue(event_happened)
    }
}

fn open_unit(p: Probability) -> Result<f64, OddsError> {
    let v = p.value();
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(OddsError::DegenerateProbability(v))
    }
}

/// Probability at which the given decimal odds would be fair.
pub fn implied_probability(d: DecimalOdds) -> Probability {
    Probability(1.0 / d.value())
}

/// Checked variant for raw numbers, e.g. straight from a data file.
pub fn implied_probability_of(decimal: f64) -> Result<Probability, OddsError> {
    DecimalOdds::new(decimal).map(implied_probability)
}

pub fn to_decimal_odds(p: Probability) -> Result<DecimalOdds, OddsError> {
    let v = open_unit(p)?;
    DecimalOdds::new(1.0 / v)
}

/// Net payout `1/p - 1` that makes a bet on an event of probability `p` fair.
pub fn fair_fractional_odds(p: Probability) -> Result<FractionalOdds, OddsError> {
    let v = p.value();
    if v <= 0.0 {
        return Err(OddsError::DegenerateProbability(v));
    }
    Ok(FractionalOdds((1.0 / v - 1.0).max(0.0)))
}

/// Scheme in which the house withholds `epsilon` from the fair payout.
pub fn house_scheme(p: Probability, epsilon: f64) -> Result<TwoOutcomeScheme, OddsError> {
    let v = open_unit(p)?;
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(OddsError::InvalidMargin(epsilon));
    }
    let fair_payout = 1.0 / v - 1.0;
    let payout = fair_payout - epsilon;
    if payout < 0.0 {
        return Err(OddsError::MarginTooLarge {
            epsilon,
            fair_payout,
        });
    }
    TwoOutcomeScheme::new(p, payout)
}

pub fn expected_revenue(s: &TwoOutcomeScheme) -> f64 {
    let p = s.win_prob.value();
    -s.payout * p + TwoOutcomeScheme::RECEIVE * (1.0 - p)
}

/// `E(R^2) - E(R)^2` of the house revenue.
///
/// Evaluated as `p (1 - p) (payout + receive)^2`, the same quantity for a
/// two-point variable without the cancellation of the raw-moment form.
pub fn revenue_variance(s: &TwoOutcomeScheme) -> f64 {
    let p = s.win_prob.value();
    let spread = s.payout + TwoOutcomeScheme::RECEIVE;
    p * (1.0 - p) * spread * spread
}

/// Closed form of [`revenue_variance`] for [`house_scheme`]: `r (1 - p eps)^2`.
pub fn house_variance_closed_form(p: Probability, epsilon: f64) -> f64 {
    let v = p.value();
    let r = 1.0 / v - 1.0;
    r * (1.0 - v * epsilon).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prob(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn implied_probability_examples() {
        assert_eq!(
            implied_probability(DecimalOdds::new(2.0).unwrap()).value(),
            0.5
        );
        assert_eq!(
            implied_probability(DecimalOdds::new(4.0).unwrap()).value(),
            0.25
        );
        let p = implied_probability(DecimalOdds::new(1.66).unwrap()).value();
        assert!((p - 0.602_409_638_554_216_9).abs() < 1e-15);
    }

    #[test]
    fn implied_probability_rejects_degenerate_odds() {
        for bad in [1.0, 0.5, -2.0, f64::NAN, f64::INFINITY] {
            assert!(implied_probability_of(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decimal_odds_examples() {
        assert_eq!(to_decimal_odds(prob(0.25)).unwrap().value(), 4.0);
        assert_eq!(to_decimal_odds(prob(0.5)).unwrap().value(), 2.0);
        let d = to_decimal_odds(prob(0.15)).unwrap().value();
        assert!((d - 20.0 / 3.0).abs() < 1e-12);
        // printed as 6.66 when truncated to two places
        assert_eq!((d * 100.0).trunc() / 100.0, 6.66);
        assert!(to_decimal_odds(prob(0.0)).is_err());
        assert!(to_decimal_odds(prob(1.0)).is_err());
    }

    #[test]
    fn fair_fractional_examples() {
        let r = fair_fractional_odds(prob(0.606)).unwrap().value();
        assert!((r - (1.0 / 0.606 - 1.0)).abs() < 1e-15);
        assert!((r - 0.650_165).abs() < 1e-6);
        assert_eq!(fair_fractional_odds(prob(1.0)).unwrap().value(), 0.0);
        assert_eq!(fair_fractional_odds(prob(0.25)).unwrap().value(), 3.0);
        assert!(fair_fractional_odds(prob(0.0)).is_err());
    }

    #[test]
    fn house_scheme_examples() {
        let p = prob(0.606);
        let eps = fair_fractional_odds(p).unwrap().value() - 0.6;
        let s = house_scheme(p, eps).unwrap();
        assert!((s.payout() - 0.6).abs() < 1e-12);
        assert_eq!(s.receive(), 1.0);

        let fair = house_scheme(prob(0.5), 0.0).unwrap();
        assert_eq!(fair.payout(), 1.0);

        let draw = house_scheme(prob(0.25), 0.13).unwrap();
        assert!((draw.payout() - 2.87).abs() < 1e-12);
    }

    #[test]
    fn house_scheme_rejects_negative_payout() {
        assert!(matches!(
            house_scheme(prob(0.5), 1.5),
            Err(OddsError::MarginTooLarge { .. })
        ));
        assert!(house_scheme(prob(0.5), -0.1).is_err());
        assert!(house_scheme(prob(1.0), 0.0).is_err());
    }

    #[test]
    fn expected_revenue_examples() {
        let s = TwoOutcomeScheme::new(prob(0.606), 0.6).unwrap();
        assert!((expected_revenue(&s) - 0.0304).abs() < 1e-12);
        let s = TwoOutcomeScheme::new(prob(0.6), 0.57).unwrap();
        assert!((expected_revenue(&s) - 0.058).abs() < 1e-12);
        let s = house_scheme(prob(0.37), 0.0).unwrap();
        assert!(expected_revenue(&s).abs() < 1e-12);
    }

    #[test]
    fn rounded_fair_payout_is_not_exactly_fair() {
        // 0.65 stands in for 0.650165...; the exact value is a hair off zero
        let s = TwoOutcomeScheme::new(prob(0.606), 0.65).unwrap();
        let player = -expected_revenue(&s);
        assert!((player - (-0.0001)).abs() < 1e-12);
    }

    // E(R^2) - E(R)^2 by enumerating the two outcomes
    fn enumerated_variance(s: &TwoOutcomeScheme) -> f64 {
        let outcomes = [
            (s.win_prob().value(), s.house_revenue(true)),
            (1.0 - s.win_prob().value(), s.house_revenue(false)),
        ];
        let mean: f64 = outcomes.iter().map(|(w, x)| w * x).sum();
        outcomes.iter().map(|(w, x)| w * (x - mean).powi(2)).sum()
    }

    #[test]
    fn variance_examples() {
        let s = house_scheme(prob(0.5), 0.0).unwrap();
        assert!((revenue_variance(&s) - 1.0).abs() < 1e-12);
        let s = house_scheme(prob(0.25), 0.0).unwrap();
        assert!((revenue_variance(&s) - 3.0).abs() < 1e-12);
        assert!((enumerated_variance(&s) - 3.0).abs() < 1e-12);

        let s = house_scheme(prob(0.6), 0.0967).unwrap();
        let v = revenue_variance(&s);
        assert!((v - 0.591_550_880_266_666_7).abs() < 1e-12);
        assert!((v - enumerated_variance(&s)).abs() < 1e-12);
        assert!((v - house_variance_closed_form(prob(0.6), 0.0967)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip(p in 1e-6f64..(1.0 - 1e-6)) {
            let back = implied_probability(to_decimal_odds(prob(p)).unwrap()).value();
            prop_assert!(((back - p) / p).abs() <= 1e-12);
        }

        #[test]
        fn margin_identity(p in 0.001f64..0.999, frac in 0.0f64..1.0) {
            let eps = frac * (1.0 / p - 1.0);
            let s = house_scheme(prob(p), eps).unwrap();
            prop_assert!((expected_revenue(&s) - eps * p).abs() <= 1e-12);
            let closed = house_variance_closed_form(prob(p), eps);
            let v = revenue_variance(&s);
            prop_assert!((v - closed).abs() <= 1e-10 * closed.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn zero_sum(p in 0.0f64..=1.0, payout in 0.0f64..50.0) {
            let s = TwoOutcomeScheme::new(prob(p), payout).unwrap();
            for hit in [true, false] {
                prop_assert_eq!(s.player_revenue(hit), -s.house_revenue(hit));
            }
        }

        #[test]
        fn revenue_increases_with_margin(p in 0.01f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let r = 1.0 / p - 1.0;
            let (lo, hi) = if a < b { (a * r, b * r) } else { (b * r, a * r) };
            prop_assume!(hi - lo > 1e-9);
            let e_lo = expected_revenue(&house_scheme(prob(p), lo).unwrap());
            let e_hi = expected_revenue(&house_scheme(prob(p), hi).unwrap());
            prop_assert!(e_hi > e_lo);
        }
    }
}
