//! Three-outcome (1X2) match odds.
//!
//! Components are always stored in home, draw, away order, whatever order a
//! data source or printed table happens to use.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odds::{DecimalOdds, OddsError, Probability, TwoOutcomeScheme};

/// Tolerance on the sum of a fair probability triple.
pub const FAIR_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("{outcome} component must be finite and positive, got {value}")]
    InvalidComponent { outcome: Outcome, value: f64 },
    #[error("fair probabilities must sum to 1, got {0}")]
    NotNormalised(f64),
    #[error("margin {epsilon} is inadmissible for {outcome}: announced odds {announced} would not exceed 1")]
    InadmissibleMargin {
        outcome: Outcome,
        epsilon: f64,
        announced: f64,
    },
    #[error("margin must be finite and positive, got {0}")]
    InvalidMargin(f64),
    #[error(transparent)]
    Odds(#[from] OddsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Home,
    Draw,
    Away,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Home, Outcome::Draw, Outcome::Away];
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Home => "home",
            Outcome::Draw => "draw",
            Outcome::Away => "away",
        })
    }
}

/// Three positive reals, one per outcome. Whether they are probabilities or
/// decimal odds depends on where the triple came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTriple {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl OutcomeTriple {
    pub fn new(home: f64, draw: f64, away: f64) -> Result<Self, MatchError> {
        let t = Self { home, draw, away };
        for o in Outcome::ALL {
            let v = t.get(o);
            if !v.is_finite() || v <= 0.0 {
                return Err(MatchError::InvalidComponent {
                    outcome: o,
                    value: v,
                });
            }
        }
        Ok(t)
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Home => self.home,
            Outcome::Draw => self.draw,
            Outcome::Away => self.away,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> {
        [self.home, self.draw, self.away].into_iter()
    }

    pub fn sum(&self) -> f64 {
        self.home + self.draw + self.away
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            home: f(self.home),
            draw: f(self.draw),
            away: f(self.away),
        }
    }
}

/// One bookmaker's announced decimal odds for a match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOdds {
    bookmaker: String,
    odds: OutcomeTriple,
}

impl MatchOdds {
    pub fn new(bookmaker: impl Into<String>, odds: OutcomeTriple) -> Result<Self, MatchError> {
        for o in Outcome::ALL {
            DecimalOdds::new(odds.get(o))?;
        }
        Ok(Self {
            bookmaker: bookmaker.into(),
            odds,
        })
    }

    pub fn from_decimals(
        bookmaker: impl Into<String>,
        home: f64,
        draw: f64,
        away: f64,
    ) -> Result<Self, MatchError> {
        Self::new(bookmaker, OutcomeTriple::new(home, draw, away)?)
    }

    pub fn bookmaker(&self) -> &str {
        &self.bookmaker
    }

    pub fn odds(&self) -> &OutcomeTriple {
        &self.odds
    }

    pub fn decimal(&self, outcome: Outcome) -> DecimalOdds {
        DecimalOdds::new(self.odds.get(outcome)).expect("validated at construction")
    }
}

/// Fair probabilities of the three outcomes, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairProbs(OutcomeTriple);

impl FairProbs {
    pub fn new(home: f64, draw: f64, away: f64) -> Result<Self, MatchError> {
        let t = OutcomeTriple::new(home, draw, away)?;
        for o in Outcome::ALL {
            Probability::new(t.get(o))?;
        }
        let sum = t.sum();
        if (sum - 1.0).abs() > FAIR_SUM_TOLERANCE {
            return Err(MatchError::NotNormalised(sum));
        }
        Ok(Self(t))
    }

    pub fn probs(&self) -> &OutcomeTriple {
        &self.0
    }

    pub fn get(&self, outcome: Outcome) -> Probability {
        Probability::new(self.0.get(outcome)).expect("validated at construction")
    }
}

/// Componentwise reciprocal of the announced odds. The sum may exceed one.
pub fn implied_triple(m: &MatchOdds) -> OutcomeTriple {
    m.odds.map(|d| 1.0 / d)
}

/// Sum of implied probabilities minus one.
pub fn overround(m: &MatchOdds) -> f64 {
    implied_triple(m).sum() - 1.0
}

/// House revenue on a $1 bet on `outcome`, priced at the announced odds but
/// settled with the fair probability.
pub fn outcome_scheme(
    fair: &FairProbs,
    announced: &MatchOdds,
    outcome: Outcome,
) -> Result<TwoOutcomeScheme, MatchError> {
    let p = fair.get(outcome);
    if p.value() <= 0.0 || p.value() >= 1.0 {
        return Err(OddsError::DegenerateProbability(p.value()).into());
    }
    let d = DecimalOdds::new(announced.odds.get(outcome))?;
    Ok(TwoOutcomeScheme::new(p, d.to_fractional().value())?)
}

/// Announced implied probabilities `P / (1 - eps P)` when the house subtracts
/// `epsilon` from every fair decimal odd.
pub fn announced_probs_from_margin(
    fair: &FairProbs,
    epsilon: f64,
) -> Result<OutcomeTriple, MatchError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(MatchError::InvalidMargin(epsilon));
    }
    for o in Outcome::ALL {
        let p = fair.0.get(o);
        let announced = 1.0 / p - epsilon;
        if announced <= 1.0 {
            return Err(MatchError::InadmissibleMargin {
                outcome: o,
                epsilon,
                announced,
            });
        }
    }
    Ok(fair.0.map(|p| p / (1.0 - epsilon * p)))
}

/// Announced decimal odds `1/P - eps` for a fair triple and margin.
pub fn announced_odds_from_margin(
    bookmaker: impl Into<String>,
    fair: &FairProbs,
    epsilon: f64,
) -> Result<MatchOdds, MatchError> {
    let probs = announced_probs_from_margin(fair, epsilon)?;
    MatchOdds::new(bookmaker, probs.map(|p| 1.0 / p))
}
