//! Monte Carlo replay of betting schemes.
//!
//! Trial `t` always reads the same position of a ChaCha8 stream keyed by the
//! seed, and trials are tallied as integer outcome counts. Chunks can
//! therefore be evaluated in any order or split and still combine exactly.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matchup::{FairProbs, MatchOdds, Outcome};
use crate::odds::{expected_revenue, revenue_variance, TwoOutcomeScheme};

pub const GENERATOR: &str = "ChaCha8 (rand_chacha), one 64-bit word per trial";
pub const DEFAULT_CHUNK: u64 = 1 << 16;

// a 64-bit draw consumes two 32-bit stream words
const WORDS_PER_TRIAL: u128 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("chunk size must be at least 1")]
    EmptyChunk,
}

/// The house takes a $1 bet on each of home, draw and away, priced at the
/// announced odds and settled with the fair probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeOutcomeBook {
    pub fair: FairProbs,
    pub announced: MatchOdds,
}

impl ThreeOutcomeBook {
    /// Net house revenue when `outcome` happens: three stakes in, the
    /// winning odd paid out.
    pub fn house_revenue(&self, outcome: Outcome) -> f64 {
        3.0 - self.announced.odds().get(outcome)
    }

    pub fn expected_revenue(&self) -> f64 {
        Outcome::ALL
            .iter()
            .map(|&o| self.fair.probs().get(o) * self.house_revenue(o))
            .sum()
    }

    pub fn revenue_variance(&self) -> f64 {
        let mean = self.expected_revenue();
        Outcome::ALL
            .iter()
            .map(|&o| self.fair.probs().get(o) * (self.house_revenue(o) - mean).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SchemeSpec {
    Two(TwoOutcomeScheme),
    Three(ThreeOutcomeBook),
}

impl SchemeSpec {
    fn outcome_values(&self) -> Vec<f64> {
        match self {
            SchemeSpec::Two(s) => vec![s.house_revenue(true), s.house_revenue(false)],
            SchemeSpec::Three(b) => Outcome::ALL.iter().map(|&o| b.house_revenue(o)).collect(),
        }
    }

    /// Index of the outcome selected by a uniform draw in `[0, 1)`.
    fn select(&self, u: f64) -> usize {
        match self {
            SchemeSpec::Two(s) => usize::from(u >= s.win_prob().value()),
            SchemeSpec::Three(b) => {
                let p = b.fair.probs();
                if u < p.home {
                    0
                } else if u < p.home + p.draw {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn expected_revenue(&self) -> f64 {
        match self {
            SchemeSpec::Two(s) => expected_revenue(s),
            SchemeSpec::Three(b) => b.expected_revenue(),
        }
    }

    pub fn revenue_variance(&self) -> f64 {
        match self {
            SchemeSpec::Two(s) => revenue_variance(s),
            SchemeSpec::Three(b) => b.revenue_variance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub scheme: SchemeSpec,
    pub chunk_size: u64,
}

impl SimConfig {
    pub fn new(scheme: SchemeSpec, trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            scheme,
            chunk_size: DEFAULT_CHUNK,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.chunk_size == 0 {
            return Err(SimError::EmptyChunk);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub sample_mean: f64,
    /// Unbiased (divisor n - 1); zero for a single trial.
    pub sample_variance: f64,
    pub standard_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub generator: String,
}

impl SimResult {
    /// Whether `value` lies within `k` standard errors of the sample mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.sample_mean - value).abs() <= k * self.standard_error
    }
}

/// One simulated play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Play {
    pub outcome: usize,
    pub house: f64,
    pub player: f64,
}

fn stream_at(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(trial as u128 * WORDS_PER_TRIAL);
    rng
}

fn tally(cfg: &SimConfig, trials: Range<u64>, counts: &mut [u64]) {
    let mut rng = stream_at(cfg.seed, trials.start);
    for _ in trials {
        let u: f64 = rng.random();
        counts[cfg.scheme.select(u)] += 1;
    }
}

fn outcome_counts(cfg: &SimConfig) -> Vec<u64> {
    let k = cfg.scheme.outcome_values().len();
    let chunks: Vec<Range<u64>> = (0..cfg.trials.div_ceil(cfg.chunk_size))
        .map(|i| {
            let start = i * cfg.chunk_size;
            start..(start + cfg.chunk_size).min(cfg.trials)
        })
        .collect();
    chunks
        .into_par_iter()
        .map(|r| {
            let mut c = vec![0u64; k];
            tally(cfg, r, &mut c);
            c
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn stats(cfg: &SimConfig, counts: &[u64], values: &[f64]) -> SimResult {
    let n = cfg.trials as f64;
    let mean = counts
        .iter()
        .zip(values)
        .map(|(&c, &v)| c as f64 * v)
        .sum::<f64>()
        / n;
    let sample_variance = if cfg.trials > 1 {
        counts
            .iter()
            .zip(values)
            .map(|(&c, &v)| c as f64 * (v - mean) * (v - mean))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    SimResult {
        sample_mean: mean,
        sample_variance,
        standard_error: (sample_variance / n).sqrt(),
        trials: cfg.trials,
        seed: cfg.seed,
        generator: GENERATOR.to_string(),
    }
}

/// Sample statistics of the house revenue over `cfg.trials` plays.
pub fn simulate_scheme(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let counts = outcome_counts(cfg);
    Ok(stats(cfg, &counts, &cfg.scheme.outcome_values()))
}

/// House and player statistics from the same plays. The player's revenue
/// on every play is the negation of the house's.
pub fn simulate_player_vs_house(cfg: &SimConfig) -> Result<(SimResult, SimResult), SimError> {
    cfg.validate()?;
    let counts = outcome_counts(cfg);
    let house_values = cfg.scheme.outcome_values();
    let player_values: Vec<f64> = house_values.iter().map(|v| -v).collect();
    Ok((
        stats(cfg, &counts, &house_values),
        stats(cfg, &counts, &player_values),
    ))
}

/// The individual plays for a range of trial indices.
pub fn plays(cfg: &SimConfig, trials: Range<u64>) -> Vec<Play> {
    let values = cfg.scheme.outcome_values();
    let mut rng = stream_at(cfg.seed, trials.start);
    trials
        .map(|_| {
            let outcome = cfg.scheme.select(rng.random());
            let house = values[outcome];
            Play {
                outcome,
                house,
                player: -house,
            }
        })
        .collect()
}
