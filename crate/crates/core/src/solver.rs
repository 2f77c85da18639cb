//! Imputed margin under the additive model.
//!
//! If a house subtracts the same `eps` from each fair decimal odd, the
//! announced implied probabilities `q_k` and the overround `delta` satisfy
//!
//! ```text
//! f(eps) = sum_k eps q_k^2 / (1 + eps q_k) = delta
//! ```
//!
//! `f` is zero at the origin, strictly increasing and bounded above by
//! `sum_k q_k`, so a root exists exactly when `0 < delta < sum_k q_k` and is
//! unique. It is found by bisection on an expanding bracket, then polished
//! with a few guarded Newton steps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::MatchRecord;
use crate::matchup::{implied_triple, OutcomeTriple};
use crate::report::round_half_up;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 1100;
const MAX_POLISH_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum SolveError {
    #[error("no positive margin: overround {delta} is not above zero")]
    NoPositiveMargin { delta: f64 },
    #[error("unreachable overround {delta}: the margin equation is bounded by {limit}")]
    UnreachableDelta { delta: f64, limit: f64 },
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("implied probabilities must lie in (0, 1), got ({}, {}, {})", .0.home, .0.draw, .0.away)]
    InvalidTriple(OutcomeTriple),
    #[error("no convergence after {iterations} iterations: eps={epsilon} residual={residual} bracket=[{low}, {high}]")]
    IterationCap {
        iterations: usize,
        epsilon: f64,
        residual: f64,
        low: f64,
        high: f64,
    },
    #[error("bracket [{low}, {high}] collapsed with residual {residual} above tolerance {tol}")]
    ToleranceUnreachable {
        low: f64,
        high: f64,
        residual: f64,
        tol: f64,
    },
    #[error("unknown bookmaker {requested:?}; known: {}", .known.join(", "))]
    UnknownBookmaker {
        requested: String,
        known: Vec<String>,
    },
    #[error("no match records to solve")]
    EmptySeason,
}

/// How announced probabilities and the overround are derived from odds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InputPrecision {
    /// Reciprocals of the raw decimal odds.
    #[default]
    Full,
    /// Each implied probability and their sum rounded half-up to two places
    /// before solving, the way printed tables present them.
    TwoPlaceRounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub polish: bool,
    pub precision: InputPrecision,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            polish: true,
            precision: InputPrecision::Full,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// A solved margin with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginRoot {
    pub epsilon: f64,
    /// `f(epsilon) - delta`.
    pub residual: f64,
    pub iterations: usize,
    pub bracket_low: f64,
    pub bracket_high: f64,
}

/// Margin of one bookmaker on one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginEstimate {
    pub match_key: String,
    pub row: usize,
    pub bookmaker: String,
    pub overround: f64,
    pub epsilon: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bracket_low: f64,
    pub bracket_high: f64,
}

/// `sum_k eps q_k^2 / (1 + eps q_k)` for announced probabilities `q`.
pub fn margin_residual(epsilon: f64, announced: &OutcomeTriple) -> f64 {
    announced
        .iter()
        .map(|q| epsilon * q * q / (1.0 + epsilon * q))
        .sum()
}

fn margin_slope(epsilon: f64, announced: &OutcomeTriple) -> f64 {
    announced
        .iter()
        .map(|q| {
            let d = 1.0 + epsilon * q;
            q * q / (d * d)
        })
        .sum()
}

/// Solves `margin_residual(eps) = delta` to `|residual| <= tol`.
pub fn solve_epsilon(
    announced: &OutcomeTriple,
    delta: f64,
    tol: f64,
) -> Result<MarginRoot, SolveError> {
    solve_epsilon_with(announced, delta, &SolverConfig::with_tol(tol))
}

pub fn solve_epsilon_with(
    announced: &OutcomeTriple,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<MarginRoot, SolveError> {
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(SolveError::InvalidTolerance(cfg.tol));
    }
    if announced.iter().any(|q| !(q > 0.0 && q < 1.0)) {
        return Err(SolveError::InvalidTriple(*announced));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(SolveError::NoPositiveMargin { delta });
    }
    let limit = announced.sum();
    if delta >= limit {
        return Err(SolveError::UnreachableDelta { delta, limit });
    }
    let f = |e: f64| margin_residual(e, announced) - delta;

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(SolveError::UnreachableDelta { delta, limit });
        }
    }

    let mut iterations = 0;
    let (mut eps, mut res) = loop {
        let mid = 0.5 * (lo + hi);
        let r = f(mid);
        iterations += 1;
        if r.abs() <= cfg.tol {
            break (mid, r);
        }
        if mid <= lo || mid >= hi {
            return Err(SolveError::ToleranceUnreachable {
                low: lo,
                high: hi,
                residual: r,
                tol: cfg.tol,
            });
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if iterations >= cfg.max_iterations {
            return Err(SolveError::IterationCap {
                iterations,
                epsilon: mid,
                residual: r,
                low: lo,
                high: hi,
            });
        }
    };

    if cfg.polish {
        for _ in 0..MAX_POLISH_STEPS {
            if res == 0.0 {
                break;
            }
            let next = eps - res / margin_slope(eps, announced);
            if !(next >= lo && next <= hi) {
                break;
            }
            let r = f(next);
            if r.abs() >= res.abs() {
                break;
            }
            eps = next;
            res = r;
            iterations += 1;
        }
    }

    Ok(MarginRoot {
        epsilon: eps,
        residual: res,
        iterations,
        bracket_low: lo,
        bracket_high: hi,
    })
}

/// Announced probabilities and overround used to solve one line of odds.
pub fn solver_inputs(
    odds: &crate::matchup::MatchOdds,
    precision: InputPrecision,
) -> (OutcomeTriple, f64) {
    let implied = implied_triple(odds);
    match precision {
        InputPrecision::Full => (implied, implied.sum() - 1.0),
        InputPrecision::TwoPlaceRounded => (
            implied.map(|q| round_half_up(q, 2)),
            round_half_up(implied.sum(), 2) - 1.0,
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SkipReason {
    MissingOdds,
    NonPositiveOverround(f64),
    Solver(SolveError),
}

impl std::fmt::Display for SkipReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SkipReason::MissingOdds => f.write_str("odds missing"),
            SkipReason::NonPositiveOverround(d) => write!(f, "overround {d} is not positive"),
            SkipReason::Solver(e) => write!(f, "solver failed: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedMatch {
    pub match_key: String,
    pub row: usize,
    pub bookmaker: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeasonMargins {
    pub estimates: Vec<MarginEstimate>,
    pub skipped: Vec<SkippedMatch>,
}

pub fn solve_match(
    record: &MatchRecord,
    bookmaker: &str,
    cfg: &SolverConfig,
) -> Result<MarginEstimate, SkippedMatch> {
    let skip = |reason| SkippedMatch {
        match_key: record.key(),
        row: record.row,
        bookmaker: bookmaker.to_string(),
        reason,
    };
    let odds = record
        .odds(bookmaker)
        .ok_or_else(|| skip(SkipReason::MissingOdds))?;
    let (announced, delta) = solver_inputs(odds, cfg.precision);
    if delta.is_nan() || delta <= 0.0 {
        return Err(skip(SkipReason::NonPositiveOverround(delta)));
    }
    let root =
        solve_epsilon_with(&announced, delta, cfg).map_err(|e| skip(SkipReason::Solver(e)))?;
    Ok(MarginEstimate {
        match_key: record.key(),
        row: record.row,
        bookmaker: bookmaker.to_string(),
        overround: delta,
        epsilon: root.epsilon,
        residual: root.residual,
        iterations: root.iterations,
        bracket_low: root.bracket_low,
        bracket_high: root.bracket_high,
    })
}

/// Solves every record for one bookmaker. Matches are solved in parallel;
/// both output lists keep input order.
pub fn solve_season(
    records: &[MatchRecord],
    known_houses: &[String],
    bookmaker: &str,
    cfg: &SolverConfig,
) -> Result<SeasonMargins, SolveError> {
    if !known_houses.iter().any(|h| h == bookmaker) {
        return Err(SolveError::UnknownBookmaker {
            requested: bookmaker.to_string(),
            known: known_houses.to_vec(),
        });
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(SolveError::InvalidTolerance(cfg.tol));
    }
    if records.is_empty() {
        return Err(SolveError::EmptySeason);
    }
    let solved: Vec<_> = records
        .par_iter()
        .map(|r| solve_match(r, bookmaker, cfg))
        .collect();
    let mut out = SeasonMargins::default();
    for s in solved {
        match s {
            Ok(e) => out.estimates.push(e),
            Err(s) => out.skipped.push(s),
        }
    }
    Ok(out)
}
