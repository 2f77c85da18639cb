//! Bookmaker odds analysis for 1X2 football markets.
//!
//! Converts decimal odds to implied probabilities, measures each bookmaker's
//! overround, and recovers the additive margin `eps` a house subtracts from
//! every fair decimal odd. A seeded Monte Carlo engine replays the revenue
//! schemes so the closed-form mean and variance can be checked empirically.

pub mod analytics;
pub mod ingest;
pub mod matchup;
pub mod odds;
pub mod report;
pub mod simulate;
pub mod solver;

pub use analytics::{
    histogram_svg, margin_histogram, rank_houses, summarize_margins, AnalyticsError,
    FairnessRanking, HistogramSpec, SummaryStats,
};
pub use ingest::{
    default_column_maps, parse_season, BookmakerColumnMap, IngestError, IngestWarning, MatchRecord,
    MatchResult, ParsedSeason,
};
pub use matchup::{
    announced_odds_from_margin, announced_probs_from_margin, implied_triple, outcome_scheme,
    overround, FairProbs, MatchError, MatchOdds, Outcome, OutcomeTriple,
};
pub use odds::{
    expected_revenue, fair_fractional_odds, house_scheme, implied_probability, revenue_variance,
    to_decimal_odds, DecimalOdds, FractionalOdds, OddsError, Probability, TwoOutcomeScheme,
};
pub use report::{render_table, Cell, ReportError, Table};
pub use simulate::{
    simulate_player_vs_house, simulate_scheme, SchemeSpec, SimConfig, SimError, SimResult,
    ThreeOutcomeBook,
};
pub use solver::{
    margin_residual, solve_epsilon, solve_epsilon_with, solve_season, InputPrecision,
    MarginEstimate, MarginRoot, SeasonMargins, SkipReason, SkippedMatch, SolveError, SolverConfig,
};
