//! Cross-bookmaker comparison, margin summaries and histogram data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::MatchRecord;
use crate::matchup::overround;
use crate::solver::MarginEstimate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("no bookmaker has full odds for {0}")]
    EmptyRanking(String),
    #[error("cannot summarise an empty list")]
    EmptySummary,
    #[error("bin width must be finite and positive, got {0}")]
    InvalidBinWidth(f64),
}

/// Bookmakers for one match, fairest (smallest overround) first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessRanking {
    pub match_key: String,
    pub entries: Vec<(String, f64)>,
}

impl FairnessRanking {
    pub fn fairest(&self) -> &str {
        &self.entries[0].0
    }

    pub fn worst(&self) -> &str {
        &self.entries[self.entries.len() - 1].0
    }

    /// Bookmakers whose implied probabilities sum below one.
    pub fn arbitrage_anomalies(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|(_, o)| *o < 0.0)
            .map(|(h, _)| h.as_str())
    }
}

pub fn rank_houses(record: &MatchRecord) -> Result<FairnessRanking, AnalyticsError> {
    let mut entries: Vec<(String, f64)> = record
        .odds_by_house
        .iter()
        .map(|(h, m)| (h.clone(), overround(m)))
        .collect();
    if entries.is_empty() {
        return Err(AnalyticsError::EmptyRanking(record.key()));
    }
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    for (h, o) in &entries {
        if *o < 0.0 {
            warn!(
                "{}: {h} has negative overround {o} (arbitrage anomaly)",
                record.key()
            );
        }
    }
    Ok(FairnessRanking {
        match_key: record.key(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub maximum: f64,
    pub minimum: f64,
    /// Sample standard deviation (divisor n - 1); zero for a single value.
    pub sd: f64,
    pub count: usize,
}

impl SummaryStats {
    pub fn from_values(values: &[f64]) -> Result<Self, AnalyticsError> {
        if values.is_empty() {
            return Err(AnalyticsError::EmptySummary);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let sd = if n > 1 {
            let ss: f64 = sorted.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            warn!("standard deviation of a single value reported as 0");
            0.0
        };
        Ok(Self {
            mean,
            median,
            maximum: sorted[n - 1],
            minimum: sorted[0],
            sd,
            count: n,
        })
    }
}

pub fn summarize_margins(estimates: &[MarginEstimate]) -> Result<SummaryStats, AnalyticsError> {
    let eps: Vec<f64> = estimates.iter().map(|e| e.epsilon).collect();
    SummaryStats::from_values(&eps)
}

/// Shared bins `[a, b)` starting at zero, the last bin closed on the right.
/// Every house uses the same edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bin_edges: Vec<f64>,
    pub counts: BTreeMap<String, Vec<u64>>,
}

impl HistogramSpec {
    pub fn bins(&self) -> usize {
        self.bin_edges.len() - 1
    }

    pub fn total(&self, house: &str) -> u64 {
        self.counts.get(house).map(|c| c.iter().sum()).unwrap_or(0)
    }
}

// slack for values that sit on a bin edge up to float noise
const EDGE_SLACK: f64 = 1e-9;

pub fn margin_histogram(
    estimates: &BTreeMap<String, Vec<f64>>,
    bin_width: f64,
) -> Result<HistogramSpec, AnalyticsError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(AnalyticsError::InvalidBinWidth(bin_width));
    }
    let max = estimates.values().flatten().copied().fold(0.0f64, f64::max);
    // the top edge is the first boundary strictly above the largest value
    let bins = (max / bin_width + EDGE_SLACK).floor() as usize + 1;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| i as f64 * bin_width).collect();

    let counts = estimates
        .iter()
        .map(|(house, values)| {
            let mut c = vec![0u64; bins];
            for &v in values {
                let idx = ((v.max(0.0) / bin_width + EDGE_SLACK).floor() as usize).min(bins - 1);
                c[idx] += 1;
            }
            (house.clone(), c)
        })
        .collect();
    Ok(HistogramSpec { bin_edges, counts })
}

/// Grouped bar chart of a histogram as a standalone SVG document.
pub fn histogram_svg(h: &HistogramSpec, title: &str) -> String {
    const PALETTE: [&str; 6] = [
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    ];
    let (width, height) = (800.0, 420.0);
    let (left, right, top, bottom) = (60.0, 140.0, 40.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let bins = h.bins();
    let houses = h.counts.len().max(1);
    let peak = h
        .counts
        .values()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let group_w = plot_w / bins as f64;
    let bar_w = group_w * 0.8 / houses as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        left + plot_w / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{y}" stroke="black"/>"#,
        y = top + plot_h,
        x2 = left + plot_w
    );
    for (i, edge) in h.bin_edges.iter().enumerate() {
        let x = left + i as f64 * group_w;
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{edge:.3}</text>"#,
            top + plot_h + 15.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{left}" y="{:.1}" text-anchor="end">{peak}</text><text x="{:.1}" y="{:.1}" text-anchor="end">0</text>"#,
        top + 4.0,
        left - 4.0,
        top + plot_h
    );
    for (k, (house, counts)) in h.counts.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let bh = c as f64 / peak * plot_h;
            let x = left + i as f64 * group_w + group_w * 0.1 + k as f64 * bar_w;
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{bh:.2}" fill="{color}"><title>{} {c}</title></rect>"#,
                top + plot_h - bh,
                xml_escape(house)
            );
        }
        let ly = top + 10.0 + k as f64 * 18.0;
        let lx = left + plot_w + 20.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{:.1}" width="12" height="12" fill="{color}"/><text x="{:.1}" y="{ly:.1}" dominant-baseline="middle">{}</text>"#,
            ly - 6.0,
            lx + 18.0,
            xml_escape(house)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
