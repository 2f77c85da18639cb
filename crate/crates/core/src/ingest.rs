//! Reader for football-data.co.uk style fixture files.
//!
//! Only `Date`, `HomeTeam`, `AwayTeam`, `FTR` and the mapped odds columns are
//! read; every other column is ignored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matchup::{MatchOdds, OutcomeTriple};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Header { line: u64, message: String },
    #[error("column map for {0} repeats a column name")]
    DuplicateColumns(String),
    #[error("failed to read csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Which three columns hold a bookmaker's home, draw and away odds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookmakerColumnMap {
    bookmaker: String,
    home_col: String,
    draw_col: String,
    away_col: String,
}

impl BookmakerColumnMap {
    pub fn new(
        bookmaker: impl Into<String>,
        home_col: impl Into<String>,
        draw_col: impl Into<String>,
        away_col: impl Into<String>,
    ) -> Result<Self, IngestError> {
        let map = Self {
            bookmaker: bookmaker.into(),
            home_col: home_col.into(),
            draw_col: draw_col.into(),
            away_col: away_col.into(),
        };
        if map.home_col == map.draw_col
            || map.home_col == map.away_col
            || map.draw_col == map.away_col
        {
            return Err(IngestError::DuplicateColumns(map.bookmaker));
        }
        Ok(map)
    }

    /// Columns `{prefix}H`, `{prefix}D`, `{prefix}A`.
    pub fn with_prefix(prefix: &str) -> Self {
        Self::new(
            prefix,
            format!("{prefix}H"),
            format!("{prefix}D"),
            format!("{prefix}A"),
        )
        .expect("suffixes are distinct")
    }

    pub fn bookmaker(&self) -> &str {
        &self.bookmaker
    }

    pub fn home_col(&self) -> &str {
        &self.home_col
    }

    pub fn draw_col(&self) -> &str {
        &self.draw_col
    }

    pub fn away_col(&self) -> &str {
        &self.away_col
    }

    fn columns(&self) -> [&str; 3] {
        [&self.home_col, &self.draw_col, &self.away_col]
    }
}

/// Bet365, Bet&Win, Interwetten, Ladbrokes, William Hill and VC Bet.
pub const DEFAULT_HOUSES: [&str; 6] = ["B365", "BW", "IW", "LB", "WH", "VC"];

pub fn default_column_maps() -> Vec<BookmakerColumnMap> {
    DEFAULT_HOUSES
        .iter()
        .map(|h| BookmakerColumnMap::with_prefix(h))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchResult {
    HomeWin,
    Draw,
    AwayWin,
    Unknown,
}

impl MatchResult {
    fn from_ftr(cell: Option<&str>) -> Self {
        match cell.map(str::trim) {
            Some("H") => MatchResult::HomeWin,
            Some("D") => MatchResult::Draw,
            Some("A") => MatchResult::AwayWin,
            _ => MatchResult::Unknown,
        }
    }
}

/// One fixture with the odds of every bookmaker that quoted all three outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    /// 1-based index among the data rows of the source file.
    pub row: usize,
    pub date: NaiveDate,
    pub home_team: String,
    pub away_team: String,
    pub result: MatchResult,
    pub odds_by_house: BTreeMap<String, MatchOdds>,
}

impl MatchRecord {
    /// Stable identifier used in reports, e.g. `2015-08-08 Bournemouth v Aston Villa`.
    pub fn key(&self) -> String {
        format!("{} {} v {}", self.date, self.home_team, self.away_team)
    }

    pub fn odds(&self, bookmaker: &str) -> Option<&MatchOdds> {
        self.odds_by_house.get(bookmaker)
    }
}

/// Something in the input that was skipped or left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    /// 1-based data row, or 0 for file-level notes.
    pub row: usize,
    pub line: u64,
    pub bookmaker: Option<String>,
    pub reason: String,
    /// Whether the whole row was dropped.
    pub row_skipped: bool,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}", self.line)?;
        if self.row > 0 {
            write!(f, " (row {})", self.row)?;
        }
        if let Some(b) = &self.bookmaker {
            write!(f, " [{b}]")?;
        }
        write!(f, ": {}", self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParsedSeason {
    pub records: Vec<MatchRecord>,
    pub warnings: Vec<IngestWarning>,
    /// Bookmakers whose three columns are all present in the header.
    pub houses: Vec<String>,
    pub data_rows: usize,
}

impl ParsedSeason {
    pub fn skipped_rows(&self) -> usize {
        self.warnings.iter().filter(|w| w.row_skipped).count()
    }
}

/// Parses a day-first `DD/MM/YY` or `DD/MM/YYYY` date.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    let year = s.rsplit('/').next()?;
    let fmt = match year.len() {
        2 => "%d/%m/%y",
        4 => "%d/%m/%Y",
        _ => return None,
    };
    NaiveDate::parse_from_str(s, fmt).ok()
}

struct Columns {
    date: usize,
    home: usize,
    away: usize,
    ftr: Option<usize>,
    houses: Vec<(String, [usize; 3])>,
}

fn locate_columns(
    headers: &csv::StringRecord,
    maps: &[BookmakerColumnMap],
    warnings: &mut Vec<IngestWarning>,
) -> Result<Columns, IngestError> {
    let index: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim(), i))
        .collect();
    let required = |name: &str| {
        index.get(name).copied().ok_or_else(|| IngestError::Header {
            line: 1,
            message: format!("header lacks required column {name:?}"),
        })
    };
    let date = required("Date")?;
    let home = required("HomeTeam")?;
    let away = required("AwayTeam")?;
    let ftr = index.get("FTR").copied();

    let mut houses = Vec::new();
    for map in maps {
        let cols: Vec<Option<usize>> = map
            .columns()
            .iter()
            .map(|c| index.get(c).copied())
            .collect();
        match cols.as_slice() {
            [Some(h), Some(d), Some(a)] => houses.push((map.bookmaker.clone(), [*h, *d, *a])),
            _ => warnings.push(IngestWarning {
                row: 0,
                line: 1,
                bookmaker: Some(map.bookmaker.clone()),
                reason: "odds columns not present in header".into(),
                row_skipped: false,
            }),
        }
    }
    Ok(Columns {
        date,
        home,
        away,
        ftr,
        houses,
    })
}

fn parse_odd(cell: Option<&str>) -> Result<f64, String> {
    let cell = cell.map(str::trim).unwrap_or("");
    if cell.is_empty() {
        return Err("missing".into());
    }
    let v: f64 = cell.parse().map_err(|_| format!("unparseable {cell:?}"))?;
    if !v.is_finite() || v <= 1.0 {
        return Err(format!("{cell} is not a decimal odd above 1"));
    }
    Ok(v)
}

/// Reads every data row of a fixtures file.
///
/// A bookmaker's odds are attached to a record only when all three cells parse
/// as numbers above 1; otherwise a warning names the row and bookmaker. Rows
/// without a usable date or teams are skipped with a warning.
pub fn parse_season<R: Read>(
    input: R,
    maps: &[BookmakerColumnMap],
) -> Result<ParsedSeason, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::Fields)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(IngestError::Header {
            line: 1,
            message: "missing header row".into(),
        });
    }

    let mut season = ParsedSeason::default();
    let cols = locate_columns(&headers, maps, &mut season.warnings)?;
    season.houses = cols.houses.iter().map(|(h, _)| h.clone()).collect();

    for result in reader.records() {
        let rec = result?;
        season.data_rows += 1;
        let row = season.data_rows;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let skip = |reason: String| IngestWarning {
            row,
            line,
            bookmaker: None,
            reason,
            row_skipped: true,
        };

        if rec.iter().all(|c| c.is_empty()) {
            season.warnings.push(skip("blank row".into()));
            continue;
        }
        let Some(date) = rec.get(cols.date).and_then(parse_date) else {
            season.warnings.push(skip(format!(
                "bad date {:?}",
                rec.get(cols.date).unwrap_or("")
            )));
            continue;
        };
        let home_team = rec.get(cols.home).unwrap_or("").to_string();
        let away_team = rec.get(cols.away).unwrap_or("").to_string();
        if home_team.is_empty() || away_team.is_empty() {
            season.warnings.push(skip("missing team name".into()));
            continue;
        }
        if home_team == away_team {
            season
                .warnings
                .push(skip(format!("{home_team} listed as both home and away")));
            continue;
        }

        let mut odds_by_house = BTreeMap::new();
        for (house, idx) in &cols.houses {
            let parsed: Result<Vec<f64>, String> =
                idx.iter().map(|&i| parse_odd(rec.get(i))).collect();
            let odds = parsed.and_then(|v| {
                OutcomeTriple::new(v[0], v[1], v[2])
                    .and_then(|t| MatchOdds::new(house.clone(), t))
                    .map_err(|e| e.to_string())
            });
            match odds {
                Ok(m) => {
                    odds_by_house.insert(house.clone(), m);
                }
                Err(reason) => season.warnings.push(IngestWarning {
                    row,
                    line,
                    bookmaker: Some(house.clone()),
                    reason: format!("odds left out: {reason}"),
                    row_skipped: false,
                }),
            }
        }

        season.records.push(MatchRecord {
            row,
            date,
            home_team,
            away_team,
            result: MatchResult::from_ftr(cols.ftr.and_then(|i| rec.get(i))),
            odds_by_house,
        });
    }
    Ok(season)
}

/// The bundled ten-match sample.
pub const SAMPLE_CSV: &str = include_str!("../data/sample_e0.csv");

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Div,Date,HomeTeam,AwayTeam,FTHG,FTAG,FTR,B365H,B365D,B365A,IWH,IWD,IWA";

    fn parse(body: &str) -> ParsedSeason {
        parse_season(body.as_bytes(), &default_column_maps()).unwrap()
    }

    #[test]
    fn default_maps() {
        let maps = default_column_maps();
        assert_eq!(maps.len(), 6);
        assert_eq!(maps[0].bookmaker(), "B365");
        assert_eq!(maps[0].home_col(), "B365H");
        assert_eq!(maps[0].draw_col(), "B365D");
        assert_eq!(maps[0].away_col(), "B365A");
        let mut names: Vec<&str> = maps.iter().flat_map(|m| m.columns()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 18);
    }

    #[test]
    fn column_map_rejects_repeats() {
        assert!(BookmakerColumnMap::new("X", "A", "A", "B").is_err());
    }

    #[test]
    fn reads_odds_in_home_draw_away_order() {
        let s = parse(&format!(
            "{HEADER}\nE0,08/08/15,Bournemouth,Aston Villa,0,1,A,2.00,3.60,4.00,2.10,3.30,3.30\n"
        ));
        assert_eq!(s.records.len(), 1);
        let r = &s.records[0];
        assert_eq!(r.date, NaiveDate::from_ymd_opt(2015, 8, 8).unwrap());
        assert_eq!(r.result, MatchResult::AwayWin);
        let b = r.odds("B365").unwrap().odds();
        assert_eq!((b.home, b.draw, b.away), (2.00, 3.60, 4.00));
        assert_eq!(r.key(), "2015-08-08 Bournemouth v Aston Villa");
        assert_eq!(s.houses, vec!["B365", "IW"]);
    }

    #[test]
    fn empty_cell_drops_only_that_house() {
        let s = parse(&format!(
            "{HEADER}\nE0,08/08/15,A,B,0,0,D,2.00,3.60,4.00,,3.30,3.30\n"
        ));
        let r = &s.records[0];
        assert!(r.odds("B365").is_some());
        assert!(r.odds("IW").is_none());
        let w: Vec<_> = s.warnings.iter().filter(|w| w.row == 1).collect();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].bookmaker.as_deref(), Some("IW"));
        assert!(!w[0].row_skipped);
    }

    #[test]
    fn unit_odds_are_rejected() {
        let s = parse(&format!(
            "{HEADER}\nE0,08/08/15,A,B,0,0,D,1.00,3.60,4.00,2.1,3.3,3.3\n"
        ));
        assert!(s.records[0].odds("B365").is_none());
    }

    #[test]
    fn missing_houses_are_noted_at_file_level() {
        let s = parse(&format!("{HEADER}\n"));
        let file_level: Vec<_> = s
            .warnings
            .iter()
            .filter(|w| w.row == 0)
            .filter_map(|w| w.bookmaker.clone())
            .collect();
        assert_eq!(file_level, vec!["BW", "LB", "WH", "VC"]);
    }

    #[test]
    fn four_digit_years_bom_and_crlf() {
        let body = format!("\u{feff}{HEADER}\r\nE0,09/08/2015,A,B,0,0,H,2,3,4,2,3,4\r\n");
        let s = parse(&body);
        assert_eq!(s.records.len(), 1);
        assert_eq!(
            s.records[0].date,
            NaiveDate::from_ymd_opt(2015, 8, 9).unwrap()
        );
        assert_eq!(s.records[0].result, MatchResult::HomeWin);
    }

    #[test]
    fn malformed_rows_are_skipped_with_warning() {
        let body = format!(
            "{HEADER}\n\
             E0,31/02/15,A,B,0,0,D,2,3,4,2,3,4\n\
             E0,01/03/15,A,A,0,0,D,2,3,4,2,3,4\n\
             E0,01/03/15,,B,0,0,D,2,3,4,2,3,4\n\
             ,,,,,,,,,,,,\n\
             E0,01/03/15,C,D\n"
        );
        let s = parse(&body);
        assert_eq!(s.data_rows, 5);
        assert_eq!(s.skipped_rows(), 4);
        assert_eq!(s.records.len() + s.skipped_rows(), s.data_rows);
        // a short row keeps the fixture; the odds are simply absent
        assert_eq!(s.records[0].row, 5);
        assert_eq!(s.records[0].result, MatchResult::Unknown);
        assert!(s.records[0].odds_by_house.is_empty());
    }

    #[test]
    fn missing_required_column_is_fatal() {
        let err = parse_season(
            "Date,HomeTeam\n01/01/15,A\n".as_bytes(),
            &default_column_maps(),
        )
        .unwrap_err();
        match err {
            IngestError::Header { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("AwayTeam"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_season("".as_bytes(), &default_column_maps()).is_err());
    }

    #[test]
    fn parsing_is_idempotent() {
        let a = parse(SAMPLE_CSV);
        let b = parse(SAMPLE_CSV);
        assert_eq!(a, b);
    }

    #[test]
    fn sample_has_ten_fixtures() {
        let s = parse(SAMPLE_CSV);
        assert_eq!(s.records.len(), 10);
        assert!(s.records.iter().all(|r| r.odds("B365").is_some()));
        assert_eq!(s.houses.len(), 6);
    }

    #[test]
    fn date_formats() {
        assert_eq!(parse_date("08/08/15"), NaiveDate::from_ymd_opt(2015, 8, 8));
        assert_eq!(
            parse_date("08/08/2015"),
            NaiveDate::from_ymd_opt(2015, 8, 8)
        );
        assert_eq!(parse_date("2015-08-08"), None);
        assert_eq!(parse_date("8/8/015"), None);
    }
}
