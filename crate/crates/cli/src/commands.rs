use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use overround::ingest::parse_date;
use overround::odds::{fair_fractional_odds, house_variance_closed_form};
use overround::{
    default_column_maps, house_scheme, implied_triple, overround as overround_of, parse_season,
    rank_houses, simulate_player_vs_house, solve_season, summarize_margins, Cell, InputPrecision,
    MatchRecord, ParsedSeason, Probability, SchemeSpec, SeasonMargins, SimConfig, SolverConfig,
    Table,
};

use crate::{
    CompareArgs, Failure, Format, HistArgs, ImputeArgs, Output, OverroundArgs, SimulateArgs,
};

const TEXT_PLACES: u32 = 2;

fn load(path: &Path) -> Result<ParsedSeason, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))?;
    let season = parse_season(file, &default_column_maps())
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    for w in season.warnings.iter().filter(|w| w.row_skipped) {
        warn!("{w}");
    }
    Ok(season)
}

/// The requested bookmakers, or every bookmaker in the file when none given.
fn select_houses(season: &ParsedSeason, requested: &[String]) -> Result<Vec<String>, Failure> {
    if requested.is_empty() {
        return Ok(season.houses.clone());
    }
    for h in requested {
        if !season.houses.contains(h) {
            return Err(Failure::usage(format!(
                "unknown house {h:?}; valid houses: {}",
                season.houses.join(", ")
            )));
        }
    }
    Ok(requested.to_vec())
}

/// Writes a table in the requested format and returns the file it went to.
fn emit(table: &Table, output: &Output, places: u32) -> Result<Vec<PathBuf>, Failure> {
    let body = match output.format {
        Format::Csv => table.to_csv(None).map_err(Failure::data)?,
        Format::Text => table.to_text(places),
    };
    write_out(&body, output.out.as_deref())
}

fn write_out(body: &str, path: Option<&Path>) -> Result<Vec<PathBuf>, Failure> {
    match path {
        Some(p) => {
            fs::write(p, body)
                .map_err(|e| Failure::data(format!("writing {}: {e}", p.display())))?;
            Ok(vec![p.to_path_buf()])
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::data(format!("writing standard output: {e}")))?;
            Ok(Vec::new())
        }
    }
}

fn match_cells(r: &MatchRecord) -> Vec<Cell> {
    vec![
        Cell::from(r.row),
        r.date.format("%Y-%m-%d").to_string().into(),
        r.home_team.as_str().into(),
        r.away_team.as_str().into(),
    ]
}

pub fn overround(a: &OverroundArgs) -> Result<Vec<PathBuf>, Failure> {
    let season = load(&a.input)?;
    let houses = select_houses(&season, &a.houses)?;
    let mut t = Table::new([
        "row",
        "date",
        "home",
        "away",
        "house",
        "odds_home",
        "odds_draw",
        "odds_away",
        "p_home",
        "p_draw",
        "p_away",
        "sum",
        "overround",
    ]);
    for r in &season.records {
        for h in &houses {
            let Some(m) = r.odds(h) else { continue };
            let o = m.odds();
            let p = implied_triple(m);
            let mut row = match_cells(r);
            row.extend([
                Cell::from(h.as_str()),
                o.home.into(),
                o.draw.into(),
                o.away.into(),
                p.home.into(),
                p.draw.into(),
                p.away.into(),
                p.sum().into(),
                overround_of(m).into(),
            ]);
            t.push(row).map_err(Failure::data)?;
        }
    }
    emit(&t, &a.output, TEXT_PLACES)
}

fn solver_config(tol: f64, paper_rounding: bool) -> Result<SolverConfig, Failure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(SolverConfig {
        tol,
        precision: if paper_rounding {
            InputPrecision::TwoPlaceRounded
        } else {
            InputPrecision::Full
        },
        ..SolverConfig::default()
    })
}

fn solve_houses(
    season: &ParsedSeason,
    houses: &[String],
    cfg: &SolverConfig,
) -> Result<Vec<(String, SeasonMargins)>, Failure> {
    houses
        .iter()
        .map(|h| {
            solve_season(&season.records, &season.houses, h, cfg)
                .map(|m| (h.clone(), m))
                .map_err(Failure::data)
        })
        .collect()
}

pub fn impute(a: &ImputeArgs) -> Result<Vec<PathBuf>, Failure> {
    let cfg = solver_config(a.tol, a.paper_rounding)?;
    let season = load(&a.input)?;
    let houses = select_houses(&season, &a.houses)?;
    let solved = solve_houses(&season, &houses, &cfg)?;

    let mut t = Table::new([
        "row",
        "match",
        "house",
        "status",
        "overround",
        "epsilon",
        "residual",
        "iterations",
        "bracket_low",
        "bracket_high",
    ]);
    for (_, m) in &solved {
        for e in &m.estimates {
            t.push(vec![
                e.row.into(),
                e.match_key.as_str().into(),
                e.bookmaker.as_str().into(),
                "ok".into(),
                e.overround.into(),
                e.epsilon.into(),
                Cell::Num(e.residual),
                e.iterations.into(),
                e.bracket_low.into(),
                e.bracket_high.into(),
            ])
            .map_err(Failure::data)?;
        }
    }
    for (_, m) in &solved {
        for s in &m.skipped {
            let mut row = vec![
                s.row.into(),
                s.match_key.as_str().into(),
                s.bookmaker.as_str().into(),
                format!("skipped: {}", s.reason).into(),
            ];
            row.extend((0..6).map(|_| Cell::empty()));
            t.push(row).map_err(Failure::data)?;
        }
    }
    // residuals are around 1e-11, so the text view needs more places
    emit(&t, &a.output, 4)
}

pub fn summarize(a: &ImputeArgs) -> Result<Vec<PathBuf>, Failure> {
    let cfg = solver_config(a.tol, a.paper_rounding)?;
    let season = load(&a.input)?;
    let houses = select_houses(&season, &a.houses)?;
    let solved = solve_houses(&season, &houses, &cfg)?;

    let mut stats = Vec::new();
    for (h, m) in &solved {
        match summarize_margins(&m.estimates) {
            Ok(s) => stats.push((h.clone(), s)),
            Err(_) => warn!("{h}: no estimates, left out of the summary"),
        }
    }
    if stats.is_empty() {
        return Err(Failure::data("no estimates to summarise"));
    }
    let mut columns = vec![String::new()];
    columns.extend(stats.iter().map(|(h, _)| h.clone()));
    let mut t = Table::new(columns);
    type StatCell = fn(&overround::SummaryStats) -> Cell;
    let rows: [(&str, StatCell); 6] = [
        ("Mean", |s| s.mean.into()),
        ("Median", |s| s.median.into()),
        ("Maximum", |s| s.maximum.into()),
        ("Minimum", |s| s.minimum.into()),
        ("Sd", |s| s.sd.into()),
        ("Count", |s| s.count.into()),
    ];
    for (label, get) in rows {
        let mut row = vec![Cell::from(label)];
        row.extend(stats.iter().map(|(_, s)| get(s)));
        t.push(row).map_err(Failure::data)?;
    }
    emit(&t, &a.output, TEXT_PLACES)
}

pub fn hist(a: &HistArgs) -> Result<Vec<PathBuf>, Failure> {
    if !(a.bins.is_finite() && a.bins > 0.0) {
        return Err(Failure::usage(format!(
            "bin width must be positive, got {}",
            a.bins
        )));
    }
    let cfg = solver_config(a.tol, a.paper_rounding)?;
    let season = load(&a.input)?;
    let houses = select_houses(&season, &a.houses)?;
    let solved = solve_houses(&season, &houses, &cfg)?;

    let estimates: BTreeMap<String, Vec<f64>> = solved
        .iter()
        .map(|(h, m)| (h.clone(), m.estimates.iter().map(|e| e.epsilon).collect()))
        .collect();
    if estimates.values().all(Vec::is_empty) {
        return Err(Failure::data("no estimates to bin"));
    }
    let h = overround::margin_histogram(&estimates, a.bins).map_err(Failure::data)?;

    let mut columns = vec!["bin_low".to_string(), "bin_high".to_string()];
    columns.extend(h.counts.keys().cloned());
    let mut t = Table::new(columns);
    for i in 0..h.bins() {
        let mut row = vec![Cell::from(h.bin_edges[i]), Cell::from(h.bin_edges[i + 1])];
        row.extend(h.counts.values().map(|c| Cell::from(c[i] as usize)));
        t.push(row).map_err(Failure::data)?;
    }
    let mut written = emit(&t, &a.output, 4)?;
    if let Some(svg) = &a.svg {
        let doc = overround::histogram_svg(&h, "Imputed margin per match");
        written.extend(write_out(&doc, Some(svg))?);
    }
    Ok(written)
}

fn find_match<'a>(season: &'a ParsedSeason, a: &CompareArgs) -> Result<&'a MatchRecord, Failure> {
    if let Some(row) = a.row {
        return season
            .records
            .iter()
            .find(|r| r.row == row)
            .ok_or_else(|| Failure::usage(format!("no match at row {row}")));
    }
    let (Some(date), Some(home), Some(away)) = (&a.date, &a.home, &a.away) else {
        return Err(Failure::usage(
            "select a match with --row or --date/--home/--away",
        ));
    };
    let date = parse_date(date).ok_or_else(|| Failure::usage(format!("bad date {date:?}")))?;
    let hits: Vec<&MatchRecord> = season
        .records
        .iter()
        .filter(|r| r.date == date && &r.home_team == home && &r.away_team == away)
        .collect();
    match hits.as_slice() {
        [one] => Ok(one),
        [] => Err(Failure::usage(format!("no match {date} {home} v {away}"))),
        many => Err(Failure::usage(format!(
            "{} matches for {date} {home} v {away} (rows {})",
            many.len(),
            many.iter()
                .map(|r| r.row.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

pub fn compare(a: &CompareArgs) -> Result<Vec<PathBuf>, Failure> {
    let season = load(&a.input)?;
    let record = find_match(&season, a)?;
    let ranking = rank_houses(record).map_err(Failure::data)?;
    let mut t = Table::new([
        "rank",
        "house",
        "odds_home",
        "odds_draw",
        "odds_away",
        "p_home",
        "p_draw",
        "p_away",
        "sum",
        "overround",
    ]);
    for (i, (h, over)) in ranking.entries.iter().enumerate() {
        let m = &record.odds_by_house[h];
        let p = implied_triple(m);
        let o = m.odds();
        t.push(vec![
            (i + 1).into(),
            h.as_str().into(),
            o.home.into(),
            o.draw.into(),
            o.away.into(),
            p.home.into(),
            p.draw.into(),
            p.away.into(),
            p.sum().into(),
            (*over).into(),
        ])
        .map_err(Failure::data)?;
    }
    let body = match a.output.format {
        Format::Csv => t.to_csv(None).map_err(Failure::data)?,
        Format::Text => format!("{}\n{}", ranking.match_key, t.to_text(TEXT_PLACES)),
    };
    write_out(&body, a.output.out.as_deref())
}

pub fn simulate(a: &SimulateArgs) -> Result<Vec<PathBuf>, Failure> {
    let p = Probability::new(a.p)
        .ok()
        .filter(|p| p.value() > 0.0 && p.value() < 1.0)
        .ok_or_else(|| {
            Failure::usage(format!("p must lie strictly between 0 and 1, got {}", a.p))
        })?;
    if a.trials == 0 {
        return Err(Failure::usage("trials must be at least 1"));
    }
    let fair_payout = fair_fractional_odds(p).map_err(Failure::usage)?.value();
    let epsilon = match (a.epsilon, a.payout) {
        (Some(e), _) => e,
        (None, Some(x)) => fair_payout - x,
        (None, None) => return Err(Failure::usage("give --epsilon or --payout")),
    };
    let scheme = house_scheme(p, epsilon).map_err(Failure::usage)?;
    let cfg = SimConfig::new(SchemeSpec::Two(scheme), a.trials, a.seed);
    let (house, player) = simulate_player_vs_house(&cfg).map_err(Failure::usage)?;

    let mean = epsilon * p.value();
    let var = house_variance_closed_form(p, epsilon);
    let mut t = Table::new([
        "quantity",
        "simulated",
        "closed_form",
        "standard_error",
        "z",
    ]);
    let z = |x: f64, target: f64, se: f64| if se > 0.0 { (x - target) / se } else { 0.0 };
    let rows = vec![
        vec![
            "house_mean".into(),
            house.sample_mean.into(),
            mean.into(),
            house.standard_error.into(),
            z(house.sample_mean, mean, house.standard_error).into(),
        ],
        vec![
            "player_mean".into(),
            player.sample_mean.into(),
            (-mean).into(),
            player.standard_error.into(),
            z(player.sample_mean, -mean, player.standard_error).into(),
        ],
        vec![
            "house_variance".into(),
            house.sample_variance.into(),
            var.into(),
            Cell::empty(),
            Cell::empty(),
        ],
    ];
    for r in rows {
        t.push(r).map_err(Failure::data)?;
    }
    let body = match a.output.format {
        Format::Csv => t.to_csv(None).map_err(Failure::data)?,
        Format::Text => format!(
            "p={} payout={} epsilon={} trials={} seed={} generator={}\n{}",
            p.value(),
            scheme.payout(),
            epsilon,
            house.trials,
            house.seed,
            house.generator,
            t.to_text(4)
        ),
    };
    write_out(&body, a.output.out.as_deref())
}
