use std::path::PathBuf;
use std::process::{Command, Output};

fn sample() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/sample_e0.csv")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overround"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn overround_text_reproduces_two_place_sums() {
    let s = sample();
    let o = run(&[
        "overround",
        "--input",
        s.to_str().unwrap(),
        "--house",
        "B365",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let sums: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().rev().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        sums,
        ["1.03", "1.03", "1.03", "1.03", "1.02", "1.03", "1.03", "1.02", "1.02", "1.02"]
    );
}

#[test]
fn overround_csv_keeps_full_precision_and_all_houses() {
    let s = sample();
    let o = run(&[
        "overround",
        "--input",
        s.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    // 10 B365 lines plus BW, IW, LB on the first fixture
    assert_eq!(rows.len(), 1 + 13);
    let first = &rows[1];
    assert_eq!(first[4], "B365");
    let sum: f64 = first[11].parse().unwrap();
    assert!((sum - (1.0 + 1.0 / 36.0)).abs() < 1e-15);
}

#[test]
fn unknown_house_is_a_usage_error() {
    let s = sample();
    let o = run(&["overround", "--input", s.to_str().unwrap(), "--house", "XX"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for h in ["B365", "BW", "IW", "LB", "WH", "VC"] {
        assert!(err.contains(h), "{err}");
    }
}

#[test]
fn unreadable_input_is_a_data_error() {
    let o = run(&["overround", "--input", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn impute_meets_tolerance_and_reports_skips() {
    let s = sample();
    let o = run(&[
        "impute",
        "--input",
        s.to_str().unwrap(),
        "--tol",
        "1e-10",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let ok: Vec<_> = rows.iter().skip(1).filter(|r| r[3] == "ok").collect();
    let skipped: Vec<_> = rows
        .iter()
        .skip(1)
        .filter(|r| r[3].starts_with("skipped"))
        .collect();
    // every house accounts for all ten fixtures
    assert_eq!(ok.len() + skipped.len(), 6 * 10);
    assert_eq!(ok.iter().filter(|r| r[2] == "B365").count(), 10);
    for r in &ok {
        let residual: f64 = r[6].parse().unwrap();
        assert!(residual.abs() <= 1e-10);
    }
    // skips come after the estimates
    let first_skip = rows
        .iter()
        .position(|r| r[3].starts_with("skipped"))
        .unwrap();
    assert!(rows[first_skip..]
        .iter()
        .all(|r| r[3].starts_with("skipped")));
}

#[test]
fn impute_rejects_zero_tolerance() {
    let s = sample();
    let o = run(&["impute", "--input", s.to_str().unwrap(), "--tol", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn paper_rounding_changes_the_first_estimate() {
    let s = sample();
    let args = [
        "impute",
        "--input",
        s.to_str().unwrap(),
        "--house",
        "B365",
        "--format",
        "csv",
    ];
    let full = csv_rows(&stdout(&run(&args)));
    let mut rounded_args = args.to_vec();
    rounded_args.push("--paper-rounding");
    let rounded = csv_rows(&stdout(&run(&rounded_args)));
    let e_full: f64 = full[1][5].parse().unwrap();
    let e_rounded: f64 = rounded[1][5].parse().unwrap();
    assert!((e_full - 0.073_460_310).abs() < 1e-8);
    assert!((e_rounded - 0.079_270_271).abs() < 1e-8);
}

#[test]
fn compare_selectors_agree() {
    let s = sample();
    let by_date = run(&[
        "compare",
        "--input",
        s.to_str().unwrap(),
        "--date",
        "08/08/15",
        "--home",
        "Bournemouth",
        "--away",
        "Aston Villa",
        "--format",
        "csv",
    ]);
    let by_row = run(&[
        "compare",
        "--input",
        s.to_str().unwrap(),
        "--row",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(by_date.status.code(), Some(0));
    assert_eq!(stdout(&by_date), stdout(&by_row));
    let rows = csv_rows(&stdout(&by_row));
    assert_eq!(rows[1][1], "B365");
    assert_eq!(rows.last().unwrap()[1], "IW");
}

#[test]
fn compare_without_a_match_is_a_usage_error() {
    let s = sample();
    let o = run(&[
        "compare",
        "--input",
        s.to_str().unwrap(),
        "--date",
        "01/01/16",
        "--home",
        "A",
        "--away",
        "B",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compare", "--input", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_reports_ambiguous_selector() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("dup.csv");
    std::fs::write(
        &p,
        "Date,HomeTeam,AwayTeam,B365H,B365D,B365A\n01/01/16,A,B,2,3,4\n01/01/16,A,B,2,3,4\n",
    )
    .unwrap();
    let o = run(&[
        "compare",
        "--input",
        p.to_str().unwrap(),
        "--date",
        "01/01/16",
        "--home",
        "A",
        "--away",
        "B",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows 1, 2"));
}

#[test]
fn summarize_lays_out_houses_as_columns() {
    let s = sample();
    let o = run(&[
        "summarize",
        "--input",
        s.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["", "B365", "BW", "IW", "LB"]);
    let labels: Vec<&str> = rows.iter().skip(1).map(|r| r[0].as_str()).collect();
    assert_eq!(
        labels,
        ["Mean", "Median", "Maximum", "Minimum", "Sd", "Count"]
    );
    assert_eq!(rows[6][1], "10");
}

#[test]
fn hist_writes_csv_svg_and_manifest() {
    let s = sample();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hist.csv");
    let svg = dir.path().join("hist.svg");
    let manifest = dir.path().join("run.json");
    let o = run(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "hist",
        "--input",
        s.to_str().unwrap(),
        "--house",
        "B365",
        "--bins",
        "0.01",
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rows = csv_rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(rows[0], ["bin_low", "bin_high", "B365"]);
    let total: u64 = rows
        .iter()
        .skip(1)
        .map(|r| r[2].parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 10);
    assert!(rows.len() - 1 <= 10);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "hist");
    assert_eq!(m["parameters"]["bins"], "0.01");
    let outputs: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(outputs.len(), 2);
    assert!(outputs.iter().all(|p| std::path::Path::new(p).exists()));
}

#[test]
fn hist_without_estimates_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fair.csv");
    std::fs::write(
        &p,
        "Date,HomeTeam,AwayTeam,B365H,B365D,B365A\n01/01/16,A,B,2,4,4\n",
    )
    .unwrap();
    let o = run(&["hist", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no estimates"));
}

#[test]
fn simulate_is_deterministic_and_near_the_closed_form() {
    let args = [
        "simulate", "--p", "0.606", "--payout", "0.6", "--trials", "1e6", "--seed", "42",
        "--format", "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let rows = csv_rows(&stdout(&a));
    let mean: f64 = rows[1][1].parse().unwrap();
    let se: f64 = rows[1][3].parse().unwrap();
    assert!((mean - 0.0304).abs() <= 4.0 * se);
    let player: f64 = rows[2][1].parse().unwrap();
    assert_eq!(player, -mean);
}

#[test]
fn simulate_rejects_bad_parameters() {
    assert_eq!(
        run(&["simulate", "--p", "1.2", "--epsilon", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--p", "0.5", "--epsilon", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["simulate", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "simulate",
            "--p",
            "0.5",
            "--epsilon",
            "0.1",
            "--trials",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}
