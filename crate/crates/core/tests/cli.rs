mod common;

use common::*;
use std::fs;
use std::path::Path;
use sta_tsp::bench::BenchReport;
use sta_tsp::cli::run_from_args;
use sta_tsp::{tour_length, Tour};

fn args<'a>(cmd: &'a str, out: &'a Path, extra: &[&'a str]) -> Vec<String> {
    let mut v = vec!["sta-tsp".to_string(), cmd.to_string()];
    v.push("--instance".into());
    v.push(data_path("berlin52.tsp"));
    v.push("--out".into());
    v.push(out.to_string_lossy().into_owned());
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

#[test]
fn solve_writes_valid_tour_and_reproducible_json() {
    let dir = tempfile::tempdir().unwrap();
    let written = run_from_args(args("solve", dir.path(), &["--seed", "7", "--iters", "30"])).unwrap();
    assert_eq!(written.len(), 3);

    let tour: Tour = fs::read_to_string(dir.path().join("berlin52_sta.tour")).unwrap().trim().parse().unwrap();
    assert_eq!(tour.len(), 52);
    let json = fs::read_to_string(dir.path().join("berlin52_sta_solve.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let inst = load("berlin52");
    let expected = tour_length(&tour, &inst.distance_matrix()).unwrap();
    assert_eq!(v["best_length"].as_f64().unwrap(), expected);

    let trace = fs::read_to_string(dir.path().join("berlin52_sta_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 31);

    let again = tempfile::tempdir().unwrap();
    run_from_args(args("solve", again.path(), &["--seed", "7", "--iters", "30"])).unwrap();
    let json2 = fs::read_to_string(again.path().join("berlin52_sta_solve.json")).unwrap();
    assert_eq!(json, json2);
}

#[test]
fn metric_flag_changes_lengths() {
    let raw = tempfile::tempdir().unwrap();
    let rounded = tempfile::tempdir().unwrap();
    let common = ["--seed", "3", "--iters", "5"];
    run_from_args(args("solve", raw.path(), &common)).unwrap();
    let mut extra = common.to_vec();
    extra.extend(["--metric", "euc2d"]);
    run_from_args(args("solve", rounded.path(), &extra)).unwrap();
    let read = |p: &Path| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(p.join("berlin52_sta_solve.json")).unwrap()).unwrap()
    };
    let a = read(raw.path())["best_length"].as_f64().unwrap();
    let b = read(rounded.path())["best_length"].as_f64().unwrap();
    assert_eq!(b.fract(), 0.0);
    assert_ne!(a, b);

    let bad = tempfile::tempdir().unwrap();
    assert!(run_from_args(args("solve", bad.path(), &["--metric", "geo"])).is_err());
}

#[test]
fn bench_writes_reports_and_table() {
    let dir = tempfile::tempdir().unwrap();
    run_from_args(args(
        "bench",
        dir.path(),
        &["--solvers", "sta,sa", "--trials", "1", "--seed", "2", "--iters", "20"],
    ))
    .unwrap();
    for s in ["sta", "sa"] {
        let r: BenchReport =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("berlin52_{s}_report.json"))).unwrap())
                .unwrap();
        assert_eq!(r.trials.len(), 1);
        assert_eq!(r.stdev, 0.0);
        assert_eq!(r.avg_trace.len(), 20);
    }
    assert!(dir.path().join("berlin52_sa_current_trace.csv").exists());
    assert!(!dir.path().join("berlin52_sta_current_trace.csv").exists());
    let table = fs::read_to_string(dir.path().join("berlin52_table.txt")).unwrap();
    let header: Vec<_> = table.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["instance", "solver", "best", "mean", "worst", "st.dev.", "time(s)"]);
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn compare_condenses_to_shortest_trace() {
    let dir = tempfile::tempdir().unwrap();
    run_from_args(args("compare", dir.path(), &["--solvers", "sta,sa", "--trials", "2", "--seed", "4"])).unwrap();
    let csv = fs::read_to_string(dir.path().join("berlin52_compare.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "iteration,sta,sa");
    let rows: Vec<Vec<f64>> =
        lines.map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    for col in 0..2 {
        assert!(rows.windows(2).all(|w| w[1][col] <= w[0][col]));
    }
}

#[test]
fn compare_rejects_bad_solver_lists() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_from_args(args("compare", dir.path(), &["--solvers", "sta"])).is_err());
    assert!(run_from_args(args("compare", dir.path(), &["--solvers", "sta,sta"])).is_err());
    assert!(run_from_args(args("bench", dir.path(), &["--solvers", "tabu"])).is_err());
    assert!(run_from_args(args("bench", dir.path(), &["--trials", "0"])).is_err());
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn missing_instance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_from_args([
        "sta-tsp",
        "solve",
        "--instance",
        "/nonexistent/x.tsp",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.is_err());
}
