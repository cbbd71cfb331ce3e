use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use latplan::commands::{self, BenchMode, Overrides};
use latplan::ResultFile;
use latplan_core::geometry;
use latplan_core::lattice::boundary_tol;
use latplan_core::PlanStatus;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn latplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latplan")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn plan_free_space_exits_zero_with_a_valid_path() {
    let path = scenario("free");
    let o = latplan(&["plan", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = ResultFile::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.status, "solved");
    let file = commands::load_scenario(&path).unwrap();
    let sc = file.to_scenario().unwrap();
    assert_eq!(r.path.first().unwrap(), &sc.start);
    assert_eq!(r.path.last().unwrap(), &sc.goal);
    let mut total = 0.0;
    for w in r.path.windows(2) {
        let l: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(l <= r.r_star + boundary_tol(r.r_star));
        assert!(geometry::is_segment_free(&sc.workspace, &sc.team, &w[0], &w[1], 0.1 * r.beta_star).unwrap());
        total += l;
    }
    assert!((total - r.length.unwrap()).abs() < 1e-9);
    assert!(r.stats.wall_time.is_none());
}

#[test]
fn plan_sealed_exits_two_on_every_rung() {
    let o = latplan(&["plan", scenario("sealed").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = ResultFile::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.status, "infeasible_certified");
    assert!(r.attempts.len() > 10);
    assert!(r.attempts.iter().all(|a| a.status == "infeasible_certified"));
    assert!(r.path.is_empty() && r.length.is_none());
    // The ladder decreases geometrically.
    for w in r.attempts.windows(2) {
        assert!((w[1].delta / w[0].delta - 0.8).abs() < 1e-12);
    }
}

#[test]
fn node_cap_exits_three() {
    let o = latplan(&["plan", scenario("corridor").to_str().unwrap(), "--node-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let r = ResultFile::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.status, "exhausted_budget");
    assert_eq!(r.attempts.len(), 1);
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(latplan(&[]).status.code(), Some(1));
    assert_eq!(latplan(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(latplan(&["plan", "/nonexistent/scenario.toml"]).status.code(), Some(1));
    assert_eq!(latplan(&["params", "--family", "hex"]).status.code(), Some(1));
    assert_eq!(latplan(&["params", "--delta", "-1"]).status.code(), Some(1));
    assert_eq!(latplan(&["complexity", "--dims", "1..3"]).status.code(), Some(1));
    assert_eq!(latplan(&["--help"]).status.code(), Some(0));
    assert_eq!(latplan(&["--version"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "version = 1\nname = \"bad\"\n[workspace]\nbounds = [0.0, 0.0, 4.0, 4.0]\n[robots]\nradii = [0.5, 0.5]\nstarts = [[1.0, 1.0], [9.0, 1.0]]\ngoals = [[3.0, 3.0], [1.0, 3.0]]\n").unwrap();
    let o = latplan(&["plan", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("robot 1"));
}

#[test]
fn params_block_scales_with_delta() {
    let value = |text: &str, key: &str| -> f64 {
        let line = text.lines().find(|l| l.split_whitespace().next() == Some(key)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    let one = stdout(&latplan(&["params", "--d", "3", "--family", "astar", "--delta", "1", "--eps", "2"]));
    let two = stdout(&latplan(&["params", "--d", "3", "--family", "astar", "--delta", "2", "--eps", "2"]));
    assert!((value(&one, "beta_star") - 0.894427191).abs() < 1e-9);
    assert!((value(&one, "r_star") - 2.683281573).abs() < 1e-9);
    for key in ["beta_star", "r_star", "scale"] {
        assert!((value(&two, key) / value(&one, key) - 2.0).abs() < 1e-9, "{key}");
    }
    for family in ["z", "dstar", "astar"] {
        let t = stdout(&latplan(&["params", "--d", "4", "--family", family]));
        assert!((value(&t, "theta_bar") - 3.0 * value(&t, "covering_radius")).abs() < 1e-9);
    }
}

#[test]
fn complexity_rows_and_empty_cells() {
    let o = latplan(&["complexity", "--dims", "2..6", "--delta", "1", "--eps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("family,d,delta,eps,theta_bar,leading,exact,residual,cc_exact,cc_naive,cc_annuli,zeta\n"));
    assert_eq!(csv_rows(&text).len(), 15);

    let capped = stdout(&latplan(&["complexity", "--dims", "2,8", "--cap", "1000"]));
    let rows = csv_rows(&capped);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let empty = r[6].is_empty() && r[7].is_empty() && r[8].is_empty();
        assert_eq!(empty, r[1] == "8", "{r:?}");
    }
}

#[test]
fn sweep_reports_failures_with_empty_length() {
    let o = latplan(&["sweep-eps", scenario("corridor").to_str().unwrap(), "--delta", "0.5", "--eps-list", "10,2,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "infeasible_certified");
    assert_eq!(rows[0][3], "");
    assert_eq!(rows[2][2], "solved");
    assert!(!rows[2][3].is_empty());
}

#[test]
fn sweep_on_free_space_shortens_with_eps() {
    let file = commands::load_scenario(&scenario("free")).unwrap();
    let (_, rows) = commands::run_sweep_eps(&file, &Overrides::default(), &[10.0, 2.0, 0.5]).unwrap();
    let lengths: Vec<f64> = rows.iter().map(|r| r.length.unwrap()).collect();
    assert!(lengths.windows(2).all(|w| w[1] <= w[0]), "{lengths:?}");
}

#[test]
fn bench_rows_are_normalised_to_astar_loc() {
    let file = commands::load_scenario(&scenario("corridor")).unwrap();
    let report = commands::run_bench(&file, &Overrides::default(), &BenchMode::defaults(), 4).unwrap();
    assert_eq!(report.rows.len(), 5);
    for row in &report.rows {
        if row.label == "random" {
            assert_eq!(row.runs, 4);
        } else {
            assert_eq!(row.runs, 1);
            assert!(row.success_rate() == 0.0 || row.success_rate() == 100.0);
        }
        assert!(row.time.is_none());
    }
    let a = report.row("astar-loc").unwrap();
    assert_eq!(a.length_norm, Some(1.0));
    // glo over the same lattice finds the same optimum.
    let glo = report.row("astar-glo").unwrap().length.unwrap();
    assert!((glo - a.length.unwrap()).abs() < 1e-9);

    // Without astar-loc in the list the baseline is still astar-loc.
    let only_z = commands::run_bench(&file, &Overrides::default(), &["z-loc".parse().unwrap()], 1).unwrap();
    let z = &only_z.rows[0];
    assert!((z.length_norm.unwrap() - z.length.unwrap() / a.length.unwrap()).abs() < 1e-12);
}

#[test]
fn record_time_fills_timings() {
    let file = commands::load_scenario(&scenario("free")).unwrap();
    let o = Overrides { record_time: true, ..Overrides::default() };
    let (r, status) = commands::run_plan(&file, &o).unwrap();
    assert_eq!(status, PlanStatus::Solved);
    assert!(r.stats.wall_time.is_some());
    assert!(r.attempts.iter().all(|a| a.stats.wall_time.is_some()));
}

#[test]
fn overrides_beat_scenario_defaults() {
    let file = commands::load_scenario(&scenario("free")).unwrap();
    let o = Overrides {
        delta: Some(0.7),
        eps: Some(1.0),
        family: Some(latplan_core::LatticeFamily::Zd),
        ..Overrides::default()
    };
    let (r, _) = commands::run_plan(&file, &o).unwrap();
    assert_eq!((r.delta, r.eps, r.family.as_str()), (0.7, 1.0, "z"));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = latplan(&["plan", scenario("zigzag").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = ResultFile::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.scenario, "zigzag");
}
