//! Command implementations, independent of argument parsing so they can be
//! driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use latplan_core::complexity::{self, theta_bar};
use latplan_core::planner::{self, Clock};
use latplan_core::{
    CompletenessParams, EnumerationLimits, Error as CoreError, LatticeFamily, LatticeSpec, Mode, PlanOutcome,
    PlanStatus, PlannerConfig, SampleSet, Scenario, SearchStats,
};
use thiserror::Error;

use crate::report::{complexity_csv, fmt_g, opt_g, Table};
use crate::result::{self, Attempt, ResultFile, StatsRecord};
use crate::scenario::{parse_scenario, ScenarioError, ScenarioFile};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Scenario {
        path: PathBuf,
        #[source]
        source: ScenarioError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const BUDGET: i32 = 3;
}

pub fn exit_code(status: PlanStatus) -> i32 {
    match status {
        PlanStatus::Solved => exit::OK,
        PlanStatus::InfeasibleCertified => exit::INFEASIBLE,
        PlanStatus::ExhaustedBudget => exit::BUDGET,
    }
}

/// Wall clock measured from construction.
pub struct StdClock(Instant);

impl StdClock {
    pub fn start() -> Self {
        StdClock(Instant::now())
    }
}

impl Clock for StdClock {
    fn now_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Command-line values that take precedence over scenario defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub family: Option<LatticeFamily>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub psi: Option<f64>,
    pub spacing: Option<f64>,
    pub node_cap: Option<usize>,
    pub time_cap: Option<f64>,
    /// Fill wall-time fields. Off by default: timings differ between runs.
    pub record_time: bool,
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, CommandError> {
    let text = std::fs::read_to_string(path).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text).map_err(|source| CommandError::Scenario { path: path.to_path_buf(), source })
}

pub fn write_output(path: &Path, contents: &str) -> Result<(), CommandError> {
    std::fs::write(path, contents).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
}

/// Parameter block for one lattice family and dimension.
pub fn params_text(delta: f64, eps: f64, family: LatticeFamily, d: usize) -> Result<String, CommandError> {
    let p = CompletenessParams::new(delta, eps)?;
    let set = SampleSet::at_origin(family, d, p)?;
    let spec = &set.spec;
    let theta = theta_bar(spec.covering_radius, eps);
    let mut s = String::new();
    let mut line = |k: &str, v: String| writeln!(s, "{k:<16}{v}").expect("string write");
    line("family", family.name().to_string());
    line("d", d.to_string());
    line("delta", fmt_g(delta));
    line("eps", fmt_g(eps));
    line("beta_star", fmt_g(p.beta_star));
    line("r_star", fmt_g(p.r_star));
    line("covering_radius", fmt_g(spec.covering_radius));
    line("scale", fmt_g(set.scale));
    line("det", fmt_g(spec.det_gram));
    line("theta_bar", fmt_g(theta));
    line("leading", fmt_g(complexity::leading_sample_term(spec, theta)));
    line("zeta", fmt_g(complexity::zeta(d)));
    Ok(s)
}

pub fn complexity_text(
    families: &[LatticeFamily],
    dims: &[usize],
    delta: f64,
    eps: f64,
    limits: EnumerationLimits,
) -> Result<String, CommandError> {
    let rows = complexity::sweep_report(families, dims, delta, eps, limits)?;
    Ok(complexity_csv(&rows))
}

struct Resolved {
    family: LatticeFamily,
    mode: Mode,
    eps: f64,
    base: PlannerConfig,
}

fn resolve(file: &ScenarioFile, o: &Overrides) -> Result<Resolved, CommandError> {
    let d = &file.defaults;
    let bad = |source| CommandError::Scenario { path: PathBuf::from(&file.name), source };
    let family = match o.family {
        Some(f) => f,
        None => file.family().map_err(bad)?,
    };
    let mode = match o.mode {
        Some(m) => m,
        None => file.mode().map_err(bad)?,
    };
    let eps = o.eps.unwrap_or(d.eps);
    let mut base = PlannerConfig::new(mode, family, 1.0, eps);
    base.seed = o.seed.unwrap_or(d.seed);
    base.psi = o.psi.or(d.psi);
    base.edge_spacing = o.spacing.or(d.edge_spacing);
    if let Some(cap) = o.node_cap.or(d.node_cap) {
        base.node_cap = cap;
    }
    base.time_cap = o.time_cap.or(d.time_cap);
    Ok(Resolved { family, mode, eps, base })
}

/// Runs one configuration; a refused enumeration counts as an exhausted
/// budget rather than an error.
fn run_once(sc: &Scenario, cfg: &PlannerConfig) -> Result<PlanOutcome, CommandError> {
    let clock = StdClock::start();
    match planner::plan(sc, cfg, &clock) {
        Ok(out) => Ok(out),
        Err(CoreError::Capacity { .. }) => Ok(PlanOutcome {
            status: PlanStatus::ExhaustedBudget,
            path: Vec::new(),
            length: None,
            stats: SearchStats { wall_time: clock.now_secs(), ..SearchStats::default() },
        }),
        Err(e) => Err(e.into()),
    }
}

fn scale_of(family: LatticeFamily, d: usize, p: &CompletenessParams) -> Result<f64, CommandError> {
    Ok(p.beta_star / LatticeSpec::new(family, d)?.covering_radius)
}

/// Plans over the clearance ladder (or the single given `delta`), stopping
/// at the first attempt that does not certify infeasibility.
pub fn run_plan(file: &ScenarioFile, o: &Overrides) -> Result<(ResultFile, PlanStatus), CommandError> {
    let sc = file.to_scenario().map_err(|source| CommandError::Scenario { path: PathBuf::from(&file.name), source })?;
    let r = resolve(file, o)?;
    let deltas = match o.delta.or(file.defaults.delta) {
        Some(d) => vec![d],
        None => planner::select_delta(&sc)?,
    };
    let mut attempts = Vec::new();
    let mut last = None;
    for delta in deltas {
        let cfg = PlannerConfig { delta, ..r.base.clone() };
        let params = cfg.params()?;
        let out = run_once(&sc, &cfg)?;
        attempts.push(Attempt {
            delta,
            beta_star: params.beta_star,
            r_star: params.r_star,
            scale: scale_of(r.family, sc.dim(), &params)?,
            status: out.status.name().to_string(),
            stats: StatsRecord::new(&out.stats, o.record_time),
        });
        let stop = out.status != PlanStatus::InfeasibleCertified;
        last = Some(out);
        if stop {
            break;
        }
    }
    let out = last.expect("the ladder is never empty");
    let a = attempts.last().expect("at least one attempt").clone();
    let file = ResultFile {
        version: result::FORMAT_VERSION,
        scenario: file.name.clone(),
        mode: r.mode.name().to_string(),
        family: r.family.name().to_string(),
        eps: r.eps,
        status: out.status.name().to_string(),
        delta: a.delta,
        beta_star: a.beta_star,
        r_star: a.r_star,
        scale: a.scale,
        path: out.path,
        length: out.length,
        stats: a.stats,
        attempts,
    };
    Ok((file, out.status))
}

/// A planner flavour in a benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchMode {
    pub mode: Mode,
    pub family: LatticeFamily,
}

impl BenchMode {
    pub fn label(&self) -> String {
        match self.mode {
            Mode::RandomGlo => "random".to_string(),
            m => format!("{}-{}", self.family.name(), m.name()),
        }
    }

    /// `z-loc`, `dstar-loc`, `astar-loc`, `astar-glo` and `random`.
    pub fn defaults() -> Vec<BenchMode> {
        use LatticeFamily::*;
        vec![
            BenchMode { mode: Mode::LatticeLoc, family: Zd },
            BenchMode { mode: Mode::LatticeLoc, family: DdStar },
            BenchMode { mode: Mode::LatticeLoc, family: AdStar },
            BenchMode { mode: Mode::LatticeGlo, family: AdStar },
            BenchMode { mode: Mode::RandomGlo, family: AdStar },
        ]
    }
}

impl std::str::FromStr for BenchMode {
    type Err = CommandError;

    fn from_str(s: &str) -> Result<Self, CommandError> {
        if s == "random" {
            return Ok(BenchMode { mode: Mode::RandomGlo, family: LatticeFamily::AdStar });
        }
        let usage = || CommandError::Usage(format!("bad bench mode `{s}` (expected FAMILY-loc, FAMILY-glo or random)"));
        let (fam, mode) = s.split_once('-').ok_or_else(usage)?;
        let family = fam.parse().map_err(|_| usage())?;
        let mode = match mode.parse().map_err(|_| usage())? {
            Mode::RandomGlo => return Err(usage()),
            m => m,
        };
        Ok(BenchMode { mode, family })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub label: String,
    pub runs: usize,
    pub successes: usize,
    pub expanded: f64,
    pub vertex_checks: f64,
    pub edge_checks: f64,
    pub edge_check_configs: f64,
    /// Mean over successful runs.
    pub length: Option<f64>,
    pub length_norm: Option<f64>,
    pub time: Option<f64>,
}

impl BenchRow {
    pub fn success_rate(&self) -> f64 {
        100.0 * self.successes as f64 / self.runs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub delta: f64,
    pub eps: f64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, label: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&[
            "label",
            "delta",
            "eps",
            "runs",
            "success_rate",
            "expanded",
            "vertex_checks",
            "edge_checks",
            "edge_check_configs",
            "length",
            "length_norm",
            "time",
        ]);
        for r in &self.rows {
            t.row([
                r.label.clone(),
                fmt_g(self.delta),
                fmt_g(self.eps),
                r.runs.to_string(),
                fmt_g(r.success_rate()),
                fmt_g(r.expanded),
                fmt_g(r.vertex_checks),
                fmt_g(r.edge_checks),
                fmt_g(r.edge_check_configs),
                opt_g(r.length),
                opt_g(r.length_norm),
                opt_g(r.time),
            ]);
        }
        t.finish()
    }
}

/// Clearance for comparisons at matched parameters: the given value, or
/// the first ladder rung on which `A*_d`-loc does not certify infeasibility.
fn bench_delta(file: &ScenarioFile, sc: &Scenario, o: &Overrides) -> Result<f64, CommandError> {
    if let Some(d) = o.delta.or(file.defaults.delta) {
        return Ok(d);
    }
    let r = resolve(file, o)?;
    let ladder = planner::select_delta(sc)?;
    for &delta in &ladder {
        let cfg = PlannerConfig { delta, mode: Mode::LatticeLoc, family: LatticeFamily::AdStar, ..r.base.clone() };
        if run_once(sc, &cfg)?.status != PlanStatus::InfeasibleCertified {
            return Ok(delta);
        }
    }
    Ok(*ladder.last().expect("the ladder is never empty"))
}

/// Runs every flavour at one `(delta, eps)`. Random rows average `repeats`
/// seeds starting at the configured seed; lattice rows run once.
pub fn run_bench(
    file: &ScenarioFile,
    o: &Overrides,
    modes: &[BenchMode],
    repeats: usize,
) -> Result<BenchReport, CommandError> {
    if repeats == 0 {
        return Err(CommandError::Usage("repeats must be at least 1".into()));
    }
    let sc = file.to_scenario().map_err(|source| CommandError::Scenario { path: PathBuf::from(&file.name), source })?;
    let r = resolve(file, o)?;
    let delta = bench_delta(file, &sc, o)?;
    let mut rows = Vec::new();
    for bm in modes {
        let runs = if bm.mode == Mode::RandomGlo { repeats } else { 1 };
        let mut acc = [0.0f64; 4];
        let (mut successes, mut len_sum, mut time_sum) = (0usize, 0.0, 0.0);
        for k in 0..runs {
            let cfg = PlannerConfig {
                delta,
                mode: bm.mode,
                family: bm.family,
                seed: r.base.seed.wrapping_add(k as u64),
                ..r.base.clone()
            };
            let out = run_once(&sc, &cfg)?;
            let s = &out.stats;
            for (a, v) in acc.iter_mut().zip([s.expanded, s.vertex_checks, s.edge_checks, s.edge_check_configs]) {
                *a += v as f64;
            }
            time_sum += s.wall_time;
            if let Some(l) = out.length {
                successes += 1;
                len_sum += l;
            }
        }
        let n = runs as f64;
        rows.push(BenchRow {
            label: bm.label(),
            runs,
            successes,
            expanded: acc[0] / n,
            vertex_checks: acc[1] / n,
            edge_checks: acc[2] / n,
            edge_check_configs: acc[3] / n,
            length: (successes > 0).then(|| len_sum / successes as f64),
            length_norm: None,
            time: o.record_time.then_some(time_sum / n),
        });
    }
    let baseline_label = BenchMode { mode: Mode::LatticeLoc, family: LatticeFamily::AdStar }.label();
    let baseline = match rows.iter().find(|row| row.label == baseline_label) {
        Some(row) => row.length,
        None => {
            let cfg = PlannerConfig { delta, mode: Mode::LatticeLoc, family: LatticeFamily::AdStar, ..r.base.clone() };
            run_once(&sc, &cfg)?.length
        }
    };
    if let Some(b) = baseline {
        for row in &mut rows {
            row.length_norm = row.length.map(|l| l / b);
        }
    }
    Ok(BenchReport { delta, eps: r.eps, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub status: PlanStatus,
    pub length: Option<f64>,
    pub expanded: usize,
    pub edge_check_configs: usize,
    pub time: Option<f64>,
}

/// One planning run per `eps` at a fixed clearance (the given value, or the
/// start clearance when none is set).
pub fn run_sweep_eps(
    file: &ScenarioFile,
    o: &Overrides,
    eps_list: &[f64],
) -> Result<(f64, Vec<SweepRow>), CommandError> {
    if eps_list.is_empty() {
        return Err(CommandError::Usage("the eps list is empty".into()));
    }
    let sc = file.to_scenario().map_err(|source| CommandError::Scenario { path: PathBuf::from(&file.name), source })?;
    let r = resolve(file, o)?;
    let delta = o.delta.or(file.defaults.delta).unwrap_or_else(|| sc.start_clearance());
    let mut rows = Vec::new();
    for &eps in eps_list {
        let cfg = PlannerConfig { delta, eps, ..r.base.clone() };
        let out = run_once(&sc, &cfg)?;
        rows.push(SweepRow {
            eps,
            status: out.status,
            length: out.length,
            expanded: out.stats.expanded,
            edge_check_configs: out.stats.edge_check_configs,
            time: o.record_time.then_some(out.stats.wall_time),
        });
    }
    Ok((delta, rows))
}

pub fn sweep_csv(delta: f64, rows: &[SweepRow]) -> String {
    let mut t = Table::new(&["eps", "delta", "status", "length", "expanded", "edge_check_configs", "time"]);
    for r in rows {
        t.row([
            fmt_g(r.eps),
            fmt_g(delta),
            r.status.name().to_string(),
            opt_g(r.length),
            r.expanded.to_string(),
            r.edge_check_configs.to_string(),
            opt_g(r.time),
        ]);
    }
    t.finish()
}

/// `"2..8"` (inclusive) or `"2,3,5"`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, CommandError> {
    let bad = || CommandError::Usage(format!("bad dimension list `{s}` (use `2..8` or `2,3,5`)"));
    let dims: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(bad());
    }
    Ok(dims)
}
