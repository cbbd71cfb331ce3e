//! Implicit A* over the roadmap `G(X, r)`: vertices are the collision-free
//! samples plus start and goal, edges join vertices at most `r` apart whose
//! straight segment is collision-free.
//!
//! Three flavours share one search loop:
//!
//! * lattice `loc`: neighbours of `q` are `q + N_0` for a template `N_0`
//!   enumerated once;
//! * lattice `glo`: the lattice points in the configuration box are listed
//!   explicitly and neighbours come from a radius query;
//! * random `glo`: as above with uniform samples and radius `r_rnd(n)`.
//!
//! Edges are collision-checked lazily, when their source vertex is expanded.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::Hash;

use hashbrown::HashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::completeness::{CompletenessParams, SampleSet};
use crate::complexity::ball_volume;
use crate::error::{Error, Result};
use crate::geometry::{self, RobotTeam, Workspace};
use crate::lattice::{boundary_tol, EnumerationLimits, IntegerVector, LatticeFamily};
use crate::math;

/// A planning query: workspace, robots, and composite start and goal.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub workspace: Workspace,
    pub team: RobotTeam,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
}

impl Scenario {
    /// Checks dimensions and that start and goal have positive clearance.
    pub fn new(workspace: Workspace, team: RobotTeam, start: Vec<f64>, goal: Vec<f64>) -> Result<Self> {
        for (what, q) in [("start", &start), ("goal", &goal)] {
            let c = geometry::config_clearance(&workspace, &team, q)?;
            if !(c.value > 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "{what} configuration is not collision-free (clearance {}, {:?})",
                    c.value, c.limiting
                )));
            }
        }
        Ok(Scenario { workspace, team, start, goal })
    }

    pub fn dim(&self) -> usize {
        self.team.dim()
    }

    pub fn cspace_box(&self) -> (Vec<f64>, Vec<f64>) {
        geometry::cspace_box(&self.workspace, &self.team)
    }

    pub fn start_clearance(&self) -> f64 {
        geometry::config_clearance(&self.workspace, &self.team, &self.start)
            .map(|c| c.value)
            .unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    LatticeLoc,
    LatticeGlo,
    RandomGlo,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::LatticeLoc, Mode::LatticeGlo, Mode::RandomGlo];

    pub fn name(self) -> &'static str {
        match self {
            Mode::LatticeLoc => "loc",
            Mode::LatticeGlo => "glo",
            Mode::RandomGlo => "random",
        }
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loc" => Ok(Mode::LatticeLoc),
            "glo" => Ok(Mode::LatticeGlo),
            "random" | "rnd" => Ok(Mode::RandomGlo),
            other => Err(Error::param("mode", format!("unknown mode `{other}` (expected loc, glo or random)"))),
        }
    }
}

/// Source of elapsed seconds for the time cap. The core crate has no clock
/// of its own.
pub trait Clock {
    fn now_secs(&self) -> f64;
}

/// A clock that never advances; time caps never fire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub mode: Mode,
    /// Lattice family; in random mode it fixes the matched sample count.
    pub family: LatticeFamily,
    pub delta: f64,
    pub eps: f64,
    /// Random-radius constant. `None` uses [`prm_star_psi`].
    pub psi: Option<f64>,
    pub seed: u64,
    /// Collision-check resolution along edges. `None` means `0.1 · beta*`.
    pub edge_spacing: Option<f64>,
    /// Maximum number of vertex expansions.
    pub node_cap: usize,
    /// Seconds, measured by the supplied [`Clock`].
    pub time_cap: Option<f64>,
    pub limits: EnumerationLimits,
}

impl PlannerConfig {
    pub const DEFAULT_NODE_CAP: usize = 2_000_000;

    pub fn new(mode: Mode, family: LatticeFamily, delta: f64, eps: f64) -> Self {
        PlannerConfig {
            mode,
            family,
            delta,
            eps,
            psi: None,
            seed: 0,
            edge_spacing: None,
            node_cap: Self::DEFAULT_NODE_CAP,
            time_cap: None,
            limits: EnumerationLimits::default(),
        }
    }

    pub fn params(&self) -> Result<CompletenessParams> {
        CompletenessParams::new(self.delta, self.eps)
    }

    pub fn resolved_spacing(&self) -> Result<f64> {
        let s = match self.edge_spacing {
            Some(s) => s,
            None => 0.1 * self.params()?.beta_star,
        };
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::param("edge_spacing", "must be positive and finite"));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanStatus {
    Solved,
    /// The search space was exhausted: no path exists in the roadmap.
    InfeasibleCertified,
    /// Node or time cap hit before the search finished.
    ExhaustedBudget,
}

impl PlanStatus {
    pub fn name(self) -> &'static str {
        match self {
            PlanStatus::Solved => "solved",
            PlanStatus::InfeasibleCertified => "infeasible_certified",
            PlanStatus::ExhaustedBudget => "exhausted_budget",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SearchStats {
    pub expanded: usize,
    /// Vertices inserted into OPEN for the first time.
    pub generated: usize,
    pub vertex_checks: usize,
    pub edge_checks: usize,
    /// Configurations evaluated by edge checks.
    pub edge_check_configs: usize,
    /// Seconds by the supplied clock; zero under [`NullClock`].
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub status: PlanStatus,
    /// Configurations from start to goal; empty unless solved.
    pub path: Vec<Vec<f64>>,
    /// Sum of segment lengths along `path`.
    pub length: Option<f64>,
    pub stats: SearchStats,
}

/// `ψ (ln n / n)^{1/d}`.
pub fn r_rnd(n: usize, psi: f64, d: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "r_rnd needs at least 2 samples"));
    }
    if !(psi > 0.0) || !psi.is_finite() {
        return Err(Error::param("psi", "must be positive and finite"));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let nf = n as f64;
    Ok(psi * math::powf(math::ln(nf) / nf, 1.0 / d as f64))
}

/// The PRM* constant `2 (1 + 1/d)^{1/d} (μ / V_d)^{1/d}`, with `μ` the volume
/// of the configuration box standing in for the free-space volume.
pub fn prm_star_psi(scenario: &Scenario) -> f64 {
    let d = scenario.dim();
    let df = d as f64;
    let mu = math::powi(scenario.workspace.bounds.area(), scenario.team.m() as i32);
    2.0 * math::powf(1.0 + 1.0 / df, 1.0 / df) * math::powf(mu / ball_volume(d), 1.0 / df)
}

/// `count` i.i.d. uniform points in the configuration box, from ChaCha8
/// seeded with `seed`.
pub fn random_samples(scenario: &Scenario, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let (lo, hi) = scenario.cspace_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| lo.iter().zip(&hi).map(|(l, h)| l + rng.random::<f64>() * (h - l)).collect()).collect()
}

/// Number of lattice samples (anchored at the start) in the configuration
/// box, ignoring all collisions.
pub fn matched_count(
    scenario: &Scenario,
    family: LatticeFamily,
    params: CompletenessParams,
    limits: EnumerationLimits,
) -> Result<usize> {
    let set = SampleSet::new(family, scenario.dim(), params, scenario.start.clone())?;
    let (lo, hi) = scenario.cspace_box();
    set.count_in_box(&lo, &hi, limits)
}

/// Geometric clearance schedule `δ_0 ρ^k` starting at the start clearance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaLadder {
    pub rho: f64,
    /// Fraction of `δ_0` below which the ladder stops.
    pub floor_fraction: f64,
}

impl Default for DeltaLadder {
    fn default() -> Self {
        DeltaLadder { rho: 0.8, floor_fraction: 0.01 }
    }
}

impl DeltaLadder {
    /// `δ_0, δ_0 ρ, δ_0 ρ², …` down to `floor_fraction · δ_0` inclusive.
    pub fn values(&self, delta0: f64) -> Result<Vec<f64>> {
        if !(delta0 > 0.0) || !delta0.is_finite() {
            return Err(Error::InvalidScenario(format!("start clearance {delta0} is not positive")));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::param("rho", "must lie in (0, 1)"));
        }
        if !(self.floor_fraction > 0.0 && self.floor_fraction <= 1.0) {
            return Err(Error::param("floor_fraction", "must lie in (0, 1]"));
        }
        let floor = delta0 * self.floor_fraction;
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let v = delta0 * math::powi(self.rho, k);
            if v < floor * (1.0 - 1e-12) {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    }
}

/// The default ladder for `scenario`, starting at its start clearance.
pub fn select_delta(scenario: &Scenario) -> Result<Vec<f64>> {
    DeltaLadder::default().values(scenario.start_clearance())
}

/// Dispatch on `config.mode`.
pub fn plan(scenario: &Scenario, config: &PlannerConfig, clock: &dyn Clock) -> Result<PlanOutcome> {
    match config.mode {
        Mode::LatticeLoc => plan_loc_with_clock(scenario, config, clock),
        Mode::LatticeGlo => {
            let set = SampleSet::new(config.family, scenario.dim(), config.params()?, scenario.start.clone())?;
            let (lo, hi) = scenario.cspace_box();
            let points: Vec<Vec<f64>> = set.in_box(&lo, &hi, config.limits)?.into_iter().map(|p| p.position).collect();
            plan_glo_with_clock(scenario, config, &points, config.params()?.r_star, clock)
        }
        Mode::RandomGlo => {
            let params = config.params()?;
            let n = matched_count(scenario, config.family, params, config.limits)?;
            let points = random_samples(scenario, n, config.seed);
            let psi = config.psi.unwrap_or_else(|| prm_star_psi(scenario));
            let radius = r_rnd(n.max(2), psi, scenario.dim())?;
            plan_glo_with_clock(scenario, config, &points, radius, clock)
        }
    }
}

/// Lattice `loc` flavour without a clock.
pub fn plan_loc(scenario: &Scenario, config: &PlannerConfig) -> Result<PlanOutcome> {
    plan_loc_with_clock(scenario, config, &NullClock)
}

/// Lattice `loc` flavour. The sample set is anchored at the start, so the
/// start is the lattice point with coefficients zero.
pub fn plan_loc_with_clock(scenario: &Scenario, config: &PlannerConfig, clock: &dyn Clock) -> Result<PlanOutcome> {
    let params = config.params()?;
    let spacing = config.resolved_spacing()?;
    let set = SampleSet::new(config.family, scenario.dim(), params, scenario.start.clone())?;
    let template = set.neighbor_template(config.limits)?;
    let (lo, hi) = scenario.cspace_box();

    let mut search = Search::new(scenario, config, spacing, params.r_star, clock);
    let start_key = LocKey::Lattice(IntegerVector::zero(scenario.dim()));
    search.run(start_key, LocKey::Goal, |key, pos, out| {
        let LocKey::Lattice(v) = key else { return };
        for (o, iv) in template.offsets.iter().zip(&template.int_offsets) {
            let p: Vec<f64> = pos.iter().zip(o).map(|(a, b)| a + b).collect();
            if p.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                continue;
            }
            out.push((LocKey::Lattice(v.add(iv)), p));
        }
    })
}

/// Explicit-sample flavour without a clock.
pub fn plan_glo(scenario: &Scenario, config: &PlannerConfig, points: &[Vec<f64>], radius: f64) -> Result<PlanOutcome> {
    plan_glo_with_clock(scenario, config, points, radius, &NullClock)
}

/// Explicit-sample flavour: vertices are `points` plus start and goal,
/// neighbours are found by a radius query. Points equal to the start or goal
/// are merged into them.
pub fn plan_glo_with_clock(
    scenario: &Scenario,
    config: &PlannerConfig,
    points: &[Vec<f64>],
    radius: f64,
    clock: &dyn Clock,
) -> Result<PlanOutcome> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::param("radius", "must be positive and finite"));
    }
    let spacing = config.resolved_spacing()?;
    let d = scenario.dim();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, actual: p.len() });
    }
    // Index 0 is the goal so it wins ties, index 1 the start.
    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(points.len() + 2);
    verts.push(scenario.goal.clone());
    verts.push(scenario.start.clone());
    verts.extend(points.iter().filter(|p| **p != scenario.start && **p != scenario.goal).cloned());
    // The goal is attached by the search loop's goal hook, not the index.
    let index = RadiusIndex::new(&verts[1..], radius);

    let mut search = Search::new(scenario, config, spacing, radius, clock);
    let mut found = Vec::new();
    search.run(1usize, 0usize, |_, pos, out| {
        index.query(pos, radius, &mut found);
        for &i in &found {
            out.push((i + 1, verts[i + 1].clone()));
        }
    })
}

/// Fixed-radius neighbour lookup: a uniform hash grid with cell size equal
/// to the query radius, or a linear scan for small point sets.
pub struct RadiusIndex<'a> {
    points: &'a [Vec<f64>],
    cell: f64,
    grid: Option<HashMap<Vec<i64>, Vec<usize>>>,
}

impl<'a> RadiusIndex<'a> {
    pub const LINEAR_SCAN_BELOW: usize = 5000;

    pub fn new(points: &'a [Vec<f64>], cell: f64) -> Self {
        let grid = (points.len() >= Self::LINEAR_SCAN_BELOW).then(|| {
            let mut g: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
            for (i, p) in points.iter().enumerate() {
                g.entry(cell_of(p, cell)).or_default().push(i);
            }
            g
        });
        RadiusIndex { points, cell, grid }
    }

    /// Indices of points within `radius` (plus boundary tolerance) of `q`,
    /// ascending. `radius` must not exceed the cell size.
    pub fn query(&self, q: &[f64], radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let lim = radius + boundary_tol(radius);
        let within = |i: usize| math::dist(q, &self.points[i]) <= lim;
        match &self.grid {
            None => out.extend((0..self.points.len()).filter(|&i| within(i))),
            Some(grid) => {
                let base = cell_of(q, self.cell);
                let d = base.len();
                let mut off = alloc::vec![-1i64; d];
                loop {
                    let key: Vec<i64> = base.iter().zip(&off).map(|(b, o)| b + o).collect();
                    if let Some(ids) = grid.get(&key) {
                        out.extend(ids.iter().copied().filter(|&i| within(i)));
                    }
                    let mut k = 0;
                    while k < d && off[k] == 1 {
                        off[k] = -1;
                        k += 1;
                    }
                    if k == d {
                        break;
                    }
                    off[k] += 1;
                }
                out.sort_unstable();
            }
        }
    }
}

fn cell_of(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| math::floor(x / cell) as i64).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum LocKey {
    // Declared first so the goal sorts before every lattice point.
    Goal,
    Lattice(IntegerVector),
}

struct Node<K> {
    key: K,
    pos: Vec<f64>,
    g: f64,
    h: f64,
    parent: Option<usize>,
    closed: bool,
    valid: Option<bool>,
}

struct Entry<K> {
    f: f64,
    g: f64,
    key: K,
    idx: usize,
}

impl<K: Ord> Ord for Entry<K> {
    // BinaryHeap is a max-heap: "greater" pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(self.g.total_cmp(&other.g)).then_with(|| other.key.cmp(&self.key))
    }
}

impl<K: Ord> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: Ord> PartialEq for Entry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<K: Ord> Eq for Entry<K> {}

struct Search<'a> {
    scenario: &'a Scenario,
    config: &'a PlannerConfig,
    spacing: f64,
    radius: f64,
    clock: &'a dyn Clock,
}

impl<'a> Search<'a> {
    fn new(scenario: &'a Scenario, config: &'a PlannerConfig, spacing: f64, radius: f64, clock: &'a dyn Clock) -> Self {
        Search { scenario, config, spacing, radius, clock }
    }

    fn run<K, F>(&mut self, start_key: K, goal_key: K, mut neighbors: F) -> Result<PlanOutcome>
    where
        K: Clone + Eq + Hash + Ord,
        F: FnMut(&K, &[f64], &mut Vec<(K, Vec<f64>)>),
    {
        let sc = self.scenario;
        let (ws, team) = (&sc.workspace, &sc.team);
        let goal = &sc.goal;
        let t0 = self.clock.now_secs();
        let mut stats = SearchStats::default();
        let goal_lim = self.radius + boundary_tol(self.radius);

        let mut nodes: Vec<Node<K>> = Vec::new();
        let mut index: HashMap<K, usize> = HashMap::new();
        let mut open: BinaryHeap<Entry<K>> = BinaryHeap::new();

        let h0 = math::dist(&sc.start, goal);
        nodes.push(Node {
            key: start_key.clone(),
            pos: sc.start.clone(),
            g: 0.0,
            h: h0,
            parent: None,
            closed: false,
            valid: Some(true),
        });
        index.insert(start_key.clone(), 0);
        open.push(Entry { f: h0, g: 0.0, key: start_key, idx: 0 });
        stats.generated = 1;

        let mut scratch: Vec<(K, Vec<f64>)> = Vec::new();
        let status = loop {
            let Some(e) = open.pop() else {
                break PlanStatus::InfeasibleCertified;
            };
            let qi = e.idx;
            if nodes[qi].closed || e.g != nodes[qi].g {
                continue;
            }
            if nodes[qi].key == goal_key {
                break PlanStatus::Solved;
            }
            if stats.expanded >= self.config.node_cap {
                break PlanStatus::ExhaustedBudget;
            }
            if let Some(cap) = self.config.time_cap {
                if self.clock.now_secs() - t0 > cap {
                    break PlanStatus::ExhaustedBudget;
                }
            }
            nodes[qi].closed = true;
            stats.expanded += 1;

            scratch.clear();
            let qpos = nodes[qi].pos.clone();
            let qkey = nodes[qi].key.clone();
            neighbors(&qkey, &qpos, &mut scratch);
            if math::dist(&qpos, goal) <= goal_lim {
                scratch.push((goal_key.clone(), goal.clone()));
            }

            let gq = nodes[qi].g;
            for (nkey, npos) in scratch.drain(..) {
                let ni = match index.get(&nkey) {
                    Some(&i) => i,
                    None => {
                        let valid = if nkey == goal_key { Some(true) } else { None };
                        let h = math::dist(&npos, goal);
                        nodes.push(Node {
                            key: nkey.clone(),
                            pos: npos,
                            g: f64::INFINITY,
                            h,
                            parent: None,
                            closed: false,
                            valid,
                        });
                        index.insert(nkey, nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                if ni == qi || nodes[ni].closed {
                    continue;
                }
                let g_new = gq + math::dist(&qpos, &nodes[ni].pos);
                if !(g_new < nodes[ni].g) {
                    continue;
                }
                let valid = match nodes[ni].valid {
                    Some(v) => v,
                    None => {
                        stats.vertex_checks += 1;
                        let v = geometry::is_config_free(ws, team, &nodes[ni].pos, 0.0)?;
                        nodes[ni].valid = Some(v);
                        v
                    }
                };
                if !valid {
                    continue;
                }
                stats.edge_checks += 1;
                let seg = geometry::check_segment_unchecked(ws, team, &qpos, &nodes[ni].pos, self.spacing, false);
                stats.edge_check_configs += seg.configs_checked;
                if !seg.free {
                    continue;
                }
                if nodes[ni].g == f64::INFINITY {
                    stats.generated += 1;
                }
                let n = &mut nodes[ni];
                n.g = g_new;
                n.parent = Some(qi);
                open.push(Entry { f: g_new + n.h, g: g_new, key: n.key.clone(), idx: ni });
            }
        };
        stats.wall_time = self.clock.now_secs() - t0;

        let (path, length) = if status == PlanStatus::Solved {
            let gi = index[&goal_key];
            let mut rev = Vec::new();
            let mut cur = Some(gi);
            while let Some(i) = cur {
                rev.push(nodes[i].pos.clone());
                cur = nodes[i].parent;
            }
            rev.reverse();
            let len = rev.windows(2).map(|w| math::dist(&w[0], &w[1])).sum();
            (rev, Some(len))
        } else {
            (Vec::new(), None)
        };
        Ok(PlanOutcome { status, path, length, stats })
    }
}
