//! Planar workspaces with polygon and disc obstacles, teams of disc robots,
//! and clearance queries over the composite configuration space `R^{2m}`.
//!
//! The workspace boundary acts as an obstacle: a robot must lie entirely
//! inside the bounds to be collision-free.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Bounds {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let b = Bounds { xmin, ymin, xmax, ymax };
        if !(xmin < xmax && ymin < ymax) || ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::param("bounds", "need finite xmin < xmax and ymin < ymax"));
        }
        Ok(b)
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    /// Signed distance from `p` to the nearest edge, positive inside.
    fn inner_distance(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.xmin).min(self.xmax - p[0]).min(p[1] - self.ymin).min(self.ymax - p[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    /// Simple polygon, vertices in order (either orientation).
    Polygon(Vec<[f64; 2]>),
    Circle {
        center: [f64; 2],
        radius: f64,
    },
}

impl Obstacle {
    fn validate(&self, index: usize) -> Result<()> {
        match self {
            Obstacle::Circle { center, radius } => {
                if !(*radius > 0.0) || !center.iter().chain([radius]).all(|v| v.is_finite()) {
                    return Err(Error::param("obstacles", format!("circle #{index} needs a positive radius")));
                }
            }
            Obstacle::Polygon(vs) => {
                if vs.len() < 3 {
                    return Err(Error::param("obstacles", format!("polygon #{index} has fewer than 3 vertices")));
                }
                if !is_simple_polygon(vs) {
                    return Err(Error::param("obstacles", format!("polygon #{index} is not simple")));
                }
            }
        }
        Ok(())
    }

    /// Signed distance from `p` to the obstacle: positive outside, negative
    /// inside. Exact outside; inside polygons it is minus the distance to
    /// the boundary.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        match self {
            Obstacle::Circle { center, radius } => math::dist(&p, center) - radius,
            Obstacle::Polygon(vs) => {
                let n = vs.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    best = best.min(point_segment_distance(p, vs[i], vs[(i + 1) % n]));
                }
                if point_in_polygon(p, vs) {
                    -best
                } else {
                    best
                }
            }
        }
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) };
    let q = [a[0] + t * dx, a[1] + t * dy];
    math::dist(&p, &q)
}

fn point_in_polygon(p: [f64; 2], vs: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = vs.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vs[i], vs[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn is_simple_polygon(vs: &[[f64; 2]]) -> bool {
    let n = vs.len();
    if vs.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
        return false;
    }
    for i in 0..n {
        if vs[i] == vs[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub bounds: Bounds,
    pub obstacles: Vec<Obstacle>,
}

impl Workspace {
    pub fn new(bounds: Bounds, obstacles: Vec<Obstacle>) -> Result<Self> {
        for (i, o) in obstacles.iter().enumerate() {
            o.validate(i)?;
        }
        Ok(Workspace { bounds, obstacles })
    }
}

/// `m` labelled disc robots.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotTeam {
    pub radii: Vec<f64>,
}

impl RobotTeam {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::param("radii", "need at least one robot"));
        }
        if let Some(i) = radii.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::param("radii", format!("robot {i} needs a positive radius")));
        }
        Ok(RobotTeam { radii })
    }

    pub fn m(&self) -> usize {
        self.radii.len()
    }

    /// Dimension of the composite configuration space.
    pub fn dim(&self) -> usize {
        2 * self.radii.len()
    }
}

/// Robot `i` sits at `(coords[2i], coords[2i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeConfig(pub Vec<f64>);

impl CompositeConfig {
    pub fn robot(&self, i: usize) -> [f64; 2] {
        [self.0[2 * i], self.0[2 * i + 1]]
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<f64>> for CompositeConfig {
    fn from(v: Vec<f64>) -> Self {
        CompositeConfig(v)
    }
}

/// Which pair attains the minimum clearance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limiting {
    RobotObstacle { robot: usize, obstacle: usize },
    RobotRobot { a: usize, b: usize },
    RobotBoundary { robot: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceResult {
    /// Negative when some robot penetrates an obstacle, the boundary, or
    /// another robot.
    pub value: f64,
    pub limiting: Limiting,
}

fn check_dim(team: &RobotTeam, q: &[f64]) -> Result<()> {
    if q.len() != team.dim() {
        return Err(Error::DimensionMismatch { expected: team.dim(), actual: q.len() });
    }
    Ok(())
}

/// Minimum over robot-obstacle, robot-robot and robot-boundary gaps.
pub fn config_clearance(ws: &Workspace, team: &RobotTeam, q: &[f64]) -> Result<ClearanceResult> {
    check_dim(team, q)?;
    let mut best = ClearanceResult { value: f64::INFINITY, limiting: Limiting::RobotBoundary { robot: 0 } };
    let mut consider = |value: f64, limiting: Limiting| {
        if value < best.value {
            best = ClearanceResult { value, limiting };
        }
    };
    for (i, &r) in team.radii.iter().enumerate() {
        let c = [q[2 * i], q[2 * i + 1]];
        consider(ws.bounds.inner_distance(c) - r, Limiting::RobotBoundary { robot: i });
        for (k, o) in ws.obstacles.iter().enumerate() {
            consider(o.signed_distance(c) - r, Limiting::RobotObstacle { robot: i, obstacle: k });
        }
        for j in i + 1..team.m() {
            let cj = [q[2 * j], q[2 * j + 1]];
            consider(math::dist(&c, &cj) - r - team.radii[j], Limiting::RobotRobot { a: i, b: j });
        }
    }
    Ok(best)
}

/// Slack on clearance comparisons.
pub const CLEARANCE_TOL: f64 = 1e-12;

/// `config_clearance(q) >= required - 1e-12`, exiting on the first violation.
pub fn is_config_free(ws: &Workspace, team: &RobotTeam, q: &[f64], required: f64) -> Result<bool> {
    check_dim(team, q)?;
    Ok(config_free_unchecked(ws, team, q, required))
}

fn config_free_unchecked(ws: &Workspace, team: &RobotTeam, q: &[f64], required: f64) -> bool {
    let need = required - CLEARANCE_TOL;
    for (i, &r) in team.radii.iter().enumerate() {
        let c = [q[2 * i], q[2 * i + 1]];
        if ws.bounds.inner_distance(c) - r < need {
            return false;
        }
        for j in i + 1..team.m() {
            let cj = [q[2 * j], q[2 * j + 1]];
            if math::dist(&c, &cj) - r - team.radii[j] < need {
                return false;
            }
        }
    }
    for (i, &r) in team.radii.iter().enumerate() {
        let c = [q[2 * i], q[2 * i + 1]];
        for o in &ws.obstacles {
            if o.signed_distance(c) - r < need {
                return false;
            }
        }
    }
    true
}

/// Outcome of a densely sampled segment check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentCheck {
    pub free: bool,
    /// Configurations evaluated before returning.
    pub configs_checked: usize,
}

/// Checks `⌈‖a-b‖/spacing⌉ + 1` evenly spaced configurations from `a` to `b`
/// at zero required clearance: both endpoints first, then the interior in
/// order from `a`. Stops at the first collision.
pub fn check_segment(ws: &Workspace, team: &RobotTeam, a: &[f64], b: &[f64], spacing: f64) -> Result<SegmentCheck> {
    check_dim(team, a)?;
    check_dim(team, b)?;
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::param("spacing", "must be positive and finite"));
    }
    Ok(check_segment_unchecked(ws, team, a, b, spacing, true))
}

pub(crate) fn check_segment_unchecked(
    ws: &Workspace,
    team: &RobotTeam,
    a: &[f64],
    b: &[f64],
    spacing: f64,
    include_endpoints: bool,
) -> SegmentCheck {
    let len = math::dist(a, b);
    let n = math::ceil(len / spacing) as usize + 1;
    let mut checked = 0usize;
    let mut probe = |q: &[f64]| {
        checked += 1;
        config_free_unchecked(ws, team, q, 0.0)
    };
    if include_endpoints {
        if !probe(a) {
            return SegmentCheck { free: false, configs_checked: checked };
        }
        if n > 1 && !probe(b) {
            return SegmentCheck { free: false, configs_checked: checked };
        }
    }
    let mut q = a.to_vec();
    for i in 1..n.saturating_sub(1) {
        let t = i as f64 / (n - 1) as f64;
        for (k, x) in q.iter_mut().enumerate() {
            *x = a[k] + t * (b[k] - a[k]);
        }
        if !probe(&q) {
            return SegmentCheck { free: false, configs_checked: checked };
        }
    }
    SegmentCheck { free: true, configs_checked: checked }
}

pub fn is_segment_free(ws: &Workspace, team: &RobotTeam, a: &[f64], b: &[f64], spacing: f64) -> Result<bool> {
    Ok(check_segment(ws, team, a, b, spacing)?.free)
}

/// The m-fold product of the workspace bounds.
pub fn cspace_box(ws: &Workspace, team: &RobotTeam) -> (Vec<f64>, Vec<f64>) {
    let b = ws.bounds;
    let lo = (0..team.m()).flat_map(|_| [b.xmin, b.ymin]).collect();
    let hi = (0..team.m()).flat_map(|_| [b.xmax, b.ymax]).collect();
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn far_bounds() -> Bounds {
        Bounds::new(-100.0, -100.0, 100.0, 100.0).unwrap()
    }

    #[test]
    fn collinear_discs() {
        let ws = Workspace::new(far_bounds(), vec![Obstacle::Circle { center: [5.0, 0.0], radius: 1.0 }]).unwrap();
        let team = RobotTeam::new(vec![1.0]).unwrap();
        let c = config_clearance(&ws, &team, &[0.0, 0.0]).unwrap();
        assert!((c.value - 3.0).abs() < 1e-12);
        assert_eq!(c.limiting, Limiting::RobotObstacle { robot: 0, obstacle: 0 });
    }

    #[test]
    fn touching_robots() {
        let ws = Workspace::new(far_bounds(), vec![]).unwrap();
        let team = RobotTeam::new(vec![1.0, 1.0]).unwrap();
        let q = [0.0, 0.0, 2.0, 0.0];
        let c = config_clearance(&ws, &team, &q).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.limiting, Limiting::RobotRobot { a: 0, b: 1 });
        assert!(is_config_free(&ws, &team, &q, 0.0).unwrap());
        assert!(!is_config_free(&ws, &team, &q, 0.1).unwrap());
    }

    #[test]
    fn robot_inside_polygon_is_negative() {
        let square = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
        let ws = Workspace::new(far_bounds(), vec![Obstacle::Polygon(square)]).unwrap();
        let team = RobotTeam::new(vec![0.5]).unwrap();
        let c = config_clearance(&ws, &team, &[2.0, 1.0]).unwrap();
        assert!((c.value - (-1.5)).abs() < 1e-12);
        let outside = config_clearance(&ws, &team, &[6.0, 2.0]).unwrap();
        assert!((outside.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_counts_as_obstacle() {
        let ws = Workspace::new(Bounds::new(0.0, 0.0, 10.0, 10.0).unwrap(), vec![]).unwrap();
        let team = RobotTeam::new(vec![1.0]).unwrap();
        let c = config_clearance(&ws, &team, &[0.5, 5.0]).unwrap();
        assert!((c.value + 0.5).abs() < 1e-12);
        assert_eq!(c.limiting, Limiting::RobotBoundary { robot: 0 });
    }

    #[test]
    fn clearance_threshold_is_consistent() {
        let ws = Workspace::new(far_bounds(), vec![Obstacle::Circle { center: [3.0, 1.0], radius: 0.7 }]).unwrap();
        let team = RobotTeam::new(vec![0.4, 0.3]).unwrap();
        let q = [0.0, 0.0, 1.5, 2.5];
        let c = config_clearance(&ws, &team, &q).unwrap().value;
        assert!(is_config_free(&ws, &team, &q, c).unwrap());
        assert!(!is_config_free(&ws, &team, &q, c + 1e-6).unwrap());
    }

    #[test]
    fn segment_through_obstacle() {
        let ws = Workspace::new(far_bounds(), vec![Obstacle::Circle { center: [5.0, 0.0], radius: 1.0 }]).unwrap();
        let team = RobotTeam::new(vec![0.5]).unwrap();
        assert!(!is_segment_free(&ws, &team, &[0.0, 0.0], &[10.0, 0.0], 0.5).unwrap());
        assert!(is_segment_free(&ws, &team, &[0.0, 0.0], &[0.0, 0.0], 0.5).unwrap());
        assert!(is_segment_free(&ws, &team, &[0.0, 3.0], &[10.0, 3.0], 0.5).unwrap());
        assert!(is_segment_free(&ws, &team, &[0.0, 0.0], &[1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn segment_sample_count() {
        let ws = Workspace::new(far_bounds(), vec![]).unwrap();
        let team = RobotTeam::new(vec![0.5]).unwrap();
        let r = check_segment(&ws, &team, &[0.0, 0.0], &[1.0, 0.0], 0.25).unwrap();
        assert_eq!(r, SegmentCheck { free: true, configs_checked: 5 });
        let r = check_segment(&ws, &team, &[0.0, 0.0], &[0.0, 0.0], 0.25).unwrap();
        assert_eq!(r.configs_checked, 1);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Bounds::new(0.0, 0.0, 0.0, 1.0).is_err());
        let bowtie = vec![[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]];
        assert!(Workspace::new(far_bounds(), vec![Obstacle::Polygon(bowtie)]).is_err());
        assert!(Workspace::new(far_bounds(), vec![Obstacle::Polygon(vec![[0.0, 0.0], [1.0, 0.0]])]).is_err());
        assert!(RobotTeam::new(vec![]).is_err());
        assert!(RobotTeam::new(vec![1.0, 0.0]).is_err());
        let ws = Workspace::new(far_bounds(), vec![]).unwrap();
        let team = RobotTeam::new(vec![1.0]).unwrap();
        assert!(matches!(
            config_clearance(&ws, &team, &[0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn cspace_box_repeats_bounds() {
        let ws = Workspace::new(Bounds::new(0.0, 0.0, 10.0, 10.0).unwrap(), vec![]).unwrap();
        let (lo, hi) = cspace_box(&ws, &RobotTeam::new(vec![1.0, 1.0]).unwrap());
        assert_eq!(lo, vec![0.0; 4]);
        assert_eq!(hi, vec![10.0; 4]);
        let (lo1, hi1) = cspace_box(&ws, &RobotTeam::new(vec![1.0]).unwrap());
        assert_eq!((lo1, hi1), (vec![0.0, 0.0], vec![10.0, 10.0]));
    }
}
