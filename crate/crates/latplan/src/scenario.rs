//! Scenario documents (TOML, `version = 1`).
//!
//! ```toml
//! version = 1
//! name = "corridor"
//!
//! [workspace]
//! bounds = [0.0, 0.0, 20.0, 8.0]
//!
//! [[workspace.obstacles]]
//! kind = "circle"
//! center = [10.0, 4.0]
//! radius = 1.5
//!
//! [robots]
//! radii = [0.5]
//! starts = [[2.0, 4.0]]
//! goals = [[18.0, 4.0]]
//!
//! [defaults]
//! eps = 2.0
//! family = "astar"
//! ```

use latplan_core::geometry::{self, Bounds, Limiting, Obstacle};
use latplan_core::{LatticeFamily, Mode, RobotTeam, Scenario, Workspace};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario syntax error: {0}")]
    Syntax(String),
    #[error("unsupported scenario version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("robots: radii, starts and goals must have equal length (got {radii}, {starts}, {goals})")]
    RobotCount { radii: usize, starts: usize, goals: usize },
    #[error("robot {robot}: {which} ({x}, {y}) lies outside the workspace bounds")]
    OutOfBounds { robot: usize, which: &'static str, x: f64, y: f64 },
    #[error("robot {robot}: {which} configuration is in collision ({detail})")]
    Collision { robot: usize, which: &'static str, detail: String },
    #[error("unknown {field} `{value}`")]
    UnknownName { field: &'static str, value: String },
    #[error(transparent)]
    Invalid(#[from] latplan_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub name: String,
    pub workspace: WorkspaceSpec,
    pub robots: RobotsSpec,
    #[serde(default)]
    pub defaults: Defaults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    /// `[xmin, ymin, xmax, ymax]`.
    pub bounds: [f64; 4],
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleSpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Circle { center: [f64; 2], radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotsSpec {
    pub radii: Vec<f64>,
    pub starts: Vec<[f64; 2]>,
    pub goals: Vec<[f64; 2]>,
}

/// Planner settings used when the command line does not override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub eps: f64,
    pub family: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_cap: Option<f64>,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            delta: None,
            eps: 2.0,
            family: LatticeFamily::AdStar.name().to_string(),
            mode: Mode::LatticeLoc.name().to_string(),
            edge_spacing: None,
            psi: None,
            seed: 0,
            node_cap: None,
            time_cap: None,
        }
    }
}

impl ScenarioFile {
    pub fn m(&self) -> usize {
        self.robots.radii.len()
    }

    pub fn family(&self) -> Result<LatticeFamily, ScenarioError> {
        self.defaults
            .family
            .parse()
            .map_err(|_| ScenarioError::UnknownName { field: "defaults.family", value: self.defaults.family.clone() })
    }

    pub fn mode(&self) -> Result<Mode, ScenarioError> {
        self.defaults
            .mode
            .parse()
            .map_err(|_| ScenarioError::UnknownName { field: "defaults.mode", value: self.defaults.mode.clone() })
    }

    /// Checks every invariant and builds the planning query.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        if self.version != FORMAT_VERSION {
            return Err(ScenarioError::Version(self.version));
        }
        let r = &self.robots;
        if r.radii.len() != r.starts.len() || r.radii.len() != r.goals.len() {
            return Err(ScenarioError::RobotCount {
                radii: r.radii.len(),
                starts: r.starts.len(),
                goals: r.goals.len(),
            });
        }
        self.family()?;
        self.mode()?;
        let [xmin, ymin, xmax, ymax] = self.workspace.bounds;
        let bounds = Bounds::new(xmin, ymin, xmax, ymax)?;
        for (which, list) in [("start", &r.starts), ("goal", &r.goals)] {
            for (robot, p) in list.iter().enumerate() {
                if !bounds.contains(*p) {
                    return Err(ScenarioError::OutOfBounds { robot, which, x: p[0], y: p[1] });
                }
            }
        }
        let obstacles = self
            .workspace
            .obstacles
            .iter()
            .map(|o| match o {
                ObstacleSpec::Polygon { vertices } => Obstacle::Polygon(vertices.clone()),
                ObstacleSpec::Circle { center, radius } => Obstacle::Circle { center: *center, radius: *radius },
            })
            .collect();
        let workspace = Workspace::new(bounds, obstacles)?;
        let team = RobotTeam::new(r.radii.clone())?;
        let start: Vec<f64> = r.starts.iter().flatten().copied().collect();
        let goal: Vec<f64> = r.goals.iter().flatten().copied().collect();
        for (which, q) in [("start", &start), ("goal", &goal)] {
            let c = geometry::config_clearance(&workspace, &team, q)?;
            if c.value.is_nan() || c.value <= 0.0 {
                let (robot, detail) = match c.limiting {
                    Limiting::RobotObstacle { robot, obstacle } => {
                        (robot, format!("overlaps obstacle {obstacle}, clearance {}", c.value))
                    }
                    Limiting::RobotRobot { a, b } => (a, format!("overlaps robot {b}, clearance {}", c.value)),
                    Limiting::RobotBoundary { robot } => {
                        (robot, format!("crosses the workspace boundary, clearance {}", c.value))
                    }
                };
                return Err(ScenarioError::Collision { robot, which, detail });
            }
        }
        Ok(Scenario::new(workspace, team, start, goal)?)
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    file.to_scenario()?;
    Ok(file)
}

pub fn serialize_scenario(file: &ScenarioFile) -> String {
    toml::to_string(file).expect("scenario documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
version = 1
name = "minimal"
[workspace]
bounds = [0.0, 0.0, 10.0, 10.0]
[robots]
radii = [0.5]
starts = [[1.0, 1.0]]
goals = [[9.0, 9.0]]
"#;

    #[test]
    fn minimal_document_parses() {
        let f = parse_scenario(MINIMAL).unwrap();
        assert_eq!(f.m(), 1);
        assert_eq!(f.defaults, Defaults::default());
        assert_eq!(f.to_scenario().unwrap().dim(), 2);
    }

    #[test]
    fn start_outside_bounds_names_the_robot() {
        let text = MINIMAL.replace("radii = [0.5]", "radii = [0.5, 0.5]").replace(
            "starts = [[1.0, 1.0]]\ngoals = [[9.0, 9.0]]",
            "starts = [[1.0, 1.0], [12.0, 1.0]]\ngoals = [[9.0, 9.0], [5.0, 5.0]]",
        );
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::OutOfBounds { robot: 1, which: "start", .. }), "{err}");
        assert!(err.to_string().contains("robot 1"));
    }

    #[test]
    fn start_inside_obstacle_is_named() {
        let text =
            format!("{MINIMAL}\n[[workspace.obstacles]]\nkind = \"circle\"\ncenter = [1.0, 1.5]\nradius = 0.5\n");
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::Collision { robot: 0, which: "start", .. }), "{err}");
    }

    #[test]
    fn syntax_and_count_errors() {
        assert!(matches!(parse_scenario("version = ").unwrap_err(), ScenarioError::Syntax(_)));
        let text = MINIMAL.replace("radii = [0.5]", "radii = [0.5, 0.5]");
        assert!(matches!(parse_scenario(&text).unwrap_err(), ScenarioError::RobotCount { .. }));
        let text = MINIMAL.replace("version = 1", "version = 2");
        assert!(matches!(parse_scenario(&text).unwrap_err(), ScenarioError::Version(2)));
    }

    #[test]
    fn round_trip() {
        let f = parse_scenario(MINIMAL).unwrap();
        assert_eq!(parse_scenario(&serialize_scenario(&f)).unwrap(), f);
    }
}
