//! Plan result documents (JSON).

use latplan_core::SearchStats;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub expanded: usize,
    pub generated: usize,
    pub vertex_checks: usize,
    pub edge_checks: usize,
    pub edge_check_configs: usize,
    /// Seconds; only recorded on request so that output stays reproducible.
    pub wall_time: Option<f64>,
}

impl StatsRecord {
    pub fn new(s: &SearchStats, record_time: bool) -> Self {
        StatsRecord {
            expanded: s.expanded,
            generated: s.generated,
            vertex_checks: s.vertex_checks,
            edge_checks: s.edge_checks,
            edge_check_configs: s.edge_check_configs,
            wall_time: record_time.then_some(s.wall_time),
        }
    }
}

/// One rung of the clearance ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub delta: f64,
    pub beta_star: f64,
    pub r_star: f64,
    pub scale: f64,
    pub status: String,
    pub stats: StatsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub version: u32,
    pub scenario: String,
    pub mode: String,
    pub family: String,
    pub eps: f64,
    /// Status of the last attempt.
    pub status: String,
    /// Parameters of the last attempt.
    pub delta: f64,
    pub beta_star: f64,
    pub r_star: f64,
    pub scale: f64,
    /// Composite configurations, start to goal; empty unless solved.
    pub path: Vec<Vec<f64>>,
    pub length: Option<f64>,
    pub stats: StatsRecord,
    pub attempts: Vec<Attempt>,
}

impl ResultFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
