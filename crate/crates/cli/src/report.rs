//! The JSON run report.

use std::collections::BTreeMap;

use lowrank_core::{BoundCheck, BoundReport};
use serde::{Deserialize, Serialize};

use crate::io::InputDigest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandInfo {
    pub name: String,
    pub version: String,
    /// Effective options, rendered as strings.
    pub options: BTreeMap<String, String>,
}

/// 1-based indices in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indices {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<usize>>,
    pub cols: Vec<usize>,
}

impl Indices {
    pub fn from_zero_based(rows: Option<&[usize]>, cols: &[usize]) -> Self {
        let one = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        Indices {
            rows: rows.map(one),
            cols: one(cols),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: CommandInfo,
    pub input: InputDigest,
    pub indices: Indices,
    /// Error norms and other measured quantities.
    pub measurements: BTreeMap<String, f64>,
    /// Every checked inequality with both of its sides.
    pub bounds: Vec<BoundCheck>,
    pub bounds_passed: bool,
    pub wall_time_secs: f64,
}

impl RunReport {
    pub fn new(command: CommandInfo, input: InputDigest, indices: Indices, rep: BoundReport) -> Self {
        RunReport {
            command,
            input,
            indices,
            bounds_passed: rep.all_passed(),
            measurements: rep.values,
            bounds: rep.checks,
            wall_time_secs: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
