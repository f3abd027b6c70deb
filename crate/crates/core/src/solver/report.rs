use serde::{Deserialize, Serialize};

use crate::model::PlacedSolution;

use super::reconstruct::PatternSelection;

pub const REPORT_FORMAT: &str = "rcpp-report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    FeasibleNotProven,
    ResourceLimit,
}

impl SolveStatus {
    /// Process exit code: 0 optimal, 2 feasible but not proven, 3 resource limit.
    pub fn exit_code(self) -> i32 {
        match self {
            SolveStatus::Optimal => 0,
            SolveStatus::FeasibleNotProven => 2,
            SolveStatus::ResourceLimit => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub enumeration_seconds: f64,
    pub root_seconds: f64,
    pub ip_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStatistics {
    pub candidates: u64,
    pub feasible_patterns: u64,
    pub infeasible_patterns: u64,
    pub unknown_patterns: u64,
    pub exact_calls: u64,
    pub pricing_rounds: u64,
    pub columns_priced: u64,
    pub verified_in_loop: u64,
    pub fixed_infeasible: u64,
    pub fixed_unverified: u64,
    pub farley_bounds: Vec<i64>,
    pub ip_nodes: u64,
    pub ip_node_limit_reached: bool,
    pub ip_exhausted: bool,
    pub pricing_converged: bool,
    pub used_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub format: String,
    pub instance: String,
    pub status: SolveStatus,
    pub primal_bound: u64,
    pub dual_bound: u64,
    /// `(primal - dual) / dual`, 0 when both are 0
    pub gap: f64,
    pub dual_valid: bool,
    pub volume_bound: u64,
    pub root_lp_value: Option<f64>,
    pub selection: PatternSelection,
    pub incumbent: PlacedSolution,
    pub statistics: SolveStatistics,
    /// omitted in deterministic mode
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

pub fn gap(primal: u64, dual: u64) -> f64 {
    if dual == 0 {
        if primal == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (primal as f64 - dual as f64) / dual as f64
    }
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// `primal=P dual=D gap=G%`
    pub fn summary_line(&self) -> String {
        format!(
            "primal={} dual={} gap={:.1}%",
            self.primal_bound,
            self.dual_bound,
            100.0 * self.gap
        )
    }

    /// One results-table row: name, types, rings, primal, dual, gap, status.
    pub fn table_row(&self, types: usize, rings: u64) -> String {
        format!(
            "{:<24} {:>3} {:>5} {:>7} {:>7} {:>7.1}%  {:?}",
            self.instance,
            types,
            rings,
            self.primal_bound,
            self.dual_bound,
            100.0 * self.gap,
            self.status
        )
    }
}

pub fn table_header() -> String {
    format!(
        "{:<24} {:>3} {:>5} {:>7} {:>7} {:>8}  status",
        "instance", "T", "n", "primal", "dual", "gap"
    )
}
