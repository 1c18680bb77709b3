//! Metric containers shared by the analytic evaluators and the simulator.

use serde::{Deserialize, Serialize};

/// Point value with an optional 95% normal-approximation confidence
/// interval (simulated estimates only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            ci_low: None,
            ci_high: None,
        }
    }

    pub fn with_ci(value: f64, half_width: f64) -> Self {
        Estimate {
            value,
            ci_low: Some(value - half_width),
            ci_high: Some(value + half_width),
        }
    }

    pub fn ci_half_width(&self) -> Option<f64> {
        match (self.ci_low, self.ci_high) {
            (Some(lo), Some(hi)) => Some(0.5 * (hi - lo)),
            _ => None,
        }
    }
}

/// Per-rank success estimates (channel-aware scheduling; rank = channel
/// index of the first occupant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStats {
    pub rank: u32,
    pub p11: Estimate,
    pub p12: Estimate,
    pub p22: Estimate,
}

/// Full metric set for one scenario point.
///
/// Success probabilities are per (decode order j, sharing level u). For
/// random scheduling they are per-channel-type probabilities (pooled over
/// samples); for channel-aware scheduling they follow the per-count
/// averaging conventions of the corresponding analytic expressions, so the
/// two columns are directly comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub scheme: crate::scheduling::AccessScheme,
    pub p11: Estimate,
    pub p12: Estimate,
    pub p22: Estimate,
    pub overall: Estimate,
    pub avg_served: Estimate,
    pub avg_power: Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_rank: Option<Vec<RankStats>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}
