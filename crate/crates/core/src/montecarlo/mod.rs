//! End-to-end network simulator: Matern-cluster realizations, per-cluster
//! scheduling, SIR evaluation with imperfect cancellation, and metric
//! estimation with confidence intervals.

mod estimate;
mod realization;
mod sir;

pub use estimate::{empirical_occupancy, estimate_metrics};
pub use realization::{sample_realization, Cluster, Device, Realization};
pub use sir::{evaluate_sir, interference_per_channel, schedule_cluster, SirSample};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::params::NetworkParams;
use crate::scheduling::AccessScheme;

/// Simulation run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Independent Monte Carlo realizations.
    pub runs: u32,
    /// Window sizing: area = expected_aggregators / lambda_a.
    pub expected_aggregators: f64,
    pub seed: u64,
    pub scheme: AccessScheme,
    /// Collect per-rank success statistics (channel-aware schemes).
    pub record_per_rank: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            runs: 50_000,
            expected_aggregators: 400.0,
            seed: 1,
            scheme: AccessScheme::Rrs,
            record_per_rank: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        if self.runs == 0 {
            return Err(CoreError::InvalidParams("runs must be at least 1".into()));
        }
        if self.expected_aggregators.is_nan() || self.expected_aggregators <= 0.0 {
            return Err(CoreError::InvalidParams(
                "expected_aggregators must be positive".into(),
            ));
        }
        let area = self.expected_aggregators / params.lambda_a;
        let min_area = std::f64::consts::PI * (2.0 * params.r_a).powi(2);
        if area <= min_area {
            return Err(CoreError::InvalidParams(format!(
                "window area {area:.1} must exceed pi (2 R_a)^2 = {min_area:.1}; \
                 raise expected_aggregators"
            )));
        }
        Ok(())
    }

    /// Side length of the square observation window.
    pub fn window_side(&self, params: &NetworkParams) -> f64 {
        (self.expected_aggregators / params.lambda_a).sqrt()
    }

    /// Effective per-channel cap: single occupancy for the OMA scheme.
    pub fn effective_l(&self, params: &NetworkParams) -> u32 {
        match self.scheme {
            AccessScheme::Oma => 1,
            _ => params.l_max,
        }
    }
}
