use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Full scenario parameter set for the aggregation network.
///
/// Densities are per square meter, distances in meters, everything else
/// dimensionless. `rho` (receiver sensitivity) only enters power metrics;
/// the SIR analysis is interference limited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Aggregator density (per m^2).
    pub lambda_a: f64,
    /// Cluster (aggregation zone) radius in meters.
    pub r_a: f64,
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Mean number of devices requesting service per aggregator.
    pub m_bar: f64,
    /// Orthogonal channels per aggregator.
    pub n_channels: u32,
    /// Maximum devices per channel (1 = pure orthogonal access).
    pub l_max: u32,
    /// SIR decoding threshold (linear).
    pub theta: f64,
    /// Residual fraction of imperfect interference cancellation, in [0, 1].
    pub mu: f64,
    /// Receiver sensitivity (power units); power-control target.
    pub rho: f64,
    /// Weight of the upper transform bound in the weighted approximation.
    pub beta0: f64,
    /// Weight of the lower transform bound; beta0 + beta1 = 1.
    pub beta1: f64,
    /// Power budget shared by two devices on one channel (a_i + b_i).
    pub delta: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            lambda_a: 10f64.powf(-4.4),
            r_a: 40.0,
            alpha: 3.6,
            m_bar: 60.0,
            n_channels: 30,
            l_max: 2,
            theta: 1.0,
            mu: 0.0,
            rho: 1.0,
            beta0: 0.5,
            beta1: 0.5,
            delta: 1.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CoreError::InvalidParams(m));
        if self.alpha.is_nan() || self.alpha <= 2.0 {
            return fail(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if self.lambda_a.is_nan() || self.lambda_a <= 0.0 {
            return fail(format!("lambda_a must be positive, got {}", self.lambda_a));
        }
        if self.r_a.is_nan() || self.r_a <= 0.0 {
            return fail(format!("r_a must be positive, got {}", self.r_a));
        }
        if self.m_bar.is_nan() || self.m_bar < 0.0 {
            return fail(format!("m_bar must be non-negative, got {}", self.m_bar));
        }
        if self.n_channels == 0 {
            return fail("n_channels must be at least 1".into());
        }
        if self.l_max == 0 {
            return fail("l_max must be at least 1".into());
        }
        if self.theta.is_nan() || self.theta <= 0.0 {
            return fail(format!("theta must be positive, got {}", self.theta));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return fail(format!("mu must lie in [0,1], got {}", self.mu));
        }
        if (self.beta0 + self.beta1 - 1.0).abs() > 1e-12
            || !(0.0..=1.0).contains(&self.beta0)
            || !(0.0..=1.0).contains(&self.beta1)
        {
            return fail(format!(
                "beta0, beta1 must lie in [0,1] and sum to 1, got {} + {}",
                self.beta0, self.beta1
            ));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return fail(format!("delta must be positive, got {}", self.delta));
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return fail(format!("rho must be positive, got {}", self.rho));
        }
        Ok(())
    }

    /// Mean transmit power of a unit-weight device, divided by rho:
    /// E[r^alpha] = 2 R_a^alpha / (alpha + 2).
    pub fn mean_range_powered(&self) -> f64 {
        2.0 * self.r_a.powf(self.alpha) / (self.alpha + 2.0)
    }

    /// Power normalization constant: rho * E[r^alpha].
    pub fn psi_power(&self) -> f64 {
        self.rho * self.mean_range_powered()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        NetworkParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_alpha_at_most_two() {
        let p = NetworkParams {
            alpha: 2.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_bad_beta_split() {
        let p = NetworkParams {
            beta0: 0.7,
            beta1: 0.5,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
