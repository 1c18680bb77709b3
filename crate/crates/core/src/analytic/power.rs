//! Average transmit power per orthogonal channel under full channel
//! inversion.

use serde::{Deserialize, Serialize};

use crate::occupancy::OccupancyPmf;
use crate::params::NetworkParams;

/// Which access scheme the power average describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PowerScheme {
    /// One device per channel.
    Oma,
    /// Up to two devices per channel sharing the budget `delta`.
    Hybrid { delta: f64 },
}

/// Average transmit power per channel: (1 - c0) Psi for single occupancy,
/// (c1 + delta c2) Psi for the hybrid scheme, with Psi = 2 rho R_a^a/(a+2).
pub fn avg_power(params: &NetworkParams, pmf: &OccupancyPmf, scheme: PowerScheme) -> f64 {
    let psi = params.psi_power();
    match scheme {
        PowerScheme::Oma => (1.0 - pmf.c[0]) * psi,
        PowerScheme::Hybrid { delta } => {
            let c1 = pmf.c.get(1).copied().unwrap_or(0.0);
            let c2 = pmf.c.get(2).copied().unwrap_or(0.0);
            (c1 + delta * c2) * psi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pmf(c: Vec<f64>) -> OccupancyPmf {
        let c_bar = c.iter().enumerate().map(|(u, p)| u as f64 * p).sum();
        OccupancyPmf { c, c_bar }
    }

    #[test]
    fn schemes_coincide_without_pairs() {
        let params = NetworkParams::default();
        let p = pmf(vec![0.0, 1.0, 0.0]);
        let oma = avg_power(&params, &p, PowerScheme::Oma);
        let hyb = avg_power(&params, &p, PowerScheme::Hybrid { delta: 0.7 });
        assert_relative_eq!(oma, hyb, max_relative = 1e-14);
        assert_relative_eq!(oma, params.psi_power(), max_relative = 1e-14);
    }

    #[test]
    fn full_pairs_at_budget_two_doubles_power() {
        let params = NetworkParams::default();
        let p = pmf(vec![0.0, 0.0, 1.0]);
        let oma = avg_power(&params, &p, PowerScheme::Oma);
        let hyb = avg_power(&params, &p, PowerScheme::Hybrid { delta: 2.0 });
        assert_relative_eq!(hyb, 2.0 * oma, max_relative = 1e-14);
    }

    #[test]
    fn coexistence_budget_saves_power() {
        let params = NetworkParams::default();
        let p = pmf(vec![0.0, 0.3, 0.7]);
        let oma = avg_power(&params, &p, PowerScheme::Oma);
        let hyb = avg_power(&params, &p, PowerScheme::Hybrid { delta: 0.744 });
        assert!(hyb < oma);
    }
}
