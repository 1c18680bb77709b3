//! Success probabilities and aggregate metrics under random scheduling.

use crate::analytic::laplace::LaplaceModel;
use crate::error::{CoreError, Result};
use crate::occupancy::OccupancyPmf;
use crate::params::NetworkParams;
use crate::specfun::gamma::{poisson_pmf, regularized_gamma_q};

/// Success probability of the j-th decoded device on a channel carrying u
/// devices, (j, u) in {(1,1), (1,2), (2,2)}.
pub fn rrs_success(j: u32, u: u32, theta: f64, mu: f64, model: &LaplaceModel) -> Result<f64> {
    if theta.is_nan() || theta <= 0.0 || !(0.0..=1.0).contains(&mu) {
        return Err(CoreError::domain(
            "rrs_success",
            format!("need theta > 0 and mu in [0,1], got {theta}, {mu}"),
        ));
    }
    match (j, u) {
        (1, 1) => model.laplace_rrs(theta),
        (1, 2) => {
            // the two branches meet continuously at theta = 1; evaluate the
            // closed side there to avoid the 2 theta / (1 - theta) blow-up
            if theta >= 1.0 - 1e-12 {
                Ok(2.0 / (1.0 + theta) * model.laplace_rrs(theta)?)
            } else {
                let l1 = model.laplace_rrs(theta)?;
                let l2 = model.laplace_rrs(2.0 * theta / (1.0 - theta))?;
                Ok(2.0 / (1.0 + theta) * l1 - (1.0 - theta) / (1.0 + theta) * l2)
            }
        }
        (2, 2) => {
            let tm = theta * mu;
            if tm >= 1.0 {
                return Ok(0.0);
            }
            let l = model.laplace_rrs(2.0 * theta / (1.0 - tm))?;
            Ok((1.0 - tm) / (1.0 + tm) * l)
        }
        _ => Err(CoreError::domain(
            "rrs_success",
            format!("(j,u) must be one of (1,1),(1,2),(2,2); got ({j},{u})"),
        )),
    }
}

/// Average success over the devices of a typical active channel:
/// c1/(1-c0) p11 + c2/(2(1-c0)) (p12 + p22).
pub fn rrs_overall_success(pmf: &OccupancyPmf, p11: f64, p12: f64, p22: f64) -> Result<f64> {
    let c0 = pmf.c[0];
    if c0 >= 1.0 {
        return Err(CoreError::domain(
            "rrs_overall_success",
            "no active devices (c0 = 1)",
        ));
    }
    let c1 = pmf.c.get(1).copied().unwrap_or(0.0);
    let c2 = pmf.c.get(2).copied().unwrap_or(0.0);
    Ok(c1 / (1.0 - c0) * p11 + c2 / (2.0 * (1.0 - c0)) * (p12 + p22))
}

/// The three Poisson-window terms of the served-device count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServedTerms {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// A-terms of the served-count closed form, evaluated with log-space Poisson
/// masses. The third term is N (1 - Q(N+1, m_bar)), the expected number of
/// pair-carrying channels in the saturated regime; this corrects the sign of
/// the published expression, which fails its own defining sum (see the
/// brute-force oracle in the tests).
pub fn served_terms(params: &NetworkParams) -> Result<ServedTerms> {
    let n = params.n_channels as u64;
    let nf = n as f64;
    let m = params.m_bar;
    let q_n1 = regularized_gamma_q(nf + 1.0, m)?;
    let q_2n = regularized_gamma_q(2.0 * nf, m)?;
    // e^-m m^(N+1)/N! = m * pois(N; m); e^-m m^(2N)/(2N-1)! = 2N pois(2N; m)
    let e_n1 = m * poisson_pmf(n, m);
    let e_2n = 2.0 * nf * poisson_pmf(2 * n, m);
    let a1 = m * q_n1 - e_n1;
    let a2 = (e_2n - e_n1) - (m - 2.0 * nf) * (q_2n - q_n1);
    let a3 = nf * (1.0 - q_n1);
    Ok(ServedTerms { a1, a2, a3 })
}

/// Average number of simultaneously served devices in a cluster:
/// p11 (A1 + A2) + (p12 + p22)(A3 - A2).
pub fn rrs_avg_served(params: &NetworkParams, p11: f64, p12: f64, p22: f64) -> Result<f64> {
    let t = served_terms(params)?;
    Ok((p11 * (t.a1 + t.a2) + (p12 + p22) * (t.a3 - t.a2)).max(0.0))
}

/// Expected number of scheduled devices under single-occupancy access:
/// E[min(K, N)] = A1 + A3.
pub fn expected_scheduled_single(params: &NetworkParams) -> Result<f64> {
    let t = served_terms(params)?;
    Ok(t.a1 + t.a3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::laplace::LaplaceVariant;
    use approx::assert_relative_eq;

    fn model() -> LaplaceModel {
        LaplaceModel::new(LaplaceVariant::RrsWeighted, &NetworkParams::default()).unwrap()
    }

    /// Equality-(a) oracle: expected successes summed over the device count.
    fn served_oracle(params: &NetworkParams, p11: f64, p12p22: f64) -> f64 {
        let n = params.n_channels as u64;
        let m = params.m_bar;
        let kcut = crate::occupancy::kmax_for_tail(m, 1e-13).unwrap();
        let mut tot = 0.0;
        let mut tail = 1.0;
        for k in 0..=kcut {
            let w = poisson_pmf(k, m);
            tail -= w;
            tot += w * if k <= n {
                p11 * k as f64
            } else if k < 2 * n {
                p11 * (2 * n - k) as f64 + p12p22 * (k - n) as f64
            } else {
                n as f64 * p12p22
            };
        }
        tot + tail.max(0.0) * n as f64 * p12p22
    }

    #[test]
    fn interference_free_network_always_succeeds() {
        // vanishing aggregator density sends the transform (and p11) to 1
        let params = NetworkParams {
            lambda_a: 1e-30,
            ..Default::default()
        };
        let m = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let p11 = rrs_success(1, 1, 1.0, 0.0, &m).unwrap();
        assert!((p11 - 1.0).abs() < 1e-12, "{p11}");
    }

    #[test]
    fn sic_failure_branch() {
        let m = model();
        assert_eq!(rrs_success(2, 2, 2.0, 0.5, &m).unwrap(), 0.0);
        assert_eq!(rrs_success(2, 2, 1.0, 1.0, &m).unwrap(), 0.0);
    }

    #[test]
    fn first_decoded_matches_transform_at_unit_threshold() {
        let m = model();
        let l1 = m.laplace_rrs(1.0).unwrap();
        assert_relative_eq!(rrs_success(1, 1, 1.0, 0.0, &m).unwrap(), l1, max_relative = 1e-14);
        assert_relative_eq!(rrs_success(1, 2, 1.0, 0.0, &m).unwrap(), l1, max_relative = 1e-14);
        // p22 at mu = 0 is L(2 theta)
        let l2 = m.laplace_rrs(2.0).unwrap();
        assert_relative_eq!(rrs_success(2, 2, 1.0, 0.0, &m).unwrap(), l2, max_relative = 1e-14);
    }

    #[test]
    fn second_decode_never_beats_first_with_residual() {
        // p22 <= p12 pointwise for mu > 0 at theta >= 1
        let m = model();
        for theta in [1.0, 1.5, 3.0, 8.0] {
            for mu in [0.05, 0.2, 0.6, 0.9] {
                let p12 = rrs_success(1, 2, theta, mu, &m).unwrap();
                let p22 = rrs_success(2, 2, theta, mu, &m).unwrap();
                assert!(
                    p22 <= p12 + 1e-14,
                    "theta={theta} mu={mu}: p22={p22} > p12={p12}"
                );
            }
        }
    }

    #[test]
    fn pair_branch_continuous_at_unit_threshold() {
        let m = model();
        let below = rrs_success(1, 2, 1.0 - 1e-9, 0.0, &m).unwrap();
        let at = rrs_success(1, 2, 1.0, 0.0, &m).unwrap();
        assert!((below - at).abs() < 1e-6, "{below} vs {at}");
    }

    #[test]
    fn overall_reduces_to_p11_without_pairs() {
        let pmf = OccupancyPmf {
            c: vec![0.3, 0.7, 0.0],
            c_bar: 0.7,
        };
        let v = rrs_overall_success(&pmf, 0.9, 0.5, 0.4).unwrap();
        assert_relative_eq!(v, 0.9, max_relative = 1e-14);
    }

    #[test]
    fn overall_pair_average_when_saturated() {
        let pmf = OccupancyPmf {
            c: vec![0.2, 0.0, 0.8],
            c_bar: 1.6,
        };
        let v = rrs_overall_success(&pmf, 0.9, 0.6, 0.4).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn overall_rejects_empty_network() {
        let pmf = OccupancyPmf {
            c: vec![1.0, 0.0, 0.0],
            c_bar: 0.0,
        };
        assert!(rrs_overall_success(&pmf, 0.9, 0.6, 0.4).is_err());
    }

    #[test]
    fn served_terms_match_brute_force_oracle() {
        for (n, m) in [(2u32, 3.0), (30, 60.0), (10, 5.0), (5, 40.0), (8, 16.0)] {
            let params = NetworkParams {
                n_channels: n,
                m_bar: m,
                ..Default::default()
            };
            let (p11, p12p22) = (0.7, 1.1);
            let closed = rrs_avg_served(&params, p11, 0.6, 0.5).unwrap();
            let oracle = served_oracle(&params, p11, p12p22);
            assert_relative_eq!(closed, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn served_is_zero_without_devices() {
        let params = NetworkParams {
            m_bar: 0.0,
            ..Default::default()
        };
        let t = served_terms(&params).unwrap();
        assert!(t.a1.abs() < 1e-14 && t.a2.abs() < 1e-14 && t.a3.abs() < 1e-14);
        assert_eq!(rrs_avg_served(&params, 0.9, 0.8, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn served_saturates_at_pair_capacity() {
        // m_bar >> 2N: served -> N (p12 + p22)
        let params = NetworkParams {
            n_channels: 10,
            m_bar: 200.0,
            ..Default::default()
        };
        let v = rrs_avg_served(&params, 0.9, 0.6, 0.5).unwrap();
        assert_relative_eq!(v, 10.0 * 1.1, max_relative = 1e-9);
    }

    #[test]
    fn served_bounded_by_capacity_and_demand() {
        for (n, m) in [(30u32, 60.0), (10, 8.0), (4, 100.0)] {
            let params = NetworkParams {
                n_channels: n,
                m_bar: m,
                ..Default::default()
            };
            let v = rrs_avg_served(&params, 1.0, 1.0, 1.0).unwrap();
            assert!(v <= (params.l_max * n) as f64 + 1e-9);
            assert!(v <= m + 1e-9);
        }
    }
}
