//! Success probabilities and aggregate metrics under channel-aware
//! scheduling. Per-rank probabilities come from a probability inversion of
//! the weighted interference transform evaluated at expected-gain location
//! terms; the per-device and cluster metrics average those over the Poisson
//! device count, truncated where the Poisson tail falls below a tolerance.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::analytic::laplace::{chi_constant, LaplaceModel};
use crate::analytic::rrs::served_terms;
use crate::error::{CoreError, Result};
use crate::occupancy::{kmax_for_tail, occupancy_pmf, OccupancyPmf};
use crate::params::NetworkParams;
use crate::scheduling::PowerControl;
use crate::specfun::gamma::{digamma, poisson_pmf, regularized_gamma_q};
use crate::specfun::oscillatory::integrate_gil_pelaez;
use crate::specfun::quad::QuadratureSpec;

/// Location term built from the expected ordered gains: the inversion
/// evaluates Pr(I < B).
#[allow(clippy::too_many_arguments)]
pub fn b_term(
    j: u32,
    u: u32,
    i: u32,
    k: u64,
    n: u32,
    theta: f64,
    mu: f64,
    a_i: f64,
    b_i: f64,
) -> Result<f64> {
    if i == 0 || k < i as u64 {
        return Err(CoreError::domain(
            "b_term",
            format!("need 1 <= i <= K, got i={i}, K={k}"),
        ));
    }
    if u == 2 && k < i as u64 + n as u64 {
        return Err(CoreError::domain(
            "b_term",
            format!("pair terms need K >= i + N, got i={i}, N={n}, K={k}"),
        ));
    }
    let psi_k1 = digamma(k as f64 + 1.0)?;
    let psi_i = digamma(i as f64)?;
    match (j, u) {
        (1, 1) => Ok((psi_k1 - psi_i) / theta),
        (1, 2) => {
            let psi_in = digamma((i + n) as f64)?;
            Ok((a_i / theta - b_i) * psi_k1 + b_i * psi_in - a_i / theta * psi_i)
        }
        (2, 2) => {
            let psi_in = digamma((i + n) as f64)?;
            Ok((b_i / theta - mu * a_i) * psi_k1 + mu * a_i * psi_i - b_i / theta * psi_in)
        }
        _ => Err(CoreError::domain(
            "b_term",
            format!("(j,u) must be one of (1,1),(1,2),(2,2); got ({j},{u})"),
        )),
    }
}

/// Parameters of the two-component inversion integral: the stable exponents
/// nu_t with their cos/sin projections, and the location term B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilPelaezTerms {
    pub nu: [f64; 2],
    pub sigma: [f64; 2],
    pub rho: [f64; 2],
    pub b: f64,
}

impl GilPelaezTerms {
    pub fn new(chi: f64, c1: f64, c2: f64, delta: f64, alpha: f64, b: f64) -> Self {
        let x = 2.0 / alpha;
        let ang = std::f64::consts::PI / alpha;
        let mut nu = [0.0; 2];
        let mut sigma = [0.0; 2];
        let mut rho = [0.0; 2];
        for (idx, t) in [1.0f64, 2.0].iter().enumerate() {
            let v = chi * (c1 + c2 * t.powf((alpha - 2.0) / alpha) * delta.powf(x));
            nu[idx] = v;
            sigma[idx] = v * ang.cos();
            rho[idx] = v * ang.sin();
        }
        GilPelaezTerms { nu, sigma, rho, b }
    }
}

/// Probability that the interference stays below the location term:
/// 1/2 - sum_t beta_t * kernel(sigma_t, rho_t, B). The expectation step
/// behind B is an approximation, so values marginally outside [0, 1] are
/// clamped (and logged).
pub fn crs_rank_success(
    terms: &GilPelaezTerms,
    beta0: f64,
    beta1: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let g0 = integrate_gil_pelaez(terms.sigma[0], terms.rho[0], terms.b, alpha, spec)?;
    let g1 = integrate_gil_pelaez(terms.sigma[1], terms.rho[1], terms.b, alpha, spec)?;
    let raw = 0.5 - beta0 * g0 - beta1 * g1;
    if !(0.0..=1.0).contains(&raw) {
        log::debug!("rank success {raw} clamped to [0,1] at B={}", terms.b);
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Channel-aware model: occupancy, power policy, truncation point and the
/// inversion constants, with the random-scheduling single-occupancy success
/// supplied for the K <= N regime.
#[derive(Debug, Clone)]
pub struct CrsModel {
    pub params: NetworkParams,
    pub pmf: OccupancyPmf,
    pub power: PowerControl,
    pub chi: f64,
    /// Success of a sole occupant under random scheduling, used for the
    /// K <= N mass where both schemes coincide.
    pub p11_rrs: f64,
    /// Poisson truncation index from the tail rule.
    pub k_max: u64,
    pub spec: QuadratureSpec,
    psi: Vec<f64>,
}

/// All channel-aware metrics produced in one table pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrsReport {
    pub p11: f64,
    pub p12: f64,
    pub p22: f64,
    pub overall: f64,
    pub avg_served: f64,
}

impl CrsModel {
    /// `tau` is the admissible Poisson tail mass for truncating the sums.
    pub fn new(
        params: &NetworkParams,
        power: PowerControl,
        p11_rrs: f64,
        tau: f64,
    ) -> Result<Self> {
        params.validate()?;
        if params.l_max > 2 {
            return Err(CoreError::domain(
                "CrsModel",
                format!("pair analysis requires L <= 2, got {}", params.l_max),
            ));
        }
        let pmf = occupancy_pmf(params)?;
        let k_max = kmax_for_tail(params.m_bar, tau)?.max(params.n_channels as u64);
        let mut psi = Vec::with_capacity(k_max as usize + params.n_channels as usize + 2);
        psi.push(f64::NAN); // 1-based
        for idx in 1..=(k_max + params.n_channels as u64 + 1) {
            psi.push(digamma(idx as f64)?);
        }
        Ok(CrsModel {
            params: params.clone(),
            pmf,
            power,
            chi: chi_constant(params),
            p11_rrs,
            k_max,
            spec: QuadratureSpec::one_dim(),
            psi,
        })
    }

    /// Convenience constructor taking the transform model that prices the
    /// K <= N regime.
    pub fn from_laplace(
        params: &NetworkParams,
        power: PowerControl,
        rrs_model: &LaplaceModel,
        tau: f64,
    ) -> Result<Self> {
        let p11 = crate::analytic::rrs::rrs_success(1, 1, params.theta, params.mu, rrs_model)?;
        CrsModel::new(params, power, p11, tau)
    }

    fn psi_int(&self, idx: u64) -> f64 {
        self.psi[idx as usize]
    }

    fn c1c2(&self) -> (f64, f64) {
        (
            self.pmf.c.get(1).copied().unwrap_or(0.0),
            self.pmf.c.get(2).copied().unwrap_or(0.0),
        )
    }

    fn location_term(&self, j: u32, u: u32, i: u32, k: u64) -> Result<f64> {
        let theta = self.params.theta;
        let n = self.params.n_channels;
        let psi_k1 = self.psi_int(k + 1);
        let psi_i = self.psi_int(i as u64);
        if u == 1 {
            return Ok((psi_k1 - psi_i) / theta);
        }
        let psi_in = self.psi_int(i as u64 + n as u64);
        let (a, b) = self
            .power
            .coefficients(i, k, n, theta, self.params.mu)?;
        Ok(match j {
            1 => (a / theta - b) * psi_k1 + b * psi_in - a / theta * psi_i,
            _ => (b / theta - self.params.mu * a) * psi_k1 + self.params.mu * a * psi_i
                - b / theta * psi_in,
        })
    }

    /// Success of the j-th decoded device on the rank-i channel, given k
    /// contenders.
    pub fn rank_success(&self, j: u32, u: u32, i: u32, k: u64) -> Result<f64> {
        if !matches!((j, u), (1, 1) | (1, 2) | (2, 2)) {
            return Err(CoreError::domain(
                "rank_success",
                format!("(j,u) must be one of (1,1),(1,2),(2,2); got ({j},{u})"),
            ));
        }
        let b = self.location_term(j, u, i, k)?;
        let (c1, c2) = self.c1c2();
        let terms = GilPelaezTerms::new(
            self.chi,
            c1,
            c2,
            self.power.delta,
            self.params.alpha,
            b,
        );
        crs_rank_success(
            &terms,
            self.params.beta0,
            self.params.beta1,
            self.params.alpha,
            &self.spec,
        )
    }

    /// Rank-success tables over the truncated Poisson window, computed in
    /// parallel. `singles_to_kmax` extends the single-occupancy table past
    /// 2N - 1 for the single-occupancy (L = 1) metrics.
    fn tables(&self, singles_to_kmax: bool) -> Result<RankTables> {
        let n = self.params.n_channels as u64;
        let mut jobs: Vec<(u8, u32, u64)> = Vec::new();
        let single_hi = if singles_to_kmax {
            self.k_max
        } else {
            self.k_max.min(2 * n - 1)
        };
        for k in (n + 1)..=single_hi {
            // under pairing, ranks 1..k-N share; singles start above that.
            // the single-occupancy (L = 1) table spans every rank instead.
            let lo = if singles_to_kmax {
                1
            } else {
                (k - n + 1).min(n + 1) as u32
            };
            for i in lo..=(n as u32) {
                jobs.push((0, i, k));
            }
        }
        if self.params.l_max >= 2 {
            for k in (n + 1)..=self.k_max {
                let shared = (k - n).min(n) as u32;
                for i in 1..=shared {
                    jobs.push((1, i, k));
                    jobs.push((2, i, k));
                }
            }
        }
        type Keyed = ((u8, u32, u64), f64);
        let computed: Result<Vec<Keyed>> = jobs
            .into_par_iter()
            .map(|(kind, i, k)| {
                let v = match kind {
                    0 => self.rank_success(1, 1, i, k)?,
                    1 => self.rank_success(1, 2, i, k)?,
                    _ => self.rank_success(2, 2, i, k)?,
                };
                Ok(((kind, i, k), v))
            })
            .collect();
        Ok(RankTables {
            map: computed?.into_iter().collect(),
        })
    }

    /// Per-device success conditioned on sharing level u, averaged over the
    /// Poisson count. u = 1 blends the random-scheduling value over the
    /// K <= N mass; u = 2 averages the pair ranks.
    pub fn conditional_success(&self, j: u32, u: u32) -> Result<f64> {
        let t = self.tables(false)?;
        match (j, u) {
            (1, 1) => Ok(self.conditional_single(&t)?),
            (1, 2) => Ok(self.conditional_pair(&t, 1)?),
            (2, 2) => Ok(self.conditional_pair(&t, 2)?),
            _ => Err(CoreError::domain(
                "conditional_success",
                format!("(j,u) must be one of (1,1),(1,2),(2,2); got ({j},{u})"),
            )),
        }
    }

    fn conditional_single(&self, t: &RankTables) -> Result<f64> {
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let p0 = poisson_pmf(0, m);
        let den = 1.0 - p0;
        if den <= 0.0 {
            // empty network limit: the sole-occupant law
            return Ok(self.p11_rrs);
        }
        // mass of 1 <= K <= N, where the schemes coincide
        let mut num = self.p11_rrs * (regularized_gamma_q(n as f64 + 1.0, m)? - p0);
        for k in (n + 1)..=self.k_max.min(2 * n - 1) {
            let w = poisson_pmf(k, m);
            let lo = (k - n + 1) as u32;
            let cnt = (n as u32 - lo + 1) as f64;
            let sum: f64 = (lo..=n as u32).map(|i| t.get(0, i, k)).sum();
            num += w * sum / cnt;
        }
        Ok(num / den)
    }

    fn conditional_pair(&self, t: &RankTables, kind: u8) -> Result<f64> {
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let den = 1.0 - regularized_gamma_q(n as f64 + 1.0, m)?;
        if den <= f64::MIN_POSITIVE {
            // sharing never happens
            return Ok(0.0);
        }
        let mut num = 0.0;
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            let shared = (k - n).min(n) as u32;
            let sum: f64 = (1..=shared).map(|i| t.get(kind, i, k)).sum();
            num += w * sum / shared as f64;
        }
        Ok(num / den)
    }

    /// Average over all served devices of the success probability.
    pub fn overall_success(&self) -> Result<f64> {
        let t = self.tables(false)?;
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let p0 = poisson_pmf(0, m);
        let den = 1.0 - p0;
        if den <= 0.0 {
            return Ok(self.p11_rrs);
        }
        let mut num = self.p11_rrs * (regularized_gamma_q(n as f64 + 1.0, m)? - p0);
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            if k < 2 * n {
                let shared = (k - n) as u32;
                let pair_sum: f64 = (1..=shared)
                    .map(|i| t.get(1, i, k) + t.get(2, i, k))
                    .sum();
                let single_sum: f64 = ((shared + 1)..=n as u32).map(|i| t.get(0, i, k)).sum();
                num += w * (pair_sum + single_sum) / k as f64;
            } else {
                let pair_sum: f64 = (1..=n as u32).map(|i| t.get(1, i, k) + t.get(2, i, k)).sum();
                num += w * pair_sum / (2 * n) as f64;
            }
        }
        Ok(num / den)
    }

    /// Average number of simultaneously served devices in the cluster.
    pub fn avg_served(&self) -> Result<f64> {
        let t = self.tables(false)?;
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let a1 = served_terms(&self.params)?.a1;
        let mut total = self.p11_rrs * a1;
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            if k < 2 * n {
                let shared = (k - n) as u32;
                let pair_sum: f64 = (1..=shared)
                    .map(|i| t.get(1, i, k) + t.get(2, i, k))
                    .sum();
                let single_sum: f64 = ((shared + 1)..=n as u32).map(|i| t.get(0, i, k)).sum();
                total += w * (pair_sum + single_sum);
            } else {
                let pair_sum: f64 = (1..=n as u32).map(|i| t.get(1, i, k) + t.get(2, i, k)).sum();
                total += w * pair_sum;
            }
        }
        Ok(total.max(0.0))
    }

    /// Per-device success of the single-occupancy (L = 1) variant, where the
    /// N best-ranked devices each hold a channel alone.
    pub fn single_access_success(&self) -> Result<f64> {
        let t = self.tables(true)?;
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let p0 = poisson_pmf(0, m);
        let den = 1.0 - p0;
        if den <= 0.0 {
            return Ok(self.p11_rrs);
        }
        let mut num = self.p11_rrs * (regularized_gamma_q(n as f64 + 1.0, m)? - p0);
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            let sum: f64 = (1..=n as u32).map(|i| t.get(0, i, k)).sum();
            num += w * sum / n as f64;
        }
        Ok(num / den)
    }

    /// Average served devices of the single-occupancy (L = 1) variant.
    pub fn single_access_avg_served(&self) -> Result<f64> {
        let t = self.tables(true)?;
        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let a1 = served_terms(&self.params)?.a1;
        let mut total = self.p11_rrs * a1;
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            let sum: f64 = (1..=n as u32).map(|i| t.get(0, i, k)).sum();
            total += w * sum;
        }
        Ok(total.max(0.0))
    }

    /// Everything from a single table pass.
    pub fn evaluate(&self) -> Result<CrsReport> {
        if self.params.l_max == 1 {
            let p11 = self.single_access_success()?;
            return Ok(CrsReport {
                p11,
                p12: 0.0,
                p22: 0.0,
                overall: p11,
                avg_served: self.single_access_avg_served()?,
            });
        }
        let t = self.tables(false)?;
        let p11 = self.conditional_single(&t)?;
        let p12 = self.conditional_pair(&t, 1)?;
        let p22 = self.conditional_pair(&t, 2)?;

        let n = self.params.n_channels as u64;
        let m = self.params.m_bar;
        let p0 = poisson_pmf(0, m);
        let den = 1.0 - p0;
        let a1 = served_terms(&self.params)?.a1;
        let mut served = self.p11_rrs * a1;
        let mut overall_num = self.p11_rrs * (regularized_gamma_q(n as f64 + 1.0, m)? - p0);
        for k in (n + 1)..=self.k_max {
            let w = poisson_pmf(k, m);
            let (pair_sum, single_sum, devices) = if k < 2 * n {
                let shared = (k - n) as u32;
                let p: f64 = (1..=shared).map(|i| t.get(1, i, k) + t.get(2, i, k)).sum();
                let s: f64 = ((shared + 1)..=n as u32).map(|i| t.get(0, i, k)).sum();
                (p, s, k as f64)
            } else {
                let p: f64 = (1..=n as u32).map(|i| t.get(1, i, k) + t.get(2, i, k)).sum();
                (p, 0.0, (2 * n) as f64)
            };
            served += w * (pair_sum + single_sum);
            overall_num += w * (pair_sum + single_sum) / devices;
        }
        let overall = if den <= 0.0 {
            self.p11_rrs
        } else {
            overall_num / den
        };
        Ok(CrsReport {
            p11,
            p12,
            p22,
            overall,
            avg_served: served.max(0.0),
        })
    }
}

struct RankTables {
    map: HashMap<(u8, u32, u64), f64>,
}

impl RankTables {
    fn get(&self, kind: u8, i: u32, k: u64) -> f64 {
        *self
            .map
            .get(&(kind, i, k))
            .expect("rank table covers the truncated window")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::laplace::LaplaceVariant;
    use crate::scheduling::power_coefficients;
    use approx::assert_relative_eq;

    fn default_model(power: PowerControl) -> CrsModel {
        let params = NetworkParams::default();
        let lap = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        CrsModel::from_laplace(&params, power, &lap, 1e-5).unwrap()
    }

    #[test]
    fn b_term_harmonic_example() {
        // B_{1,1} with K=2, i=1, theta=1 is psi(3) - psi(1) = H_2 = 1.5
        let b = b_term(1, 1, 1, 2, 30, 1.0, 0.0, 0.5, 0.5).unwrap();
        assert_relative_eq!(b, 1.5, max_relative = 1e-12);
        // harmonic-number route for a larger case
        let b = b_term(1, 1, 1, 40, 30, 1.0, 0.0, 0.5, 0.5).unwrap();
        let h40: f64 = (1..=40).map(|j| 1.0 / j as f64).sum();
        assert_relative_eq!(b, h40, max_relative = 1e-12);
    }

    #[test]
    fn b_term_vanishes_at_large_threshold() {
        let big = b_term(1, 1, 1, 40, 30, 1e12, 0.0, 0.5, 0.5).unwrap();
        assert!(big.abs() < 1e-11);
    }

    #[test]
    fn balanced_coefficients_equalize_pair_terms() {
        let (a, b) = power_coefficients(4, 50, 30, 1.3, 0.05, 0.9).unwrap();
        let b12 = b_term(1, 2, 4, 50, 30, 1.3, 0.05, a, b).unwrap();
        let b22 = b_term(2, 2, 4, 50, 30, 1.3, 0.05, a, b).unwrap();
        assert!((b12 - b22).abs() < 1e-10);
    }

    #[test]
    fn terms_projections_consistent() {
        let t = GilPelaezTerms::new(0.18, 0.1, 0.9, 0.75, 3.6, 2.0);
        let ang = std::f64::consts::PI / 3.6;
        for idx in 0..2 {
            assert!(t.nu[idx] > 0.0);
            assert_relative_eq!(t.sigma[idx], t.nu[idx] * ang.cos(), max_relative = 1e-15);
            assert_relative_eq!(t.rho[idx], t.nu[idx] * ang.sin(), max_relative = 1e-15);
        }
    }

    #[test]
    fn rank_success_interference_free_limits() {
        let spec = QuadratureSpec::one_dim();
        let free = GilPelaezTerms {
            nu: [0.0; 2],
            sigma: [0.0; 2],
            rho: [0.0; 2],
            b: 2.5,
        };
        let p = crs_rank_success(&free, 0.5, 0.5, 3.6, &spec).unwrap();
        assert!((p - 1.0).abs() < 1e-3);
        let blocked = GilPelaezTerms { b: -2.5, ..free };
        let p = crs_rank_success(&blocked, 0.5, 0.5, 3.6, &spec).unwrap();
        assert!(p.abs() < 1e-3);
    }

    #[test]
    fn rank_success_stable_law_oracle() {
        // frozen from a 2M-sample simulation of the one-sided stable law
        // matching the transform exponents at default parameters, delta = 1:
        // B = psi(41) - psi(1) = H_40 -> p = 0.9534 +- 0.0004
        let model = default_model(PowerControl::fixed(1.0));
        let p = model.rank_success(1, 1, 1, 40).unwrap();
        assert!((p - 0.95349).abs() < 2e-3, "{p}");
    }

    #[test]
    fn balanced_policy_gives_equal_pair_success() {
        let model = default_model(PowerControl::balanced(0.7444));
        for (i, k) in [(1u32, 40u64), (7, 55), (30, 90)] {
            let p12 = model.rank_success(1, 2, i, k).unwrap();
            let p22 = model.rank_success(2, 2, i, k).unwrap();
            assert!(
                (p12 - p22).abs() < 1e-9,
                "i={i} k={k}: {p12} vs {p22}"
            );
        }
    }

    #[test]
    fn conditional_pair_success_fairness() {
        let model = default_model(PowerControl::balanced(0.7444));
        let p12 = model.conditional_success(1, 2).unwrap();
        let p22 = model.conditional_success(2, 2).unwrap();
        assert!((p12 - p22).abs() < 0.05, "{p12} vs {p22}");
        assert!(p12 > 0.0 && p12 < 1.0);
    }

    #[test]
    fn no_demand_limits() {
        let params = NetworkParams {
            m_bar: 1e-9,
            ..Default::default()
        };
        let lap = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let model =
            CrsModel::from_laplace(&params, PowerControl::fixed(1.0), &lap, 1e-5).unwrap();
        // all mass at K <= N: the conditional single success tends to the
        // random-scheduling value and sharing never happens
        let p = model.conditional_success(1, 1).unwrap();
        assert_relative_eq!(p, model.p11_rrs, max_relative = 1e-6);
        assert_eq!(model.conditional_success(1, 2).unwrap(), 0.0);
        let served = model.avg_served().unwrap();
        assert!(served < 1e-6);
    }

    #[test]
    fn evaluate_consistent_with_individual_methods() {
        let model = default_model(PowerControl::balanced(0.7444));
        let r = model.evaluate().unwrap();
        assert_relative_eq!(r.p11, model.conditional_success(1, 1).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(r.p12, model.conditional_success(1, 2).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(r.p22, model.conditional_success(2, 2).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(r.overall, model.overall_success().unwrap(), max_relative = 1e-12);
        assert_relative_eq!(r.avg_served, model.avg_served().unwrap(), max_relative = 1e-12);
        assert!(r.avg_served <= 60.0 && r.avg_served <= 2.0 * 30.0);
        assert!(r.overall > 0.0 && r.overall < 1.0);
    }

    #[test]
    fn saturated_regime_served_tracks_pair_success() {
        // m_bar >> 2N: served ~ sum_i (p12 + p22) over the N channels
        let params = NetworkParams {
            n_channels: 10,
            m_bar: 80.0,
            ..Default::default()
        };
        let lap = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let model =
            CrsModel::from_laplace(&params, PowerControl::fixed(1.0), &lap, 1e-5).unwrap();
        let served = model.avg_served().unwrap();
        let p12 = model.conditional_success(1, 2).unwrap();
        let p22 = model.conditional_success(2, 2).unwrap();
        let approx_served = 10.0 * (p12 + p22);
        assert!(
            (served - approx_served).abs() / approx_served < 0.05,
            "{served} vs {approx_served}"
        );
    }

    #[test]
    fn single_access_variant() {
        let params = NetworkParams {
            l_max: 1,
            ..Default::default()
        };
        let lap = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let model =
            CrsModel::from_laplace(&params, PowerControl::fixed(1.0), &lap, 1e-5).unwrap();
        let r = model.evaluate().unwrap();
        // best-N selection beats the unordered single-occupant law
        assert!(r.p11 >= model.p11_rrs - 1e-9, "{} vs {}", r.p11, model.p11_rrs);
        assert!(r.avg_served <= params.n_channels as f64 + 1e-9);
        assert_eq!(r.p12, 0.0);
    }
}
