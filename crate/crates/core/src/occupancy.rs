//! Distribution of the number of devices allocated to one orthogonal channel
//! when K ~ Poisson(m_bar) devices are spread over N channels in rounds, at
//! most L per channel.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::params::NetworkParams;
use crate::specfun::gamma::{gamma_q_or_zero, poisson_pmf, regularized_gamma_q};

/// Per-channel occupancy distribution c_0..c_L and its mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyPmf {
    /// c[u] = probability that a channel carries exactly u devices.
    pub c: Vec<f64>,
    /// Mean devices per channel, sum of u * c[u].
    pub c_bar: f64,
}

impl OccupancyPmf {
    pub fn l_max(&self) -> u32 {
        (self.c.len() - 1) as u32
    }

    /// Probability that a channel is active (u >= 1).
    pub fn active(&self) -> f64 {
        1.0 - self.c[0]
    }
}

/// Occupancy conditioned on k devices requesting service: all channels hold
/// L when k >= N L; otherwise the count is floor(k/N) or one more, with the
/// fractional part as the split.
pub fn conditional_occupancy(k: u64, n: u32, l: u32) -> Result<Vec<f64>> {
    if n == 0 || l == 0 {
        return Err(CoreError::domain(
            "conditional_occupancy",
            format!("need n >= 1 and l >= 1, got n={n}, l={l}"),
        ));
    }
    let mut pmf = vec![0.0; l as usize + 1];
    if k >= n as u64 * l as u64 {
        pmf[l as usize] = 1.0;
        return Ok(pmf);
    }
    let fl = (k / n as u64) as usize;
    let frac = k as f64 / n as f64 - fl as f64;
    pmf[fl] = 1.0 - frac;
    if frac > 0.0 {
        pmf[fl + 1] = frac;
    }
    Ok(pmf)
}

/// Closed-form occupancy PMF. O(L) incomplete-gamma evaluations; the
/// exponential terms are Poisson masses evaluated in log space.
pub fn occupancy_pmf(params: &NetworkParams) -> Result<OccupancyPmf> {
    params.validate()?;
    let n = params.n_channels;
    let l = params.l_max;
    let m = params.m_bar;
    let nf = n as f64;

    let mut c = vec![0.0; l as usize + 1];

    // e^-m m^M / (N (M-1)!) = (M/N) Poisson(M; m)
    let boundary = |mult: u32| -> f64 {
        let big_m = n as u64 * mult as u64;
        mult as f64 * poisson_pmf(big_m, m)
    };

    c[0] = regularized_gamma_q(nf, m)? * (1.0 - m / nf) + poisson_pmf(n as u64, m);

    for u in 1..l {
        let uf = u as f64;
        let mut tot = 0.0;
        for t in [-1i32, 0, 1] {
            let mult = (u as i32 + t) as u32;
            let sign_t = if t % 2 == 0 { 1.0 } else { -1.0 };
            let q = gamma_q_or_zero(nf * mult as f64, m)?;
            let qterm = q * (t as f64 + sign_t * (m / nf - uf));
            let esign = if (1 - t.abs()) % 2 == 0 { 1.0 } else { -1.0 };
            let eterm = esign * boundary(mult);
            tot += 2f64.powi(1 - t.abs()) * (qterm + eterm);
        }
        c[u as usize] = tot;
    }

    if l >= 1 {
        let lf = l as f64;
        let mut tot = 1.0;
        for t in [0u32, 1] {
            let mult = l - t;
            let sign_t = if t % 2 == 0 { 1.0 } else { -1.0 };
            let q = gamma_q_or_zero(nf * mult as f64, m)?;
            let qterm = q * (sign_t * (m / nf - lf) - t as f64);
            let esign = if t == 0 { -1.0 } else { 1.0 };
            let eterm = esign * boundary(mult);
            tot += qterm + eterm;
        }
        c[l as usize] = tot;
    }

    for v in c.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let c_bar = c.iter().enumerate().map(|(u, p)| u as f64 * p).sum();
    Ok(OccupancyPmf { c, c_bar })
}

/// Brute-force Poisson mixture of the conditional law, truncated where the
/// Poisson tail falls below `tail`. Retained as the oracle for the closed
/// form.
pub fn occupancy_pmf_mixture(params: &NetworkParams, tail: f64) -> Result<OccupancyPmf> {
    params.validate()?;
    let n = params.n_channels;
    let l = params.l_max;
    let m = params.m_bar;
    let kcut = kmax_for_tail(m, tail)?;
    let mut c = vec![0.0; l as usize + 1];
    let mut mass = 0.0;
    for k in 0..=kcut {
        let w = poisson_pmf(k, m);
        mass += w;
        for (u, p) in conditional_occupancy(k, n, l)?.iter().enumerate() {
            c[u] += w * p;
        }
    }
    // anything beyond the cut saturates every channel
    c[l as usize] += (1.0 - mass).max(0.0);
    let c_bar = c.iter().enumerate().map(|(u, p)| u as f64 * p).sum();
    Ok(OccupancyPmf { c, c_bar })
}

/// Smallest k such that the Poisson tail beyond k is below `tau`:
/// Q(k+1, m_bar) > 1 - tau.
pub fn kmax_for_tail(m_bar: f64, tau: f64) -> Result<u64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(CoreError::domain(
            "kmax_for_tail",
            format!("tau must lie in (0,1), got {tau}"),
        ));
    }
    if m_bar.is_nan() || m_bar < 0.0 {
        return Err(CoreError::domain(
            "kmax_for_tail",
            format!("m_bar must be non-negative, got {m_bar}"),
        ));
    }
    let mut k = 0u64;
    loop {
        if regularized_gamma_q(k as f64 + 1.0, m_bar)? > 1.0 - tau {
            return Ok(k);
        }
        k += 1;
        if k > 100_000_000 {
            return Err(CoreError::Accuracy {
                context: "kmax_for_tail",
                estimate: k as f64,
                error_bound: tau,
            });
        }
    }
}
