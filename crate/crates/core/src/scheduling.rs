//! Channel assignment procedures and power-weight policies.
//!
//! RRS matches devices to channels uniformly at random in rounds; CRS sorts
//! devices by fading gain and hands the best N the channels, with later
//! rounds pairing rank i + N onto the channel of rank i. Shared channels
//! split a power budget delta between the pair.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::params::NetworkParams;
use crate::specfun::gamma::digamma;

/// Result of a scheduling round: device indices per channel in decode order,
/// the fading rank of each scheduled device (CRS only) and its power weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// channels[n] lists device indices on channel n; under CRS the first
    /// entry is the higher-ranked (stronger) device.
    pub channels: Vec<Vec<usize>>,
    /// ranks[d] = 1-based fading rank of device d (None for RRS or for
    /// devices left unscheduled).
    pub ranks: Vec<Option<u32>>,
    /// weights[d] = transmit power weight (1 for a sole occupant, a_i / b_i
    /// for a sharing pair, 0 for unscheduled devices).
    pub weights: Vec<f64>,
}

impl Assignment {
    fn empty(k: usize, n: u32) -> Self {
        Assignment {
            channels: vec![Vec::new(); n as usize],
            ranks: vec![None; k],
            weights: vec![0.0; k],
        }
    }

    /// Number of devices that obtained a channel.
    pub fn scheduled(&self) -> usize {
        self.channels.iter().map(|c| c.len()).sum()
    }
}

/// Random resource scheduling: each round matches up to N of the remaining
/// devices one-to-one with the channels, repeated until everyone is placed
/// or every channel holds L devices.
pub fn rrs_assign<R: Rng + ?Sized>(k: u64, n: u32, l: u32, rng: &mut R) -> Assignment {
    let capacity = n as u64 * l as u64;
    let placed = k.min(capacity) as usize;
    let mut asg = Assignment::empty(k as usize, n);

    let mut order: Vec<usize> = (0..k as usize).collect();
    order.shuffle(rng);

    let full_rounds = placed / n as usize;
    let remainder = placed % n as usize;
    let mut next = 0usize;
    for _ in 0..full_rounds {
        // a full round touches every channel exactly once
        let mut chans: Vec<usize> = (0..n as usize).collect();
        chans.shuffle(rng);
        for ch in chans {
            let d = order[next];
            next += 1;
            asg.channels[ch].push(d);
            asg.weights[d] = 1.0;
        }
    }
    if remainder > 0 {
        let mut chans: Vec<usize> = (0..n as usize).collect();
        chans.shuffle(rng);
        for &ch in chans.iter().take(remainder) {
            let d = order[next];
            next += 1;
            asg.channels[ch].push(d);
            asg.weights[d] = 1.0;
        }
    }
    asg
}

/// Channel-aware scheduling: devices sorted by descending fading gain (ties
/// broken by device index) and assigned in rank order, round by round, at
/// most `l` per channel. Channel i (0-based) receives ranks i+1, i+1+N, ...
pub fn crs_assign(gains: &[f64], n: u32, l: u32) -> Assignment {
    let k = gains.len();
    let mut asg = Assignment::empty(k, n);
    let mut by_rank: Vec<usize> = (0..k).collect();
    by_rank.sort_by(|&a, &b| {
        gains[b]
            .partial_cmp(&gains[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let capacity = (n as usize) * (l as usize);
    for (pos, &d) in by_rank.iter().enumerate().take(capacity.min(k)) {
        let ch = pos % n as usize;
        asg.channels[ch].push(d);
        asg.ranks[d] = Some(pos as u32 + 1);
        asg.weights[d] = 1.0;
    }
    asg
}

/// Access scheme selector shared by the simulator, the analytic assembly
/// and the experiment driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessScheme {
    /// Single occupancy (L forced to 1), random scheduling.
    Oma,
    /// Random scheduling, hybrid occupancy, unit weights.
    Rrs,
    /// Channel-aware scheduling, equal power split delta/2 per sharer.
    CrsFixed,
    /// Channel-aware scheduling, reliability-balancing coefficients.
    CrsTheorem4,
}

impl AccessScheme {
    pub fn is_crs(self) -> bool {
        matches!(self, AccessScheme::CrsFixed | AccessScheme::CrsTheorem4)
    }

    /// Power policy applied on shared channels, when the scheme has one.
    pub fn power_policy(self) -> Option<PowerPolicy> {
        match self {
            AccessScheme::CrsFixed => Some(PowerPolicy::EqualSplit),
            AccessScheme::CrsTheorem4 => Some(PowerPolicy::Balanced),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AccessScheme::Oma => "oma",
            AccessScheme::Rrs => "rrs",
            AccessScheme::CrsFixed => "crs_fixed",
            AccessScheme::CrsTheorem4 => "crs_theorem4",
        }
    }
}

impl std::str::FromStr for AccessScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "oma" => Ok(AccessScheme::Oma),
            "rrs" => Ok(AccessScheme::Rrs),
            "crs_fixed" => Ok(AccessScheme::CrsFixed),
            "crs_theorem4" => Ok(AccessScheme::CrsTheorem4),
            other => Err(format!(
                "unknown scheme '{other}' (expected oma, rrs, crs_fixed or crs_theorem4)"
            )),
        }
    }
}

/// Power split policy for the two devices sharing a CRS channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PowerPolicy {
    /// Both devices use delta / 2.
    EqualSplit,
    /// Reliability-balancing coefficients of the digamma closed form.
    Balanced,
}

/// Power-control configuration: the shared budget, the split policy and the
/// solved coexistence budget when one was requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerControl {
    pub delta: f64,
    pub policy: PowerPolicy,
    pub delta_star: Option<f64>,
}

impl PowerControl {
    pub fn fixed(delta: f64) -> Self {
        PowerControl {
            delta,
            policy: PowerPolicy::EqualSplit,
            delta_star: None,
        }
    }

    pub fn balanced(delta: f64) -> Self {
        PowerControl {
            delta,
            policy: PowerPolicy::Balanced,
            delta_star: None,
        }
    }

    /// (a_i, b_i) for the pair on the rank-i channel when k devices contest.
    pub fn coefficients(&self, i: u32, k: u64, n: u32, theta: f64, mu: f64) -> Result<(f64, f64)> {
        match self.policy {
            PowerPolicy::EqualSplit => Ok((self.delta / 2.0, self.delta / 2.0)),
            PowerPolicy::Balanced => power_coefficients(i, k, n, theta, mu, self.delta),
        }
    }

    /// Per-rank coefficient table for ranks 1..=min(k - n, n).
    pub fn rank_table(&self, k: u64, n: u32, theta: f64, mu: f64) -> Result<Vec<(f64, f64)>> {
        let shared = (k.saturating_sub(n as u64)).min(n as u64) as u32;
        (1..=shared)
            .map(|i| self.coefficients(i, k, n, theta, mu))
            .collect()
    }
}

/// Reliability-balancing power coefficients: the closed form obtained by
/// equating the expected-gain location terms of the two sharing devices,
/// under a_i + b_i = delta.
pub fn power_coefficients(
    i: u32,
    k: u64,
    n: u32,
    theta: f64,
    mu: f64,
    delta: f64,
) -> Result<(f64, f64)> {
    if i == 0 || i > n {
        return Err(CoreError::domain(
            "power_coefficients",
            format!("rank must satisfy 1 <= i <= N, got i={i}, N={n}"),
        ));
    }
    if k <= n as u64 {
        return Err(CoreError::domain(
            "power_coefficients",
            format!("sharing requires K > N, got K={k}, N={n}"),
        ));
    }
    if theta.is_nan() || theta <= 0.0 || !(0.0..1.0).contains(&mu) || delta.is_nan() || delta <= 0.0 {
        return Err(CoreError::domain(
            "power_coefficients",
            format!("need theta > 0, mu in [0,1), delta > 0; got {theta}, {mu}, {delta}"),
        ));
    }
    let psi_k1 = digamma(k as f64 + 1.0)?;
    let psi_i = digamma(i as f64)?;
    let psi_in = digamma((i + n) as f64)?;
    let inv_t = 1.0 / theta;
    let num = delta * (1.0 + inv_t) * (psi_k1 - psi_in);
    let den = (1.0 + mu + 2.0 * inv_t) * psi_k1 - (mu + inv_t) * psi_i - (1.0 + inv_t) * psi_in;
    if den.is_nan() || den <= 0.0 {
        return Err(CoreError::domain(
            "power_coefficients",
            format!(
                "infeasible combination (theta={theta}, mu={mu}, i={i}, K={k}, N={n}): denominator {den}"
            ),
        ));
    }
    let a = num / den;
    Ok((a, delta - a))
}

/// Solution of the fair-coexistence budget equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaStar {
    pub value: f64,
    /// Residual of the defining equation at the returned root.
    pub residual: f64,
    /// Set when the residual does not change sign over the bracket (the
    /// xi -> 1 degeneracy); the bracket midpoint is returned in that case.
    pub degenerate: bool,
}

/// Budget delta* at which a cluster of sharing pairs generates the same
/// inter-cluster interference as single occupants: root of
/// xi^(d^(2/a) - 1) + xi^(2^((a-2)/a) d^(2/a) - 1) = 2 with
/// xi = exp(-chi c2 s^(2/a)), bisected over [2^((2-a)/2), 1].
pub fn delta_star(params: &NetworkParams, s: f64, c2: f64) -> Result<DeltaStar> {
    params.validate()?;
    if s.is_nan() || s <= 0.0 {
        return Err(CoreError::domain(
            "delta_star",
            format!("transform argument must be positive, got {s}"),
        ));
    }
    if !(c2 > 0.0 && c2 <= 1.0) {
        return Err(CoreError::domain(
            "delta_star",
            format!("pair probability must lie in (0,1], got {c2}"),
        ));
    }
    let alpha = params.alpha;
    let x = 2.0 / alpha;
    let chi = crate::analytic::chi_constant(params);
    let xi = (-chi * c2 * s.powf(x)).exp();
    let shift = 2f64.powf((alpha - 2.0) / alpha);
    let f = |d: f64| xi.powf(d.powf(x) - 1.0) + xi.powf(shift * d.powf(x) - 1.0) - 2.0;

    let mut lo = 2f64.powf((2.0 - alpha) / 2.0);
    let mut hi = 1.0;
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo > 0.0 && fhi < 0.0) {
        // xi -> 1 degeneracy: the residual is flat
        let mid = 0.5 * (lo + hi);
        return Ok(DeltaStar {
            value: mid,
            residual: f(mid),
            degenerate: true,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(DeltaStar {
        value: root,
        residual: f(root),
        degenerate: false,
    })
}
