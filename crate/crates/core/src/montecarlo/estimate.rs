//! Metric estimation over independent realizations.
//!
//! Runs are processed in fixed-size blocks; each block accumulates its runs
//! sequentially and blocks are merged in index order, so the result is
//! bit-identical for a given seed regardless of how the blocks were
//! scheduled across threads. Confidence intervals treat each run as one
//! cluster sample (ratio-estimator standard errors), which accounts for the
//! correlation of outcomes within a run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::params::NetworkParams;
use crate::report::{Estimate, MetricReport, RankStats};

use super::sir::{evaluate_sir, schedule_cluster};
use super::{sample_realization, SimConfig};

const BLOCK: u32 = 64;
const Z95: f64 = 1.959963984540054;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-stream seed for one run, decorrelated from neighbouring runs.
fn run_seed(seed: u64, run: u32) -> u64 {
    splitmix64(seed ^ (run as u64).wrapping_mul(0xA076_1D64_78BD_642F))
}

/// Pooled ratio statistic: per-run numerators and denominators with the
/// cross moments needed for a clustered standard error.
#[derive(Debug, Clone, Copy, Default)]
struct Ratio {
    s: f64,
    n: f64,
    s2: f64,
    n2: f64,
    sn: f64,
}

impl Ratio {
    fn push(&mut self, s_run: f64, n_run: f64) {
        self.s += s_run;
        self.n += n_run;
        self.s2 += s_run * s_run;
        self.n2 += n_run * n_run;
        self.sn += s_run * n_run;
    }

    fn merge(&mut self, other: &Ratio) {
        self.s += other.s;
        self.n += other.n;
        self.s2 += other.s2;
        self.n2 += other.n2;
        self.sn += other.sn;
    }

    fn estimate(&self) -> Estimate {
        if self.n <= 0.0 {
            return Estimate::with_ci(0.0, 0.0);
        }
        let p = self.s / self.n;
        let var = (self.s2 - 2.0 * p * self.sn + p * p * self.n2).max(0.0);
        Estimate::with_ci(p, Z95 * var.sqrt() / self.n)
    }
}

/// Plain per-run mean with a normal-approximation interval.
#[derive(Debug, Clone, Copy, Default)]
struct RunMean {
    sum: f64,
    sum2: f64,
    count: f64,
}

impl RunMean {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum2 += x * x;
        self.count += 1.0;
    }

    fn merge(&mut self, other: &RunMean) {
        self.sum += other.sum;
        self.sum2 += other.sum2;
        self.count += other.count;
    }

    fn estimate(&self) -> Estimate {
        if self.count <= 0.0 {
            return Estimate::with_ci(0.0, 0.0);
        }
        let mean = self.sum / self.count;
        let var = (self.sum2 / self.count - mean * mean).max(0.0);
        Estimate::with_ci(mean, Z95 * (var / self.count).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct RankAccum {
    s: [f64; 3],
    n: [f64; 3],
}

#[derive(Debug, Clone, Default)]
struct Accum {
    // pooled per (decode order, occupancy); numerator successes,
    // denominator samples
    c11: Ratio,
    c12: Ratio,
    c22: Ratio,
    // average over active channels of the channel-mean success
    channel_mean: Ratio,
    // per-count averaging conventions of the channel-aware expressions
    crs_single: Ratio,
    crs_pair1: Ratio,
    crs_pair2: Ratio,
    device_mean: Ratio,
    served: RunMean,
    power: RunMean,
    per_rank: Vec<RankAccum>,
    // channels by occupancy, pooled over runs (index u)
    occupancy: Vec<f64>,
}

impl Accum {
    fn new(n_ranks: usize, l: usize) -> Self {
        Accum {
            per_rank: vec![RankAccum::default(); n_ranks],
            occupancy: vec![0.0; l + 1],
            ..Default::default()
        }
    }

    fn merge(&mut self, o: &Accum) {
        self.c11.merge(&o.c11);
        self.c12.merge(&o.c12);
        self.c22.merge(&o.c22);
        self.channel_mean.merge(&o.channel_mean);
        self.crs_single.merge(&o.crs_single);
        self.crs_pair1.merge(&o.crs_pair1);
        self.crs_pair2.merge(&o.crs_pair2);
        self.device_mean.merge(&o.device_mean);
        self.served.merge(&o.served);
        self.power.merge(&o.power);
        for (a, b) in self.per_rank.iter_mut().zip(&o.per_rank) {
            for t in 0..3 {
                a.s[t] += b.s[t];
                a.n[t] += b.n[t];
            }
        }
        for (a, b) in self.occupancy.iter_mut().zip(&o.occupancy) {
            *a += b;
        }
    }
}

fn process_run(
    params: &NetworkParams,
    config: &SimConfig,
    run: u32,
    acc: &mut Accum,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed(config.seed, run));
    let realization = sample_realization(params, config, &mut rng);
    let l_eff = config.effective_l(params);
    let scheme = config.scheme;

    let mut assignments = Vec::with_capacity(realization.clusters.len());
    for cluster in &realization.clusters {
        let gains: Vec<f64> = cluster.devices.iter().map(|d| d.h).collect();
        assignments.push(schedule_cluster(&gains, params, scheme, l_eff, &mut rng)?);
    }
    let samples = evaluate_sir(&realization, &assignments, params, scheme);

    let k0 = realization.typical().devices.len() as u64;
    let n = params.n_channels;

    // pooled (j, u) counts
    let mut s11 = (0.0, 0.0);
    let mut s12 = (0.0, 0.0);
    let mut s22 = (0.0, 0.0);
    for sm in &samples {
        let hit = sm.success as u8 as f64;
        match (sm.decode_order, sm.occupancy) {
            (1, 1) => {
                s11.0 += hit;
                s11.1 += 1.0;
            }
            (1, 2) => {
                s12.0 += hit;
                s12.1 += 1.0;
            }
            (2, 2) => {
                s22.0 += hit;
                s22.1 += 1.0;
            }
            _ => {}
        }
    }
    acc.c11.push(s11.0, s11.1);
    acc.c12.push(s12.0, s12.1);
    acc.c22.push(s22.0, s22.1);

    // channel means over active channels
    let mut ch_hits = vec![0.0f64; n as usize];
    let mut ch_cnt = vec![0u32; n as usize];
    for sm in &samples {
        ch_hits[sm.channel as usize] += sm.success as u8 as f64;
        ch_cnt[sm.channel as usize] += 1;
    }
    let mut mean_sum = 0.0;
    let mut active = 0.0;
    for ch in 0..n as usize {
        if ch_cnt[ch] > 0 {
            mean_sum += ch_hits[ch] / ch_cnt[ch] as f64;
            active += 1.0;
        }
        let u = ch_cnt[ch] as usize;
        if u < acc.occupancy.len() {
            acc.occupancy[u] += 1.0;
        }
    }
    acc.channel_mean.push(mean_sum, active);

    // channel-aware averaging conventions
    if k0 >= 1 {
        if s11.1 > 0.0 {
            acc.crs_single.push(s11.0 / s11.1, 1.0);
        } else {
            acc.crs_single.push(0.0, 1.0);
        }
        let total = samples.len() as f64;
        let hits: f64 = samples.iter().map(|sm| sm.success as u8 as f64).sum();
        if total > 0.0 {
            acc.device_mean.push(hits / total, 1.0);
        } else {
            acc.device_mean.push(0.0, 1.0);
        }
    }
    if k0 > n as u64 && l_eff >= 2 {
        if s12.1 > 0.0 {
            acc.crs_pair1.push(s12.0 / s12.1, 1.0);
        }
        if s22.1 > 0.0 {
            acc.crs_pair2.push(s22.0 / s22.1, 1.0);
        }
    }

    // cluster totals
    let successes: f64 = samples.iter().map(|sm| sm.success as u8 as f64).sum();
    acc.served.push(successes);
    let power: f64 = samples.iter().map(|sm| sm.tx_power).sum();
    acc.power.push(power / n as f64);

    if config.record_per_rank && !acc.per_rank.is_empty() {
        for sm in &samples {
            if let Some(rank) = sm.rank {
                let idx = (rank - 1) as usize;
                if idx < acc.per_rank.len() {
                    let t = match (sm.decode_order, sm.occupancy) {
                        (1, 1) => 0,
                        (1, 2) => 1,
                        _ => 2,
                    };
                    acc.per_rank[idx].s[t] += sm.success as u8 as f64;
                    acc.per_rank[idx].n[t] += 1.0;
                }
            }
        }
    }
    Ok(())
}

/// Run the simulator and assemble the metric report. Deterministic for a
/// given (params, config) including the seed.
pub fn estimate_metrics(params: &NetworkParams, config: &SimConfig) -> Result<MetricReport> {
    params.validate()?;
    config.validate(params)?;
    let n_ranks = if config.record_per_rank && config.scheme.is_crs() {
        params.n_channels as usize
    } else {
        0
    };
    let l_eff = config.effective_l(params) as usize;

    let n_blocks = config.runs.div_ceil(BLOCK);
    let blocks: Result<Vec<Accum>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Accum::new(n_ranks, l_eff);
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(config.runs);
            for run in lo..hi {
                process_run(params, config, run, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let blocks = blocks?;
    let mut total = Accum::new(n_ranks, l_eff);
    for b in &blocks {
        total.merge(b);
    }

    let crs = config.scheme.is_crs();
    let (p11, p12, p22, overall) = if crs {
        (
            total.crs_single.estimate(),
            total.crs_pair1.estimate(),
            total.crs_pair2.estimate(),
            total.device_mean.estimate(),
        )
    } else {
        (
            total.c11.estimate(),
            total.c12.estimate(),
            total.c22.estimate(),
            total.channel_mean.estimate(),
        )
    };

    let per_rank = if n_ranks > 0 {
        Some(
            total
                .per_rank
                .iter()
                .enumerate()
                .map(|(idx, r)| {
                    let est = |t: usize| {
                        if r.n[t] > 0.0 {
                            let p = r.s[t] / r.n[t];
                            Estimate::with_ci(p, Z95 * (p * (1.0 - p) / r.n[t]).sqrt())
                        } else {
                            Estimate::with_ci(0.0, 0.0)
                        }
                    };
                    RankStats {
                        rank: idx as u32 + 1,
                        p11: est(0),
                        p12: est(1),
                        p22: est(2),
                    }
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(MetricReport {
        scheme: config.scheme,
        p11,
        p12,
        p22,
        overall,
        avg_served: total.served.estimate(),
        avg_power: total.power.estimate(),
        per_rank,
        runs: Some(config.runs),
        seed: Some(config.seed),
    })
}

/// Pooled empirical occupancy of the typical cluster's channels, for
/// validation against the closed-form law. Returns (histogram, channels).
pub fn empirical_occupancy(params: &NetworkParams, config: &SimConfig) -> Result<Vec<f64>> {
    params.validate()?;
    config.validate(params)?;
    let l_eff = config.effective_l(params) as usize;
    let n_blocks = config.runs.div_ceil(BLOCK);
    let blocks: Result<Vec<Vec<f64>>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut hist = vec![0.0; l_eff + 1];
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(config.runs);
            for run in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(run_seed(config.seed, run));
                let realization = sample_realization(params, config, &mut rng);
                let typical = realization.typical();
                let gains: Vec<f64> = typical.devices.iter().map(|d| d.h).collect();
                let asg = schedule_cluster(
                    &gains,
                    params,
                    config.scheme,
                    config.effective_l(params),
                    &mut rng,
                )?;
                for members in &asg.channels {
                    hist[members.len().min(l_eff)] += 1.0;
                }
            }
            Ok(hist)
        })
        .collect();
    let mut total = vec![0.0; l_eff + 1];
    for b in blocks? {
        for (t, v) in total.iter_mut().zip(b) {
            *t += v;
        }
    }
    let sum: f64 = total.iter().sum();
    Ok(total.into_iter().map(|v| v / sum).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occupancy::occupancy_pmf;
    use crate::scheduling::AccessScheme;

    fn quick_config(scheme: AccessScheme, runs: u32) -> SimConfig {
        SimConfig {
            runs,
            seed: 20240917,
            scheme,
            record_per_rank: scheme.is_crs(),
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let params = NetworkParams {
            m_bar: 10.0,
            n_channels: 5,
            ..Default::default()
        };
        let config = quick_config(AccessScheme::Rrs, 40);
        let a = estimate_metrics(&params, &config).unwrap();
        let b = estimate_metrics(&params, &config).unwrap();
        assert_eq!(a, b);
        let c = estimate_metrics(
            &params,
            &SimConfig {
                seed: 7,
                ..config
            },
        )
        .unwrap();
        assert_ne!(a.p11.value.to_bits(), c.p11.value.to_bits());
    }

    #[test]
    fn empirical_occupancy_matches_closed_form() {
        let params = NetworkParams {
            m_bar: 6.0,
            n_channels: 4,
            l_max: 2,
            ..Default::default()
        };
        let config = quick_config(AccessScheme::Rrs, 3000);
        let hist = empirical_occupancy(&params, &config).unwrap();
        let want = occupancy_pmf(&params).unwrap();
        let samples = 3000.0 * params.n_channels as f64;
        for u in 0..=2usize {
            let se = (want.c[u] * (1.0 - want.c[u]) / samples).sqrt();
            assert!(
                (hist[u] - want.c[u]).abs() <= 3.0 * se + 1e-9,
                "u={u}: {} vs {} (se {se})",
                hist[u],
                want.c[u]
            );
        }
    }

    #[test]
    fn oma_scheme_never_shares() {
        let params = NetworkParams {
            m_bar: 60.0,
            ..Default::default()
        };
        let config = quick_config(AccessScheme::Oma, 60);
        let r = estimate_metrics(&params, &config).unwrap();
        // no (j, u=2) samples under single occupancy
        assert_eq!(r.p12.value, 0.0);
        assert_eq!(r.p22.value, 0.0);
        assert!(r.avg_served.value <= params.n_channels as f64);
    }

    #[test]
    fn power_estimate_matches_closed_form_quickly() {
        let params = NetworkParams::default();
        let config = quick_config(AccessScheme::Oma, 400);
        let r = estimate_metrics(&params, &config).unwrap();
        let pmf = occupancy_pmf(&NetworkParams {
            l_max: 1,
            ..params.clone()
        })
        .unwrap();
        let want = crate::analytic::avg_power(&params, &pmf, crate::analytic::PowerScheme::Oma);
        assert!(
            (r.avg_power.value - want).abs() / want < 0.05,
            "{} vs {want}",
            r.avg_power.value
        );
    }
}
