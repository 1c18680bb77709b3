//! Matern-cluster network sampling.

use rand::Rng;

use crate::params::NetworkParams;

use super::SimConfig;

/// One device: offset from its aggregator, own-link fading `h`, and the
/// cross fading `g` of its link towards the typical aggregator.
#[derive(Debug, Clone, Copy)]
pub struct Device {
    pub offset_r: f64,
    pub offset_angle: f64,
    pub h: f64,
    pub g: f64,
}

impl Device {
    /// Distance of the device to the window origin, given its cluster
    /// position.
    pub fn distance_to_origin(&self, cluster_pos: [f64; 2]) -> f64 {
        let x = cluster_pos[0] + self.offset_r * self.offset_angle.cos();
        let y = cluster_pos[1] + self.offset_r * self.offset_angle.sin();
        x.hypot(y)
    }
}

/// An aggregator with the devices requesting service from it.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub pos: [f64; 2],
    pub devices: Vec<Device>,
}

/// One network realization. The typical cluster sits at the window center
/// and is always `clusters[0]`.
#[derive(Debug, Clone)]
pub struct Realization {
    pub clusters: Vec<Cluster>,
    pub window_side: f64,
}

impl Realization {
    pub fn typical(&self) -> &Cluster {
        &self.clusters[0]
    }
}

/// Unit-mean exponential draw.
pub(crate) fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln()
}

/// Poisson draw by exponential inter-arrival counting (stable for the
/// means used here; the window count mean is a few hundred).
pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut acc = 0.0;
    let mut count = 0u64;
    loop {
        acc += exp1(rng);
        if acc >= mean {
            return count;
        }
        count += 1;
        if count > 100_000 {
            return count;
        }
    }
}

fn sample_devices<R: Rng + ?Sized>(params: &NetworkParams, rng: &mut R) -> Vec<Device> {
    let k = poisson(params.m_bar, rng);
    (0..k)
        .map(|_| {
            let u: f64 = rng.gen();
            Device {
                offset_r: params.r_a * u.sqrt(),
                offset_angle: rng.gen::<f64>() * 2.0 * std::f64::consts::PI,
                h: exp1(rng),
                g: exp1(rng),
            }
        })
        .collect()
}

/// Draw a network: the typical aggregator at the origin plus a Poisson
/// number of aggregators uniform in the square window, each with its own
/// Poisson device cloud uniform in the disc of radius R_a.
pub fn sample_realization<R: Rng + ?Sized>(
    params: &NetworkParams,
    config: &SimConfig,
    rng: &mut R,
) -> Realization {
    let side = config.window_side(params);
    let half = side / 2.0;
    let n_other = poisson(params.lambda_a * side * side, rng);
    let mut clusters = Vec::with_capacity(n_other as usize + 1);
    clusters.push(Cluster {
        pos: [0.0, 0.0],
        devices: sample_devices(params, rng),
    });
    for _ in 0..n_other {
        let pos = [
            rng.gen::<f64>() * side - half,
            rng.gen::<f64>() * side - half,
        ];
        clusters.push(Cluster {
            pos,
            devices: sample_devices(params, rng),
        });
    }
    Realization {
        clusters,
        window_side: side,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn aggregator_count_has_requested_mean() {
        let params = NetworkParams::default();
        let config = SimConfig {
            runs: 1,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 400;
        let mut total = 0u64;
        for _ in 0..draws {
            total += sample_realization(&params, &config, &mut rng).clusters.len() as u64 - 1;
        }
        let mean = total as f64 / draws as f64;
        // 3 sigma band around 400 with sigma = sqrt(400/draws) = 1
        assert!((mean - 400.0).abs() < 3.0, "mean aggregators {mean}");
    }

    #[test]
    fn no_devices_without_demand() {
        let params = NetworkParams {
            m_bar: 0.0,
            ..Default::default()
        };
        let config = SimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = sample_realization(&params, &config, &mut rng);
        assert!(r.clusters.iter().all(|c| c.devices.is_empty()));
    }

    #[test]
    fn offsets_follow_the_disc_law() {
        // Kolmogorov-Smirnov against F(r) = (r/R)^2 at the 1% level
        let params = NetworkParams::default();
        let config = SimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut radii: Vec<f64> = Vec::new();
        while radii.len() < 20_000 {
            let r = sample_realization(&params, &config, &mut rng);
            radii.extend(r.typical().devices.iter().map(|d| d.offset_r));
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = radii.len() as f64;
        let mut d_stat = 0.0f64;
        for (idx, r) in radii.iter().enumerate() {
            let f = (r / params.r_a).powi(2);
            let emp_hi = (idx + 1) as f64 / n;
            let emp_lo = idx as f64 / n;
            d_stat = d_stat.max((f - emp_lo).abs()).max((emp_hi - f).abs());
        }
        // critical value at the 1% level: 1.63 / sqrt(n)
        assert!(
            d_stat < 1.63 / n.sqrt(),
            "KS statistic {d_stat} exceeds the 1% critical value"
        );
        assert!(radii.iter().all(|&r| r <= params.r_a));
    }

    #[test]
    fn deterministic_given_seed() {
        let params = NetworkParams::default();
        let config = SimConfig::default();
        let a = sample_realization(&params, &config, &mut ChaCha8Rng::seed_from_u64(5));
        let b = sample_realization(&params, &config, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.clusters.len(), b.clusters.len());
        for (ca, cb) in a.clusters.iter().zip(&b.clusters) {
            assert_eq!(ca.pos, cb.pos);
            assert_eq!(ca.devices.len(), cb.devices.len());
            for (da, db) in ca.devices.iter().zip(&cb.devices) {
                assert_eq!(da.h.to_bits(), db.h.to_bits());
                assert_eq!(da.g.to_bits(), db.g.to_bits());
            }
        }
    }
}
