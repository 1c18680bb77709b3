//! Laplace transform of the inter-cluster interference seen at the typical
//! aggregator: exact nested quadrature over the cluster geometry, closed-form
//! upper/lower bounds, their weighted combination, and the marked-process
//! variants for channel-aware scheduling.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::occupancy::{occupancy_pmf, OccupancyPmf};
use crate::params::NetworkParams;
use crate::specfun::quad::{integrate_2d_polar, integrate_semi_infinite, QuadratureSpec};

/// chi = 1/2 lambda_a pi R_a^2 Gamma(1 + 2/alpha) Gamma(1 - 2/alpha),
/// evaluated through the reflection identity Gamma(1+x)Gamma(1-x) =
/// pi x / sin(pi x), exact for x in (0, 1).
pub fn chi_constant(params: &NetworkParams) -> f64 {
    let x = 2.0 / params.alpha;
    let refl = std::f64::consts::PI * x / (std::f64::consts::PI * x).sin();
    0.5 * params.lambda_a * std::f64::consts::PI * params.r_a * params.r_a * refl
}

/// Which evaluation path the model uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LaplaceVariant {
    /// Nested quadrature over the exact cluster-process functional.
    RrsExact,
    /// Almost-sure upper bound (shifted reference process).
    RrsUpper,
    /// Lower bound (density-matched reference process).
    RrsLower,
    /// beta0 * upper + beta1 * lower.
    RrsWeighted,
    /// Weighted two-term form for power-split pairs sharing a budget delta.
    CrsWeighted,
    /// Exact marked-process functional with a point-mass mark at
    /// a = a_frac * delta. Slow reference oracle only.
    CrsExactFixedMarks { a_frac: f64 },
}

/// Interference-transform evaluator: the variant selector, the network
/// parameters, the occupancy distribution and the constant chi.
#[derive(Debug, Clone)]
pub struct LaplaceModel {
    pub variant: LaplaceVariant,
    pub chi: f64,
    pub params: NetworkParams,
    pub pmf: OccupancyPmf,
    pub spec: QuadratureSpec,
}

impl LaplaceModel {
    pub fn new(variant: LaplaceVariant, params: &NetworkParams) -> Result<Self> {
        let pmf = occupancy_pmf(params)?;
        Ok(Self::with_pmf(variant, params, pmf))
    }

    /// Build with an explicit occupancy vector (used by the figure setups
    /// that pin c_u directly).
    pub fn with_pmf(variant: LaplaceVariant, params: &NetworkParams, pmf: OccupancyPmf) -> Self {
        LaplaceModel {
            variant,
            chi: chi_constant(params),
            params: params.clone(),
            pmf,
            spec: QuadratureSpec::two_dim(),
        }
    }

    /// Transform of the unmarked interference (random scheduling), per the
    /// model's variant.
    pub fn laplace_rrs(&self, s: f64) -> Result<f64> {
        if s.is_nan() || s < 0.0 {
            return Err(CoreError::domain(
                "laplace_rrs",
                format!("transform argument must be non-negative, got {s}"),
            ));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        match self.variant {
            LaplaceVariant::RrsExact => {
                let expo = rrs_exact_exponent(&self.params, &self.pmf, s, &self.spec)?;
                Ok(expo.exp())
            }
            LaplaceVariant::RrsUpper => Ok(self.upper(s)),
            LaplaceVariant::RrsLower => Ok(self.lower(s)),
            LaplaceVariant::RrsWeighted => {
                Ok(self.params.beta0 * self.upper(s) + self.params.beta1 * self.lower(s))
            }
            other => Err(CoreError::domain(
                "laplace_rrs",
                format!("variant {other:?} is not an unmarked-interference path"),
            )),
        }
    }

    fn upper(&self, s: f64) -> f64 {
        let x = 2.0 / self.params.alpha;
        let sum: f64 = self
            .pmf
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(u, cu)| cu * (u as f64).powf(x))
            .sum();
        (-self.chi * s.powf(x) * sum).exp()
    }

    fn lower(&self, s: f64) -> f64 {
        let x = 2.0 / self.params.alpha;
        (-self.chi * self.pmf.c_bar * s.powf(x)).exp()
    }

    /// Transform of the marked interference under a shared budget `delta`.
    /// The weighted variant is the production path; the fixed-marks exact
    /// variant is a slow reference.
    pub fn laplace_crs(&self, s: f64, delta: f64) -> Result<f64> {
        if s.is_nan() || s < 0.0 {
            return Err(CoreError::domain(
                "laplace_crs",
                format!("transform argument must be non-negative, got {s}"),
            ));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(CoreError::domain(
                "laplace_crs",
                format!("budget must be positive, got {delta}"),
            ));
        }
        if self.pmf.l_max() > 2 {
            return Err(CoreError::domain(
                "laplace_crs",
                format!("pair analysis requires L <= 2, got L={}", self.pmf.l_max()),
            ));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let c1 = self.pmf.c.get(1).copied().unwrap_or(0.0);
        let c2 = self.pmf.c.get(2).copied().unwrap_or(0.0);
        match self.variant {
            LaplaceVariant::CrsWeighted => {
                Ok(crs_weighted(self.chi, c1, c2, delta, self.params.alpha, s)
                    .weighted(self.params.beta0, self.params.beta1))
            }
            LaplaceVariant::CrsExactFixedMarks { a_frac } => {
                if !(a_frac > 0.0 && a_frac < 1.0) {
                    return Err(CoreError::domain(
                        "laplace_crs",
                        format!("mark fraction must lie in (0,1), got {a_frac}"),
                    ));
                }
                let expo = crs_exact_exponent(
                    &self.params,
                    c1,
                    c2,
                    s,
                    a_frac * delta,
                    delta,
                    &self.spec,
                )?;
                Ok(expo.exp())
            }
            other => Err(CoreError::domain(
                "laplace_crs",
                format!("variant {other:?} is not a marked-interference path"),
            )),
        }
    }
}

/// The two exponential terms of the weighted pair transform.
pub(crate) struct CrsTerms {
    pub t1: f64,
    pub t2: f64,
}

impl CrsTerms {
    pub fn weighted(&self, beta0: f64, beta1: f64) -> f64 {
        beta0 * self.t1 + beta1 * self.t2
    }
}

pub(crate) fn crs_weighted(chi: f64, c1: f64, c2: f64, delta: f64, alpha: f64, s: f64) -> CrsTerms {
    let x = 2.0 / alpha;
    let sx = s.powf(x);
    let term = |t: f64| (-chi * (c1 + c2 * t.powf((alpha - 2.0) / alpha) * delta.powf(x)) * sx).exp();
    CrsTerms {
        t1: term(1.0),
        t2: term(2.0),
    }
}

/// Disc-averaged Laplace kernel deficit 1 - Upsilon(r_w, s): the normalized
/// integral of t/(1+t) with t = s r_a^alpha d^-alpha over the interfering
/// cluster's disc. Evaluating the deficit instead of Upsilon itself keeps
/// the far-field tail (Upsilon -> 1) free of cancellation.
pub fn upsilon_deficit(
    r_w: f64,
    s: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha;
    let ra_max = params.r_a;
    let raw = integrate_2d_polar(
        |ra, w| {
            // d^2 in a form that stays non-negative when the node sits on
            // the interfering device (r_w = ra, w = pi)
            let d2 = (r_w - ra) * (r_w - ra) + 2.0 * r_w * ra * (1.0 + w.cos());
            let t = s * ra.powf(alpha) * d2.powf(-0.5 * alpha);
            if t.is_finite() {
                ra * t / (1.0 + t)
            } else {
                ra
            }
        },
        ra_max,
        spec,
    )?;
    Ok(raw / (std::f64::consts::PI * ra_max * ra_max))
}

/// Disc-averaged Laplace kernel Upsilon(r_w, s) in (0, 1].
pub fn upsilon(r_w: f64, s: f64, params: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    Ok(1.0 - upsilon_deficit(r_w, s, params, spec)?)
}

/// Exponent of the exact unmarked transform:
/// 2 pi lambda_a int_0^inf r_w (sum_u c_u Upsilon^u - 1) dr_w,
/// evaluated through the deficit identity
/// sum_u c_u (Upsilon^u - 1) = -D sum_u c_u sum_{j<u} Upsilon^j.
pub fn rrs_exact_exponent(
    params: &NetworkParams,
    pmf: &OccupancyPmf,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let scale = params.r_a;
    let c = &pmf.c;
    let integrand = |t: f64| -> f64 {
        let r_w = scale * t;
        let d = match upsilon_deficit(r_w, s, params, spec) {
            Ok(v) => v,
            Err(e) => e.best_estimate().unwrap_or(f64::NAN),
        };
        let ups = 1.0 - d;
        let mut geo = 0.0;
        let mut pow = 1.0;
        let mut fac = 0.0;
        for cu in c.iter().skip(1) {
            geo += pow;
            fac += cu * geo;
            pow *= ups;
        }
        -r_w * d * fac
    };
    let outer_spec = QuadratureSpec {
        relative_tolerance: (spec.relative_tolerance * 10.0).min(1e-6),
        ..*spec
    };
    let val = integrate_semi_infinite(integrand, &outer_spec)?;
    // the integrand already carries r_w = scale * t; only dr_w = scale dt remains
    Ok(2.0 * std::f64::consts::PI * params.lambda_a * scale * val)
}

/// Exponent of the exact marked transform with a fixed mark pair (a, b),
/// b = delta - a:
/// 2 pi lambda_a int r_w (c1 (U(s)-1) + c2 (U(a s) U(b s) - 1)) dr_w,
/// with U(a s) U(b s) - 1 = -(Da + Db - Da Db).
pub fn crs_exact_exponent(
    params: &NetworkParams,
    c1: f64,
    c2: f64,
    s: f64,
    a: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let scale = params.r_a;
    let b = delta - a;
    let integrand = |t: f64| -> f64 {
        let r_w = scale * t;
        let get = |arg: f64| match upsilon_deficit(r_w, arg, params, spec) {
            Ok(v) => v,
            Err(e) => e.best_estimate().unwrap_or(f64::NAN),
        };
        let d1 = get(s);
        let da = get(a * s);
        let db = get(b * s);
        -r_w * (c1 * d1 + c2 * (da + db - da * db))
    };
    let outer_spec = QuadratureSpec {
        relative_tolerance: (spec.relative_tolerance * 10.0).min(1e-6),
        ..*spec
    };
    let val = integrate_semi_infinite(integrand, &outer_spec)?;
    // the integrand already carries r_w = scale * t; only dr_w = scale dt remains
    Ok(2.0 * std::f64::consts::PI * params.lambda_a * scale * val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c2_only(params: &NetworkParams) -> OccupancyPmf {
        let _ = params;
        OccupancyPmf {
            c: vec![0.0, 0.0, 1.0],
            c_bar: 2.0,
        }
    }

    fn single_only() -> OccupancyPmf {
        OccupancyPmf {
            c: vec![0.0, 1.0, 0.0],
            c_bar: 1.0,
        }
    }

    #[test]
    fn chi_matches_frozen_values() {
        let mut p = NetworkParams::default();
        assert_relative_eq!(chi_constant(&p), 0.17732328503629244, max_relative = 1e-13);
        p.alpha = 3.0;
        assert_relative_eq!(chi_constant(&p), 0.24197351966381975, max_relative = 1e-13);
        p.alpha = 5.0;
        assert_relative_eq!(chi_constant(&p), 0.132203635524201, max_relative = 1e-13);
    }

    #[test]
    fn upsilon_midpoint_oracle() {
        // tensor midpoint oracle (2000 x 2000 and 4000 x 4000 agree to 5e-9):
        // Upsilon(100, 1) = 0.98147821837 at R_a = 40, alpha = 3.6
        let params = NetworkParams::default();
        let spec = QuadratureSpec::two_dim();
        let got = upsilon(100.0, 1.0, &params, &spec).unwrap();
        assert!((got - 0.9814782168659953).abs() < 1e-8, "{got}");
        assert!(got > 0.0 && got < 1.0);
    }

    #[test]
    fn upsilon_at_zero_argument_is_one() {
        let params = NetworkParams::default();
        let spec = QuadratureSpec::two_dim();
        assert_eq!(upsilon(100.0, 0.0, &params, &spec).unwrap(), 1.0);
    }

    #[test]
    fn upsilon_monotone_in_s() {
        let params = NetworkParams::default();
        let spec = QuadratureSpec::two_dim();
        let mut prev = 1.0;
        for &s in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let v = upsilon(60.0, s, &params, &spec).unwrap();
            assert!(v < prev && v > 0.0, "s={s}: {v} vs {prev}");
            prev = v;
        }
    }

    #[test]
    fn exact_single_occupant_matches_reference_process() {
        // c1 = 1 collapses the cluster functional onto the homogeneous
        // reference: exponent = -chi s^(2/alpha)
        let params = NetworkParams::default();
        let spec = QuadratureSpec::two_dim();
        for &s in &[0.5, 1.0, 10.0] {
            let e = rrs_exact_exponent(&params, &single_only(), s, &spec).unwrap();
            let closed = -chi_constant(&params) * s.powf(2.0 / params.alpha);
            assert_relative_eq!(e, closed, max_relative = 2e-6);
        }
    }

    #[test]
    fn exact_exponent_frozen_values() {
        // frozen from an independent high-resolution tensor-grid evaluation
        let params = NetworkParams::default();
        let spec = QuadratureSpec::two_dim();
        let cases = [
            (0.01, -0.026903450758),
            (0.1, -0.093848426253),
            (1.0, -0.318487953877),
        ];
        for (s, want) in cases {
            let got = rrs_exact_exponent(&params, &c2_only(&params), s, &spec).unwrap();
            assert_relative_eq!(got, want, max_relative = 2e-6);
        }
    }

    #[test]
    fn transform_is_one_at_zero() {
        let params = NetworkParams::default();
        for variant in [
            LaplaceVariant::RrsExact,
            LaplaceVariant::RrsUpper,
            LaplaceVariant::RrsLower,
            LaplaceVariant::RrsWeighted,
        ] {
            let m = LaplaceModel::new(variant, &params).unwrap();
            assert_eq!(m.laplace_rrs(0.0).unwrap(), 1.0);
        }
        let m = LaplaceModel::new(LaplaceVariant::CrsWeighted, &params).unwrap();
        assert_eq!(m.laplace_crs(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn bounds_coincide_for_single_occupants() {
        let params = NetworkParams::default();
        let pmf = single_only();
        let mk = |v| LaplaceModel::with_pmf(v, &params, pmf.clone());
        for &s in &[0.3, 1.0, 5.0] {
            let up = mk(LaplaceVariant::RrsUpper).laplace_rrs(s).unwrap();
            let lo = mk(LaplaceVariant::RrsLower).laplace_rrs(s).unwrap();
            let ex = mk(LaplaceVariant::RrsExact).laplace_rrs(s).unwrap();
            assert_relative_eq!(up, lo, max_relative = 1e-14);
            assert_relative_eq!(ex, up, max_relative = 1e-5);
        }
    }

    #[test]
    fn bound_ordering_with_pairs() {
        let params = NetworkParams::default();
        let pmf = c2_only(&params);
        let mk = |v| LaplaceModel::with_pmf(v, &params, pmf.clone());
        for &s in &[0.01, 0.1, 1.0] {
            let up = mk(LaplaceVariant::RrsUpper).laplace_rrs(s).unwrap();
            let lo = mk(LaplaceVariant::RrsLower).laplace_rrs(s).unwrap();
            let ex = mk(LaplaceVariant::RrsExact).laplace_rrs(s).unwrap();
            let w = mk(LaplaceVariant::RrsWeighted).laplace_rrs(s).unwrap();
            assert!(lo <= ex && ex <= up, "s={s}: {lo} {ex} {up}");
            assert!((w - ex).abs() / ex < 0.05, "s={s}: weighted {w} vs exact {ex}");
        }
    }

    #[test]
    fn crs_weighted_at_budget_two_equals_rrs_weighted() {
        let params = NetworkParams::default();
        let rrs = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let crs = LaplaceModel::new(LaplaceVariant::CrsWeighted, &params).unwrap();
        for i in 0..41 {
            let s_db = -20.0 + i as f64;
            let s = 10f64.powf(s_db / 10.0);
            let a = rrs.laplace_rrs(s).unwrap();
            let b = crs.laplace_crs(s, 2.0).unwrap();
            assert!((a - b).abs() < 1e-12, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn crs_exact_fixed_marks_close_to_weighted() {
        // frozen oracle: exact marked functional at a = b = 0.5, s = 1,
        // default occupancy = 0.8053116842; weighted form within 5%
        let params = NetworkParams::default();
        let exact_model = LaplaceModel::new(
            LaplaceVariant::CrsExactFixedMarks { a_frac: 0.5 },
            &params,
        )
        .unwrap();
        let ex = exact_model.laplace_crs(1.0, 1.0).unwrap();
        assert!((ex - 0.8053116842).abs() < 2e-5, "{ex}");
        let w = LaplaceModel::new(LaplaceVariant::CrsWeighted, &params)
            .unwrap()
            .laplace_crs(1.0, 1.0)
            .unwrap();
        assert!((w - ex).abs() / ex < 0.05);
    }

    #[test]
    fn crs_c2_zero_terms_coincide() {
        let params = NetworkParams::default();
        let pmf = single_only();
        let m = LaplaceModel::with_pmf(LaplaceVariant::CrsWeighted, &params, pmf);
        let x = 2.0 / params.alpha;
        let want = (-chi_constant(&params) * 1.0 * 1f64.powf(x)).exp();
        let got = m.laplace_crs(1.0, 0.7).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn laplace_monotone_in_s() {
        let params = NetworkParams::default();
        let m = LaplaceModel::new(LaplaceVariant::RrsWeighted, &params).unwrap();
        let mut prev = 1.0;
        for i in 0..30 {
            let s = 10f64.powf(-2.0 + i as f64 * 0.2);
            let v = m.laplace_rrs(s).unwrap();
            assert!(v <= prev && v > 0.0 && v <= 1.0);
            prev = v;
        }
    }
}
