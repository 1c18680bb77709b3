//! Figure-data reproduction: each figure id produces one CSV (or JSON) per
//! curve with columns (x, analytic[, simulated, ci_low, ci_high]).
//!
//! Simulated columns are produced whenever `sim.runs > 0`; set
//! `--set runs=0` for analytic-only data, or a small run count for quick
//! sweeps. Default parameters are the evaluation defaults; the transform
//! figures pin the pair-saturated occupancy like the study they reproduce.

use anyhow::Result;
use serde_json::Value;

use aggnet_core::analytic::{avg_power, LaplaceModel, LaplaceVariant, PowerScheme};
use aggnet_core::occupancy::OccupancyPmf;
use aggnet_core::report::MetricReport;
use aggnet_core::scheduling::{delta_star, AccessScheme};
use aggnet_core::{estimate_metrics, NetworkParams, SimConfig};

use crate::commands::{analytic_report, resolve_delta, LaplaceChoice};
use crate::output::{num, opt_num, Table};
use crate::scenario::Scenario;
use crate::CliError;

pub fn run_figure(id: &str, sc: &Scenario) -> Result<Vec<Table>, CliError> {
    match id {
        "2" => figure2(sc),
        "3" => figure3(sc),
        "4" => figure4(sc),
        "5" => figure5(sc),
        "6a" => figure6(sc, Metric::Overall),
        "6b" => figure6(sc, Metric::Served),
        "7a" => figure7a(sc),
        "7b" => figure7b(sc),
        other => Err(CliError::Usage(format!(
            "unknown figure id '{other}' (expected 2, 3, 4, 5, 6a, 6b, 7a or 7b)"
        ))),
    }
}

fn s_grid(sc: &Scenario) -> Vec<f64> {
    let lo = sc.figure.s_db_min.unwrap_or(-20.0);
    let hi = sc.figure.s_db_max.unwrap_or(20.0);
    let points = sc.figure.s_points.unwrap_or(41).max(2);
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn pair_saturated() -> OccupancyPmf {
    OccupancyPmf {
        c: vec![0.0, 0.0, 1.0],
        c_bar: 2.0,
    }
}

/// Transform comparison vs s: bounds, weighted form and (optionally) the
/// exact nested quadrature, with the pair-saturated occupancy.
fn figure2(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let include_exact = sc.figure.include_exact.unwrap_or(true);
    let grid = s_grid(sc);
    let mut curves = vec![
        ("figure2_lower", LaplaceVariant::RrsLower),
        ("figure2_upper", LaplaceVariant::RrsUpper),
        ("figure2_weighted", LaplaceVariant::RrsWeighted),
    ];
    if include_exact {
        curves.push(("figure2_exact", LaplaceVariant::RrsExact));
    }
    let mut tables = Vec::new();
    for (name, variant) in curves {
        let model = LaplaceModel::with_pmf(variant, &sc.params, pair_saturated());
        let mut t = Table::new(name, &format!("{} c=[0,0,1]", sc.describe()), &["s_db", "analytic"]);
        for &s_db in &grid {
            let s = 10f64.powf(s_db / 10.0);
            t.push(vec![num(s_db), num(model.laplace_rrs(s).map_err(CliError::num)?)]);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Marked-transform comparison vs s at the scenario budget: the weighted
/// two-term form, plus the slow fixed-marks reference when enabled.
fn figure3(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let delta = resolve_delta(sc, false)?;
    let grid = s_grid(sc);
    let mut tables = Vec::new();
    let weighted = LaplaceModel::with_pmf(LaplaceVariant::CrsWeighted, &sc.params, pair_saturated());
    let mut t = Table::new(
        "figure3_weighted",
        &format!("{} c=[0,0,1] delta={delta}", sc.describe()),
        &["s_db", "analytic"],
    );
    for &s_db in &grid {
        let s = 10f64.powf(s_db / 10.0);
        t.push(vec![num(s_db), num(weighted.laplace_crs(s, delta).map_err(CliError::num)?)]);
    }
    tables.push(t);
    if sc.figure.reference.unwrap_or(false) {
        let exact = LaplaceModel::with_pmf(
            LaplaceVariant::CrsExactFixedMarks { a_frac: 0.5 },
            &sc.params,
            pair_saturated(),
        );
        let mut t = Table::new(
            "figure3_exact_ref",
            &format!("{} c=[0,0,1] delta={delta} a_frac=0.5", sc.describe()),
            &["s_db", "analytic"],
        );
        for &s_db in &grid {
            let s = 10f64.powf(s_db / 10.0);
            t.push(vec![num(s_db), num(exact.laplace_crs(s, delta).map_err(CliError::num)?)]);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Average transmit power per channel as a function of the pair fraction
/// c2, with no idle channels (c0 = 0).
fn figure4(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let points = sc.figure.c2_points.unwrap_or(21).max(2);
    let mut oma = Table::new("figure4_oma", &sc.describe(), &["c2", "analytic"]);
    let mut rrs = Table::new("figure4_rrs", &sc.describe(), &["c2", "analytic"]);
    let mut crs_star = Table::new("figure4_crs_delta_star", &sc.describe(), &["c2", "analytic"]);
    let mut crs_fixed = Table::new(
        "figure4_crs_fixed_delta",
        &format!("{} delta={}", sc.describe(), sc.params.delta),
        &["c2", "analytic"],
    );
    for i in 0..points {
        let c2 = i as f64 / (points - 1) as f64;
        let pmf = OccupancyPmf {
            c: vec![0.0, 1.0 - c2, c2],
            c_bar: 1.0 + c2,
        };
        oma.push(vec![num(c2), num(avg_power(&sc.params, &pmf, PowerScheme::Oma))]);
        rrs.push(vec![
            num(c2),
            num(avg_power(&sc.params, &pmf, PowerScheme::Hybrid { delta: 2.0 })),
        ]);
        crs_fixed.push(vec![
            num(c2),
            num(avg_power(
                &sc.params,
                &pmf,
                PowerScheme::Hybrid { delta: sc.params.delta },
            )),
        ]);
        let dstar = if c2 > 0.0 {
            delta_star(&sc.params, sc.params.theta, c2)
                .map_err(CliError::num)?
                .value
        } else {
            1.0
        };
        crs_star.push(vec![
            num(c2),
            num(avg_power(&sc.params, &pmf, PowerScheme::Hybrid { delta: dstar })),
        ]);
    }
    Ok(vec![oma, rrs, crs_star, crs_fixed])
}

fn n_values(sc: &Scenario) -> Vec<u32> {
    sc.figure
        .n_values
        .clone()
        .unwrap_or_else(|| vec![10, 15, 20, 25, 30, 35, 40, 45, 50])
}

fn simulate_if_enabled(
    sc: &Scenario,
    params: &NetworkParams,
    scheme: AccessScheme,
    l_max: u32,
) -> Result<Option<MetricReport>, CliError> {
    if sc.sim.runs == 0 {
        return Ok(None);
    }
    let mut p = params.clone();
    p.l_max = l_max;
    let config = SimConfig {
        scheme,
        record_per_rank: false,
        ..sc.sim
    };
    Ok(Some(estimate_metrics(&p, &config).map_err(CliError::num)?))
}

#[derive(Clone)]
struct CurveRow {
    x: f64,
    analytic: f64,
    simulated: Option<(f64, Option<f64>, Option<f64>)>,
}

fn curve_table(name: &str, comment: &str, x_name: &str, rows: Vec<CurveRow>) -> Table {
    let mut t = Table::new(
        name,
        comment,
        &[x_name, "analytic", "simulated", "ci_low", "ci_high"],
    );
    for r in rows {
        let (s, lo, hi) = match r.simulated {
            Some((v, lo, hi)) => (num(v), opt_num(lo), opt_num(hi)),
            None => (Value::Null, Value::Null, Value::Null),
        };
        t.push(vec![num(r.x), num(r.analytic), s, lo, hi]);
    }
    t
}

/// Success of the devices sharing a channel, per decode order, vs the
/// number of channels: random scheduling against both pair policies.
fn figure5(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let schemes = [
        (AccessScheme::Rrs, "rrs"),
        (AccessScheme::CrsFixed, "crs_fixed"),
        (AccessScheme::CrsTheorem4, "crs_theorem4"),
    ];
    let mut rows: Vec<Vec<CurveRow>> = vec![Vec::new(); schemes.len() * 2];
    for &n in &n_values(sc) {
        let mut point = sc.clone();
        point.params.n_channels = n;
        let delta = resolve_delta(&point, true)?;
        for (si, (scheme, _)) in schemes.iter().enumerate() {
            let a = analytic_report(&point.params, *scheme, delta, LaplaceChoice::Exact)?;
            let mut params = point.params.clone();
            params.delta = delta;
            let sim = simulate_if_enabled(&point, &params, *scheme, params.l_max)?;
            let pick = |f: fn(&MetricReport) -> aggnet_core::report::Estimate,
                        sim: &Option<MetricReport>| {
                sim.as_ref().map(|r| {
                    let e = f(r);
                    (e.value, e.ci_low, e.ci_high)
                })
            };
            rows[2 * si].push(CurveRow {
                x: n as f64,
                analytic: a.p12.value,
                simulated: pick(|r| r.p12, &sim),
            });
            rows[2 * si + 1].push(CurveRow {
                x: n as f64,
                analytic: a.p22.value,
                simulated: pick(|r| r.p22, &sim),
            });
        }
    }
    let mut tables = Vec::new();
    for (si, (_, label)) in schemes.iter().enumerate() {
        for (off, comp) in [(0usize, "p12"), (1, "p22")] {
            tables.push(curve_table(
                &format!("figure5_{label}_{comp}"),
                &sc.describe(),
                "n_channels",
                std::mem::take(&mut rows[2 * si + off]),
            ));
        }
    }
    Ok(tables)
}

enum Metric {
    Overall,
    Served,
}

/// Overall success (6a) or served devices (6b) vs the number of channels
/// for single- and pair-occupancy variants of both schedulers.
fn figure6(sc: &Scenario, metric: Metric) -> Result<Vec<Table>, CliError> {
    let (fig, col): (&str, fn(&MetricReport) -> f64) = match metric {
        Metric::Overall => ("figure6a", |r| r.overall.value),
        Metric::Served => ("figure6b", |r| r.avg_served.value),
    };
    let sim_col = |r: &MetricReport| -> (f64, Option<f64>, Option<f64>) {
        let e = match metric {
            Metric::Overall => r.overall,
            Metric::Served => r.avg_served,
        };
        (e.value, e.ci_low, e.ci_high)
    };
    // (curve name, scheme, l_max)
    let curves: [(&str, AccessScheme, u32); 5] = [
        ("oma_rrs", AccessScheme::Oma, 1),
        ("oma_crs", AccessScheme::CrsFixed, 1),
        ("rrs", AccessScheme::Rrs, 2),
        ("crs_fixed", AccessScheme::CrsFixed, 2),
        ("crs_theorem4", AccessScheme::CrsTheorem4, 2),
    ];
    let mut rows: Vec<Vec<CurveRow>> = vec![Vec::new(); curves.len()];
    for &n in &n_values(sc) {
        let mut point = sc.clone();
        point.params.n_channels = n;
        let delta = resolve_delta(&point, true)?;
        for (ci, (_, scheme, l)) in curves.iter().enumerate() {
            let mut params = point.params.clone();
            params.l_max = *l;
            params.delta = delta;
            let a = analytic_report(&params, *scheme, delta, LaplaceChoice::Exact)?;
            let sim = simulate_if_enabled(&point, &params, *scheme, *l)?;
            rows[ci].push(CurveRow {
                x: n as f64,
                analytic: col(&a),
                simulated: sim.as_ref().map(sim_col),
            });
        }
    }
    let mut tables = Vec::new();
    for (ci, (label, _, _)) in curves.iter().enumerate() {
        tables.push(curve_table(
            &format!("{fig}_{label}"),
            &sc.describe(),
            "n_channels",
            std::mem::take(&mut rows[ci]),
        ));
    }
    Ok(tables)
}

/// Served devices vs aggregator density for the equal-split pair policy and
/// its single-occupancy counterpart, at two cancellation residues.
fn figure7a(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let lambdas = sc
        .figure
        .lambda_log10_values
        .clone()
        .unwrap_or_else(|| vec![-4.6, -4.5, -4.4, -4.3, -4.2, -4.1, -4.0, -3.9]);
    let mus = sc.figure.mu_values.clone().unwrap_or_else(|| vec![0.0, 0.1]);
    let mut tables = Vec::new();
    for &mu in &mus {
        for (label, scheme, l) in [
            ("crs_l1", AccessScheme::CrsFixed, 1u32),
            ("crs_fixed", AccessScheme::CrsFixed, 2),
        ] {
            let mut rows = Vec::new();
            for &ll in &lambdas {
                let mut point = sc.clone();
                point.params.lambda_a = 10f64.powf(ll);
                point.params.mu = mu;
                let delta = resolve_delta(&point, true)?;
                let mut params = point.params.clone();
                params.l_max = l;
                params.delta = delta;
                let a = analytic_report(&params, scheme, delta, LaplaceChoice::Exact)?;
                let sim = simulate_if_enabled(&point, &params, scheme, l)?;
                rows.push(CurveRow {
                    x: ll,
                    analytic: a.avg_served.value,
                    simulated: sim.as_ref().map(|r| {
                        (r.avg_served.value, r.avg_served.ci_low, r.avg_served.ci_high)
                    }),
                });
            }
            tables.push(curve_table(
                &format!("figure7a_{label}_mu{}", (mu * 100.0).round() as u32),
                &sc.describe(),
                "lambda_a_log10",
                rows,
            ));
        }
    }
    Ok(tables)
}

/// Served devices vs the cancellation residue mu.
fn figure7b(sc: &Scenario) -> Result<Vec<Table>, CliError> {
    let mus = sc
        .figure
        .mu_values
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2]);
    let curves: [(&str, AccessScheme, u32); 4] = [
        ("oma_crs", AccessScheme::CrsFixed, 1),
        ("rrs", AccessScheme::Rrs, 2),
        ("crs_fixed", AccessScheme::CrsFixed, 2),
        ("crs_theorem4", AccessScheme::CrsTheorem4, 2),
    ];
    let mut rows: Vec<Vec<CurveRow>> = vec![Vec::new(); curves.len()];
    for &mu in &mus {
        let mut point = sc.clone();
        point.params.mu = mu;
        let delta = resolve_delta(&point, true)?;
        for (ci, (_, scheme, l)) in curves.iter().enumerate() {
            let mut params = point.params.clone();
            params.l_max = *l;
            params.delta = delta;
            let a = analytic_report(&params, *scheme, delta, LaplaceChoice::Exact)?;
            let sim = simulate_if_enabled(&point, &params, *scheme, *l)?;
            rows[ci].push(CurveRow {
                x: mu,
                analytic: a.avg_served.value,
                simulated: sim.as_ref().map(|r| {
                    (r.avg_served.value, r.avg_served.ci_low, r.avg_served.ci_high)
                }),
            });
        }
    }
    let mut tables = Vec::new();
    for (ci, (label, _, _)) in curves.iter().enumerate() {
        tables.push(curve_table(
            &format!("figure7b_{label}"),
            &sc.describe(),
            "mu",
            std::mem::take(&mut rows[ci]),
        ));
    }
    Ok(tables)
}
