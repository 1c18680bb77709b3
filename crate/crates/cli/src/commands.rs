//! Subcommand implementations: analytic tables, the coexistence budget,
//! occupancy output and simulation runs.

use anyhow::Result;
use serde_json::Value;

use aggnet_core::analytic::{
    avg_power, expected_scheduled_single, rrs_avg_served, rrs_overall_success, rrs_success,
    CrsModel, LaplaceModel, LaplaceVariant, PowerScheme,
};
use aggnet_core::report::{Estimate, MetricReport};
use aggnet_core::scheduling::{delta_star, AccessScheme, PowerControl};
use aggnet_core::{estimate_metrics, occupancy_pmf, NetworkParams};

use crate::output::{num, opt_num, text, Table};
use crate::scenario::Scenario;
use crate::CliError;

/// Poisson tail tolerance for the truncated channel-aware sums.
pub const TAIL_TAU: f64 = 1e-5;

/// Which transform path the analytic tables use for random scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceChoice {
    Exact,
    Weighted,
}

impl std::str::FromStr for LaplaceChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(LaplaceChoice::Exact),
            "weighted" => Ok(LaplaceChoice::Weighted),
            other => Err(CliError::Usage(format!(
                "unknown laplace path '{other}' (expected exact or weighted)"
            ))),
        }
    }
}

impl LaplaceChoice {
    fn variant(self) -> LaplaceVariant {
        match self {
            LaplaceChoice::Exact => LaplaceVariant::RrsExact,
            LaplaceChoice::Weighted => LaplaceVariant::RrsWeighted,
        }
    }
}

/// Budget used by the pair-sharing schemes: the scenario delta, or the
/// solved coexistence budget when requested (evaluated at s = theta with the
/// scenario's pair probability).
pub fn resolve_delta(sc: &Scenario, star_default: bool) -> Result<f64, CliError> {
    if !sc.use_delta_star.unwrap_or(star_default) {
        return Ok(sc.params.delta);
    }
    let pmf = occupancy_pmf(&sc.params).map_err(CliError::num)?;
    let c2 = pmf.c.get(2).copied().unwrap_or(0.0);
    if c2 <= 0.0 {
        // no pairs: the budget never enters any formula
        return Ok(sc.params.delta);
    }
    let d = delta_star(&sc.params, sc.params.theta, c2).map_err(CliError::num)?;
    Ok(d.value)
}

fn single_occupancy_params(params: &NetworkParams) -> NetworkParams {
    NetworkParams {
        l_max: 1,
        ..params.clone()
    }
}

/// Analytic metric report for one scheme. `delta` must already be resolved.
pub fn analytic_report(
    params: &NetworkParams,
    scheme: AccessScheme,
    delta: f64,
    laplace: LaplaceChoice,
) -> Result<MetricReport, CliError> {
    let report = match scheme {
        AccessScheme::Oma => {
            let p1 = single_occupancy_params(params);
            let model = LaplaceModel::new(laplace.variant(), &p1).map_err(CliError::num)?;
            let p11 = rrs_success(1, 1, p1.theta, p1.mu, &model).map_err(CliError::num)?;
            let served = p11 * expected_scheduled_single(&p1).map_err(CliError::num)?;
            let pmf = occupancy_pmf(&p1).map_err(CliError::num)?;
            MetricReport {
                scheme,
                p11: Estimate::exact(p11),
                p12: Estimate::exact(0.0),
                p22: Estimate::exact(0.0),
                overall: Estimate::exact(p11),
                avg_served: Estimate::exact(served),
                avg_power: Estimate::exact(avg_power(&p1, &pmf, PowerScheme::Oma)),
                per_rank: None,
                runs: None,
                seed: None,
            }
        }
        AccessScheme::Rrs => {
            let model = LaplaceModel::new(laplace.variant(), params).map_err(CliError::num)?;
            let p11 = rrs_success(1, 1, params.theta, params.mu, &model).map_err(CliError::num)?;
            let (p12, p22) = if params.l_max >= 2 {
                (
                    rrs_success(1, 2, params.theta, params.mu, &model).map_err(CliError::num)?,
                    rrs_success(2, 2, params.theta, params.mu, &model).map_err(CliError::num)?,
                )
            } else {
                (0.0, 0.0)
            };
            let overall = if params.l_max >= 2 {
                rrs_overall_success(&model.pmf, p11, p12, p22).map_err(CliError::num)?
            } else {
                p11
            };
            let served = if params.l_max >= 2 {
                rrs_avg_served(params, p11, p12, p22).map_err(CliError::num)?
            } else {
                p11 * expected_scheduled_single(params).map_err(CliError::num)?
            };
            let power_scheme = if params.l_max >= 2 {
                PowerScheme::Hybrid { delta: 2.0 }
            } else {
                PowerScheme::Oma
            };
            MetricReport {
                scheme,
                p11: Estimate::exact(p11),
                p12: Estimate::exact(p12),
                p22: Estimate::exact(p22),
                overall: Estimate::exact(overall),
                avg_served: Estimate::exact(served),
                avg_power: Estimate::exact(avg_power(params, &model.pmf, power_scheme)),
                per_rank: None,
                runs: None,
                seed: None,
            }
        }
        AccessScheme::CrsFixed | AccessScheme::CrsTheorem4 => {
            let mut p = params.clone();
            p.delta = delta;
            let control = match scheme {
                AccessScheme::CrsFixed => PowerControl::fixed(delta),
                _ => PowerControl::balanced(delta),
            };
            let rrs_model = LaplaceModel::new(laplace.variant(), &p).map_err(CliError::num)?;
            let model =
                CrsModel::from_laplace(&p, control, &rrs_model, TAIL_TAU).map_err(CliError::num)?;
            let r = model.evaluate().map_err(CliError::num)?;
            let power_scheme = if p.l_max >= 2 {
                PowerScheme::Hybrid { delta }
            } else {
                PowerScheme::Oma
            };
            MetricReport {
                scheme,
                p11: Estimate::exact(r.p11),
                p12: Estimate::exact(r.p12),
                p22: Estimate::exact(r.p22),
                overall: Estimate::exact(r.overall),
                avg_served: Estimate::exact(r.avg_served),
                avg_power: Estimate::exact(avg_power(&p, &model.pmf, power_scheme)),
                per_rank: None,
                runs: None,
                seed: None,
            }
        }
    };
    Ok(report)
}

fn sweep_cell(v: Option<f64>) -> Value {
    opt_num(v)
}

pub fn cmd_pmf(sc: &Scenario) -> Result<Table, CliError> {
    let mut table = Table::new(
        "pmf",
        &format!("{} sweep={:?}", sc.describe(), sc.sweep),
        &["sweep_value", "u", "c_u", "c_bar"],
    );
    for (x, point) in sc.sweep_points() {
        let pmf = occupancy_pmf(&point.params).map_err(CliError::num)?;
        for (u, cu) in pmf.c.iter().enumerate() {
            table.push(vec![
                sweep_cell(x),
                num(u as f64),
                num(*cu),
                num(pmf.c_bar),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_laplace(sc: &Scenario, include_exact: bool) -> Result<Table, CliError> {
    let fig = &sc.figure;
    let lo = fig.s_db_min.unwrap_or(-20.0);
    let hi = fig.s_db_max.unwrap_or(20.0);
    let points = fig.s_points.unwrap_or(41).max(2);
    let mut cols = vec!["sweep_value", "s_db", "s", "lower", "upper", "weighted"];
    if include_exact {
        cols.push("exact");
    }
    let mut table = Table::new("laplace", &sc.describe(), &cols);
    for (x, point) in sc.sweep_points() {
        let upper =
            LaplaceModel::new(LaplaceVariant::RrsUpper, &point.params).map_err(CliError::num)?;
        let lower =
            LaplaceModel::new(LaplaceVariant::RrsLower, &point.params).map_err(CliError::num)?;
        let weighted =
            LaplaceModel::new(LaplaceVariant::RrsWeighted, &point.params).map_err(CliError::num)?;
        let exact =
            LaplaceModel::new(LaplaceVariant::RrsExact, &point.params).map_err(CliError::num)?;
        for idx in 0..points {
            let s_db = lo + (hi - lo) * idx as f64 / (points - 1) as f64;
            let s = 10f64.powf(s_db / 10.0);
            let mut row = vec![
                sweep_cell(x),
                num(s_db),
                num(s),
                num(lower.laplace_rrs(s).map_err(CliError::num)?),
                num(upper.laplace_rrs(s).map_err(CliError::num)?),
                num(weighted.laplace_rrs(s).map_err(CliError::num)?),
            ];
            if include_exact {
                row.push(num(exact.laplace_rrs(s).map_err(CliError::num)?));
            }
            table.push(row);
        }
    }
    Ok(table)
}

pub fn cmd_success(sc: &Scenario, laplace: LaplaceChoice) -> Result<Table, CliError> {
    let mut table = Table::new(
        "success",
        &sc.describe(),
        &["sweep_value", "scheme", "delta", "p11", "p12", "p22", "overall"],
    );
    for (x, point) in sc.sweep_points() {
        let delta = resolve_delta(&point, false)?;
        for scheme in [
            AccessScheme::Rrs,
            AccessScheme::CrsFixed,
            AccessScheme::CrsTheorem4,
        ] {
            let r = analytic_report(&point.params, scheme, delta, laplace)?;
            table.push(vec![
                sweep_cell(x),
                text(scheme.label()),
                num(delta),
                num(r.p11.value),
                num(r.p12.value),
                num(r.p22.value),
                num(r.overall.value),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_metrics(sc: &Scenario, laplace: LaplaceChoice) -> Result<Table, CliError> {
    let mut table = Table::new(
        "metrics",
        &sc.describe(),
        &[
            "sweep_value",
            "scheme",
            "delta",
            "p11",
            "p12",
            "p22",
            "overall",
            "avg_served",
            "avg_power",
        ],
    );
    for (x, point) in sc.sweep_points() {
        let delta = resolve_delta(&point, false)?;
        for scheme in [
            AccessScheme::Oma,
            AccessScheme::Rrs,
            AccessScheme::CrsFixed,
            AccessScheme::CrsTheorem4,
        ] {
            let r = analytic_report(&point.params, scheme, delta, laplace)?;
            table.push(vec![
                sweep_cell(x),
                text(scheme.label()),
                num(if scheme == AccessScheme::Oma { 1.0 } else { delta }),
                num(r.p11.value),
                num(r.p12.value),
                num(r.p22.value),
                num(r.overall.value),
                num(r.avg_served.value),
                num(r.avg_power.value),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_delta_star(sc: &Scenario) -> Result<Table, CliError> {
    let mut table = Table::new(
        "delta_star",
        &sc.describe(),
        &[
            "sweep_value",
            "c2",
            "delta_star",
            "residual",
            "degenerate",
            "bracket_low",
        ],
    );
    for (x, point) in sc.sweep_points() {
        let pmf = occupancy_pmf(&point.params).map_err(CliError::num)?;
        let c2 = pmf.c.get(2).copied().unwrap_or(0.0);
        let bracket_low = 2f64.powf((2.0 - point.params.alpha) / 2.0);
        if c2 <= 0.0 {
            table.push(vec![
                sweep_cell(x),
                num(c2),
                Value::Null,
                Value::Null,
                Value::Bool(true),
                num(bracket_low),
            ]);
            continue;
        }
        let d = delta_star(&point.params, point.params.theta, c2).map_err(CliError::num)?;
        table.push(vec![
            sweep_cell(x),
            num(c2),
            num(d.value),
            num(d.residual),
            Value::Bool(d.degenerate),
            num(bracket_low),
        ]);
    }
    Ok(table)
}

pub fn cmd_simulate(sc: &Scenario) -> Result<Table, CliError> {
    let mut table = Table::new(
        "simulate",
        &sc.describe(),
        &[
            "sweep_value",
            "scheme",
            "delta",
            "runs",
            "seed",
            "p11",
            "p11_ci_low",
            "p11_ci_high",
            "p12",
            "p12_ci_low",
            "p12_ci_high",
            "p22",
            "p22_ci_low",
            "p22_ci_high",
            "overall",
            "overall_ci_low",
            "overall_ci_high",
            "avg_served",
            "avg_served_ci_low",
            "avg_served_ci_high",
            "avg_power",
            "avg_power_ci_low",
            "avg_power_ci_high",
        ],
    );
    for (x, point) in sc.sweep_points() {
        let delta = resolve_delta(&point, false)?;
        let mut params = point.params.clone();
        params.delta = delta;
        let r = estimate_metrics(&params, &point.sim).map_err(CliError::num)?;
        let est = |e: &Estimate| [num(e.value), opt_num(e.ci_low), opt_num(e.ci_high)];
        let mut row = vec![
            sweep_cell(x),
            text(point.sim.scheme.label()),
            num(delta),
            num(point.sim.runs as f64),
            num(point.sim.seed as f64),
        ];
        for e in [&r.p11, &r.p12, &r.p22, &r.overall, &r.avg_served, &r.avg_power] {
            row.extend(est(e));
        }
        table.push(row);
    }
    Ok(table)
}
