//! Plain-text scenario files: key-value sections for the network, the
//! simulator, an optional sweep axis, output settings and figure grids.
//! Field names carry units where a unit exists; the aggregator density is
//! accepted either in log10 or linear form through two mutually exclusive
//! keys.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use aggnet_core::scheduling::AccessScheme;
use aggnet_core::{NetworkParams, SimConfig};
use serde::Deserialize;

/// Error with enough context to name the offending field or line.
#[derive(Debug)]
pub struct ScenarioError(pub String);

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ScenarioError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError(msg.into()))
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub lambda_a_log10: Option<f64>,
    pub lambda_a_per_m2: Option<f64>,
    pub r_a_m: Option<f64>,
    pub alpha: Option<f64>,
    pub m_bar: Option<f64>,
    pub n_channels: Option<u32>,
    pub l_max: Option<u32>,
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub rho: Option<f64>,
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
    pub delta: Option<f64>,
    /// Replace `delta` by the solved fair-coexistence budget at runtime.
    pub use_delta_star: Option<bool>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub runs: Option<u32>,
    pub expected_aggregators: Option<f64>,
    pub seed: Option<u64>,
    pub scheme: Option<String>,
    pub record_per_rank: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub s_db_min: Option<f64>,
    pub s_db_max: Option<f64>,
    pub s_points: Option<u32>,
    pub include_exact: Option<bool>,
    /// Enable the slow fixed-marks reference transform where a figure
    /// offers it.
    pub reference: Option<bool>,
    pub n_values: Option<Vec<u32>>,
    pub c2_points: Option<u32>,
    pub lambda_log10_values: Option<Vec<f64>>,
    pub mu_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub sim: SimSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub figure: FigureSection,
}

/// Output format of the data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => err(format!("unknown output format '{other}' (expected csv or json)")),
        }
    }
}

/// Fully resolved scenario: parameters, simulator configuration, sweep axis
/// and output settings.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: NetworkParams,
    pub sim: SimConfig,
    /// None = not set in the scenario; commands pick their own default.
    pub use_delta_star: Option<bool>,
    pub sweep: Option<(String, Vec<f64>)>,
    pub out_dir: String,
    pub format: OutputFormat,
    pub figure: FigureSection,
}

pub const SWEEPABLE: &[&str] = &[
    "lambda_a_log10",
    "lambda_a_per_m2",
    "r_a_m",
    "alpha",
    "m_bar",
    "n_channels",
    "l_max",
    "theta",
    "mu",
    "rho",
    "beta0",
    "delta",
    "runs",
    "expected_aggregators",
    "seed",
];

impl Scenario {
    /// Built-in defaults: the evaluation defaults of the study scenario.
    pub fn default_scenario() -> Self {
        Scenario {
            params: NetworkParams::default(),
            sim: SimConfig::default(),
            use_delta_star: None,
            sweep: None,
            out_dir: "out".to_string(),
            format: OutputFormat::Csv,
            figure: FigureSection::default(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError(format!("cannot read scenario {}: {e}", path.display())))?;
        let file: ScenarioFile = toml::from_str(&text)
            .map_err(|e| ScenarioError(format!("scenario {}: {e}", path.display())))?;
        Scenario::from_parsed(file)
    }

    pub fn from_parsed(file: ScenarioFile) -> Result<Self, ScenarioError> {
        let mut sc = Scenario::default_scenario();
        sc.apply_network(&file.network)?;
        sc.apply_sim(&file.sim)?;
        if let Some(sweep) = file.sweep {
            if !SWEEPABLE.contains(&sweep.parameter.as_str()) {
                return err(format!(
                    "sweep parameter '{}' does not name a network or simulation field \
                     (known fields: {})",
                    sweep.parameter,
                    SWEEPABLE.join(", ")
                ));
            }
            if sweep.values.is_empty() {
                return err("sweep values list is empty");
            }
            sc.sweep = Some((sweep.parameter, sweep.values));
        }
        if let Some(p) = file.output.path {
            sc.out_dir = p;
        }
        if let Some(f) = file.output.format {
            sc.format = f.parse()?;
        }
        sc.figure = file.figure;
        Ok(sc)
    }

    fn apply_network(&mut self, n: &NetworkSection) -> Result<(), ScenarioError> {
        match (n.lambda_a_log10, n.lambda_a_per_m2) {
            (Some(_), Some(_)) => {
                return err(
                    "set exactly one of lambda_a_log10 and lambda_a_per_m2, not both",
                )
            }
            (Some(l), None) => self.params.lambda_a = 10f64.powf(l),
            (None, Some(v)) => self.params.lambda_a = v,
            (None, None) => {}
        }
        let p = &mut self.params;
        if let Some(v) = n.r_a_m {
            p.r_a = v;
        }
        if let Some(v) = n.alpha {
            p.alpha = v;
        }
        if let Some(v) = n.m_bar {
            p.m_bar = v;
        }
        if let Some(v) = n.n_channels {
            p.n_channels = v;
        }
        if let Some(v) = n.l_max {
            p.l_max = v;
        }
        if let Some(v) = n.theta {
            p.theta = v;
        }
        if let Some(v) = n.mu {
            p.mu = v;
        }
        if let Some(v) = n.rho {
            p.rho = v;
        }
        if let Some(v) = n.beta0 {
            p.beta0 = v;
        }
        if let Some(v) = n.beta1 {
            p.beta1 = v;
        }
        if let Some(v) = n.delta {
            p.delta = v;
        }
        if n.use_delta_star.is_some() {
            self.use_delta_star = n.use_delta_star;
        }
        Ok(())
    }

    fn apply_sim(&mut self, s: &SimSection) -> Result<(), ScenarioError> {
        if let Some(v) = s.runs {
            self.sim.runs = v;
        }
        if let Some(v) = s.expected_aggregators {
            self.sim.expected_aggregators = v;
        }
        if let Some(v) = s.seed {
            self.sim.seed = v;
        }
        if let Some(ref v) = s.scheme {
            self.sim.scheme = AccessScheme::from_str(v).map_err(ScenarioError)?;
        }
        if let Some(v) = s.record_per_rank {
            self.sim.record_per_rank = v;
        }
        Ok(())
    }

    /// Apply one `key=value` override; the key may be bare or
    /// `section.field`. Field names match the scenario file.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ScenarioError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| ScenarioError(format!("override '{spec}' is not KEY=VALUE")))?;
        let key = key.trim();
        let value = value.trim();
        let field = key
            .rsplit_once('.')
            .map(|(_, f)| f)
            .unwrap_or(key);
        let fv = || -> Result<f64, ScenarioError> {
            value
                .parse::<f64>()
                .map_err(|_| ScenarioError(format!("override '{key}': '{value}' is not a number")))
        };
        let bv = || -> Result<bool, ScenarioError> {
            value
                .parse::<bool>()
                .map_err(|_| ScenarioError(format!("override '{key}': '{value}' is not a bool")))
        };
        match field {
            "lambda_a_log10" => self.params.lambda_a = 10f64.powf(fv()?),
            "lambda_a_per_m2" => self.params.lambda_a = fv()?,
            "r_a_m" => self.params.r_a = fv()?,
            "alpha" => self.params.alpha = fv()?,
            "m_bar" => self.params.m_bar = fv()?,
            "n_channels" => self.params.n_channels = fv()? as u32,
            "l_max" => self.params.l_max = fv()? as u32,
            "theta" => self.params.theta = fv()?,
            "mu" => self.params.mu = fv()?,
            "rho" => self.params.rho = fv()?,
            "beta0" => {
                self.params.beta0 = fv()?;
                self.params.beta1 = 1.0 - self.params.beta0;
            }
            "beta1" => {
                self.params.beta1 = fv()?;
                self.params.beta0 = 1.0 - self.params.beta1;
            }
            "delta" => self.params.delta = fv()?,
            "use_delta_star" => self.use_delta_star = Some(bv()?),
            "runs" => self.sim.runs = fv()? as u32,
            "expected_aggregators" => self.sim.expected_aggregators = fv()?,
            "seed" => {
                self.sim.seed = value.parse::<u64>().map_err(|_| {
                    ScenarioError(format!("override '{key}': '{value}' is not an integer"))
                })?
            }
            "scheme" => {
                self.sim.scheme = AccessScheme::from_str(value).map_err(ScenarioError)?
            }
            "record_per_rank" => self.sim.record_per_rank = bv()?,
            "path" => self.out_dir = value.to_string(),
            "format" => self.format = value.parse()?,
            "s_db_min" => self.figure.s_db_min = Some(fv()?),
            "s_db_max" => self.figure.s_db_max = Some(fv()?),
            "s_points" => self.figure.s_points = Some(fv()? as u32),
            "include_exact" => self.figure.include_exact = Some(bv()?),
            "reference" => self.figure.reference = Some(bv()?),
            "c2_points" => self.figure.c2_points = Some(fv()? as u32),
            other => {
                return err(format!(
                    "override names unknown field '{other}' \
                     (see the scenario format in the README)"
                ))
            }
        }
        Ok(())
    }

    /// Apply one sweep value, returning the modified copy.
    pub fn at_sweep_value(&self, parameter: &str, value: f64) -> Result<Scenario, ScenarioError> {
        let mut sc = self.clone();
        sc.sweep = None;
        match parameter {
            "seed" => sc.sim.seed = value as u64,
            "scheme" => return err("scheme cannot be swept numerically"),
            _ => sc.apply_override(&format!("{parameter}={value}"))?,
        }
        Ok(sc)
    }

    /// The sweep axis as (name, points); a single unnamed point when no
    /// sweep is configured.
    pub fn sweep_points(&self) -> Vec<(Option<f64>, Scenario)> {
        match &self.sweep {
            None => vec![(None, self.clone())],
            Some((name, values)) => values
                .iter()
                .map(|&v| {
                    (
                        Some(v),
                        self.at_sweep_value(name, v)
                            .expect("sweep parameter validated at load"),
                    )
                })
                .collect(),
        }
    }

    /// One-line record of every resolved parameter, embedded in output
    /// files.
    pub fn describe(&self) -> String {
        let p = &self.params;
        let s = &self.sim;
        format!(
            "lambda_a_per_m2={} r_a_m={} alpha={} m_bar={} n_channels={} l_max={} \
             theta={} mu={} rho={} beta0={} beta1={} delta={} use_delta_star={} \
             runs={} expected_aggregators={} seed={} scheme={} record_per_rank={}",
            p.lambda_a,
            p.r_a,
            p.alpha,
            p.m_bar,
            p.n_channels,
            p.l_max,
            p.theta,
            p.mu,
            p.rho,
            p.beta0,
            p.beta1,
            p.delta,
            self.use_delta_star.unwrap_or(false),
            s.runs,
            s.expected_aggregators,
            s.seed,
            s.scheme.label(),
            s.record_per_rank
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_scenario() {
        let text = r#"
            [network]
            lambda_a_log10 = -4.4
            r_a_m = 40.0
            m_bar = 60.0
            n_channels = 30

            [sim]
            runs = 1000
            scheme = "crs_theorem4"

            [sweep]
            parameter = "n_channels"
            values = [10, 20, 30]

            [output]
            path = "data"
            format = "json"
        "#;
        let sc = Scenario::from_parsed(toml::from_str(text).unwrap()).unwrap();
        assert_eq!(sc.sim.runs, 1000);
        assert_eq!(sc.sim.scheme, AccessScheme::CrsTheorem4);
        assert_eq!(sc.out_dir, "data");
        assert_eq!(sc.format, OutputFormat::Json);
        assert_eq!(sc.sweep_points().len(), 3);
        assert!((sc.params.lambda_a - 10f64.powf(-4.4)).abs() < 1e-18);
    }

    #[test]
    fn rejects_double_density_keys() {
        let text = "[network]\nlambda_a_log10 = -4.4\nlambda_a_per_m2 = 1e-5\n";
        let e = Scenario::from_parsed(toml::from_str(text).unwrap()).unwrap_err();
        assert!(e.0.contains("exactly one"));
    }

    #[test]
    fn rejects_unknown_sweep_field() {
        let text = "[sweep]\nparameter = \"bogus\"\nvalues = [1.0]\n";
        let e = Scenario::from_parsed(toml::from_str(text).unwrap()).unwrap_err();
        assert!(e.0.contains("bogus"), "{e}");
    }

    #[test]
    fn unknown_toml_key_is_named() {
        let text = "[network]\nnot_a_field = 1\n";
        let e = toml::from_str::<ScenarioFile>(text).unwrap_err();
        assert!(e.to_string().contains("not_a_field"));
    }

    #[test]
    fn overrides_apply_and_validate() {
        let mut sc = Scenario::default_scenario();
        sc.apply_override("theta=2.5").unwrap();
        sc.apply_override("sim.runs=77").unwrap();
        sc.apply_override("beta0=0.25").unwrap();
        assert_eq!(sc.params.theta, 2.5);
        assert_eq!(sc.sim.runs, 77);
        assert_eq!(sc.params.beta1, 0.75);
        assert!(sc.apply_override("nope=1").is_err());
        assert!(sc.apply_override("theta").is_err());
    }
}
