//! JSON experiment configuration. Unknown keys are rejected everywhere.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use floquet_core::protocols::TriangleKind;
use floquet_core::NumericsSettings;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    TriangleSweep,
    Switch,
    Chain,
    Nnn1d,
    StarCbg,
    Waveguides,
    ErrorScaling,
    PeriodBound,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::TriangleSweep,
        Experiment::Switch,
        Experiment::Chain,
        Experiment::Nnn1d,
        Experiment::StarCbg,
        Experiment::Waveguides,
        Experiment::ErrorScaling,
        Experiment::PeriodBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TriangleSweep => "triangle-sweep",
            Experiment::Switch => "switch",
            Experiment::Chain => "chain",
            Experiment::Nnn1d => "nnn-1d",
            Experiment::StarCbg => "star-cbg",
            Experiment::Waveguides => "waveguides",
            Experiment::ErrorScaling => "error-scaling",
            Experiment::PeriodBound => "period-bound",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Experiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            invalid(
                "experiment",
                format!("unknown kind `{s}`; expected one of {}", known.join(", ")),
            )
        })
    }
}

/// The document passed with `--config`.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the command-line experiment when present.
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub parameters: Value,
    #[serde(default)]
    pub numerics: Numerics,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Fixed steps per period for smooth drives; adaptive when absent.
    #[serde(default)]
    pub steps_per_period: Option<usize>,
    #[serde(default)]
    pub tolerances: NumericsSettings<f64>,
}

impl Numerics {
    fn validate(&self) -> Result<(), CliError> {
        if self.steps_per_period == Some(0) {
            return Err(invalid("numerics.steps_per_period", "must be at least 1"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("hermitian_tol", t.hermitian_tol),
            ("unitary_tol", t.unitary_tol),
            ("branch_margin", t.branch_margin),
            ("convergence_tol", t.convergence_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(
                    &format!("numerics.tolerances.{name}"),
                    "must be positive and finite",
                ));
            }
        }
        if t.initial_steps == 0 {
            return Err(invalid("numerics.tolerances.initial_steps", "must be at least 1"));
        }
        if t.max_steps < t.initial_steps {
            return Err(invalid(
                "numerics.tolerances.max_steps",
                "must be at least initial_steps",
            ));
        }
        Ok(())
    }
}

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> CliError {
    CliError::ConfigInvalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn from_json<D: DeserializeOwned>(prefix: &str, value: Value) -> Result<D, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{path}")
        };
        invalid(&field, e.into_inner().to_string())
    })
}

/// Parses the document; the result still needs [`Resolved::new`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." || path == "?" { "config" } else { &path };
        invalid(field, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| invalid("config", e.to_string()))?;
    Ok(config)
}

fn check_positive(field: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            &format!("parameters.{field}"),
            format!("must be positive and finite, got {x}"),
        ))
    }
}

fn check_finite(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(&format!("parameters.{field}"), "must be finite"))
    }
}

fn check_non_negative(field: &str, x: f64) -> Result<(), CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            &format!("parameters.{field}"),
            format!("must be non-negative and finite, got {x}"),
        ))
    }
}

fn check_at_least(field: &str, n: usize, min: usize) -> Result<(), CliError> {
    if n >= min {
        Ok(())
    } else {
        Err(invalid(
            &format!("parameters.{field}"),
            format!("must be at least {min}, got {n}"),
        ))
    }
}

/// Evenly spaced grid including both ends.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.start + step * k as f64).collect()
    }

    fn validate(&self, field: &str) -> Result<(), CliError> {
        check_finite(&format!("{field}.start"), self.start)?;
        check_finite(&format!("{field}.stop"), self.stop)?;
        check_at_least(&format!("{field}.points"), self.points, 1)?;
        if self.stop < self.start {
            return Err(invalid(&format!("parameters.{field}.stop"), "must not be below start"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TriangleSweep {
    pub kind: TriangleKind,
    pub j_prime: f64,
    pub periods: Vec<f64>,
    pub amplitude: Grid,
}

impl Default for TriangleSweep {
    fn default() -> Self {
        Self {
            kind: TriangleKind::Step,
            j_prime: 1.0,
            periods: vec![0.3, 0.5],
            amplitude: Grid {
                start: 0.0,
                stop: 100.0,
                points: 50,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Switch {
    pub kind: TriangleKind,
    pub amplitude: f64,
    pub period: f64,
    pub arm_length: usize,
    pub t_max: f64,
}

impl Default for Switch {
    fn default() -> Self {
        Self {
            kind: TriangleKind::Step,
            amplitude: 63.12,
            period: 0.2,
            arm_length: 2,
            t_max: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Chain {
    pub kind: TriangleKind,
    pub n_triangles: usize,
    pub amplitude: f64,
    pub period: f64,
    pub t_max: f64,
}

impl Default for Chain {
    fn default() -> Self {
        Self {
            kind: TriangleKind::Step,
            n_triangles: 3,
            amplitude: 63.12,
            period: 0.2,
            t_max: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nnn1d {
    pub n: usize,
    /// 1-based start node.
    pub start: usize,
    pub k1: f64,
    /// `|K2|`; the target coupling is `i |K2|`.
    pub k2: f64,
    pub period: f64,
    pub t_evol: f64,
}

impl Default for Nnn1d {
    fn default() -> Self {
        Self {
            n: 50,
            start: 25,
            k1: 1.0,
            k2: 0.2,
            period: 0.5,
            t_evol: 7.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct StarCbg {
    pub n: usize,
    pub partition: Vec<usize>,
    pub j1: f64,
    pub period: f64,
}

impl Default for StarCbg {
    fn default() -> Self {
        Self {
            n: 7,
            partition: vec![1, 2, 4, 6],
            j1: 1.0,
            period: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Waveguides {
    pub n: usize,
    pub kappa: f64,
    pub gamma: f64,
    pub j0: f64,
    pub j1: f64,
    pub omega: f64,
    pub z: Grid,
}

impl Default for Waveguides {
    fn default() -> Self {
        Self {
            n: 5,
            kappa: 1.0,
            gamma: 1.0,
            j0: 0.5,
            j1: 0.1,
            omega: 1.0,
            z: Grid {
                start: 0.0,
                stop: 2.0 * std::f64::consts::PI,
                points: 201,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorScaling {
    pub periods: Vec<f64>,
    pub triangle_amplitude: f64,
    pub chain_sites: usize,
    pub j0: f64,
    pub j1: f64,
}

impl Default for ErrorScaling {
    fn default() -> Self {
        Self {
            periods: vec![0.4, 0.2, 0.1, 0.05, 0.025],
            triangle_amplitude: 2.0,
            chain_sites: 5,
            j0: 1.0,
            j1: 0.5,
        }
    }
}

/// Either a given `h_max`, or the switch protocol whose `h_max` is found
/// self-consistently with the bound.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodBound {
    pub eps: f64,
    pub t_evol: f64,
    pub h_max: Option<f64>,
    pub switch_amplitude: Option<f64>,
    pub arm_length: usize,
    pub iterations: usize,
}

impl Default for PeriodBound {
    fn default() -> Self {
        Self {
            eps: 0.1,
            t_evol: 4.0,
            h_max: None,
            switch_amplitude: None,
            arm_length: 2,
            iterations: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    TriangleSweep(TriangleSweep),
    Switch(Switch),
    Chain(Chain),
    Nnn1d(Nnn1d),
    StarCbg(StarCbg),
    Waveguides(Waveguides),
    ErrorScaling(ErrorScaling),
    PeriodBound(PeriodBound),
}

impl Parameters {
    fn parse(experiment: Experiment, value: Value) -> Result<Self, CliError> {
        let value = if value.is_null() {
            Value::Object(Default::default())
        } else {
            value
        };
        let p = "parameters";
        Ok(match experiment {
            Experiment::TriangleSweep => Parameters::TriangleSweep(from_json(p, value)?),
            Experiment::Switch => Parameters::Switch(from_json(p, value)?),
            Experiment::Chain => Parameters::Chain(from_json(p, value)?),
            Experiment::Nnn1d => Parameters::Nnn1d(from_json(p, value)?),
            Experiment::StarCbg => Parameters::StarCbg(from_json(p, value)?),
            Experiment::Waveguides => Parameters::Waveguides(from_json(p, value)?),
            Experiment::ErrorScaling => Parameters::ErrorScaling(from_json(p, value)?),
            Experiment::PeriodBound => Parameters::PeriodBound(from_json(p, value)?),
        })
    }

    /// Checks the preconditions of every operation the experiment will call.
    fn validate(&self) -> Result<(), CliError> {
        match self {
            Parameters::TriangleSweep(s) => {
                check_finite("j_prime", s.j_prime)?;
                if s.periods.is_empty() {
                    return Err(invalid("parameters.periods", "must not be empty"));
                }
                for (k, &t) in s.periods.iter().enumerate() {
                    check_positive(&format!("periods[{k}]"), t)?;
                }
                s.amplitude.validate("amplitude")
            }
            Parameters::Switch(s) => {
                check_finite("amplitude", s.amplitude)?;
                check_positive("period", s.period)?;
                check_at_least("arm_length", s.arm_length, 1)?;
                check_non_negative("t_max", s.t_max)?;
                floquet_core::protocols::build_switch_with(s.kind, s.amplitude, s.period, s.arm_length)
                    .map(|_| ())
                    .map_err(|e| invalid("parameters", e.to_string()))
            }
            Parameters::Chain(s) => {
                check_at_least("n_triangles", s.n_triangles, 1)?;
                check_finite("amplitude", s.amplitude)?;
                check_positive("period", s.period)?;
                check_non_negative("t_max", s.t_max)?;
                floquet_core::protocols::build_triangle_chain_with(s.kind, s.n_triangles, s.amplitude, s.period)
                    .map(|_| ())
                    .map_err(|e| invalid("parameters", e.to_string()))
            }
            Parameters::Nnn1d(s) => {
                check_at_least("n", s.n, 2)?;
                if s.start < 1 || s.start > s.n {
                    return Err(invalid("parameters.start", format!("must lie in 1..={}", s.n)));
                }
                check_finite("k1", s.k1)?;
                check_non_negative("k2", s.k2)?;
                check_positive("period", s.period)?;
                check_non_negative("t_evol", s.t_evol)?;
                floquet_core::protocols::build_1d_nnn_protocol(s.n, s.k1, s.k2, s.period, s.t_evol)
                    .map(|_| ())
                    .map_err(|e| invalid("parameters", e.to_string()))
            }
            Parameters::StarCbg(s) => {
                check_finite("j1", s.j1)?;
                check_positive("period", s.period)?;
                floquet_core::protocols::build_star_cbg_protocol(s.n, &s.partition, s.j1, s.period)
                    .map(|_| ())
                    .map_err(|e| invalid("parameters.partition", e.to_string()))
            }
            Parameters::Waveguides(s) => {
                check_at_least("n", s.n, 1)?;
                check_positive("kappa", s.kappa)?;
                check_positive("gamma", s.gamma)?;
                check_finite("j0", s.j0)?;
                check_finite("j1", s.j1)?;
                check_finite("omega", s.omega)?;
                s.z.validate("z")?;
                floquet_core::protocols::waveguide_positions(s.n, s.kappa, s.gamma, s.j0, s.j1, s.omega, &s.z.values())
                    .map(|_| ())
                    .map_err(|e| invalid("parameters", e.to_string()))
            }
            Parameters::ErrorScaling(s) => {
                if s.periods.len() < 2 {
                    return Err(invalid("parameters.periods", "need at least two periods for a slope"));
                }
                for (k, &t) in s.periods.iter().enumerate() {
                    check_positive(&format!("periods[{k}]"), t)?;
                }
                check_finite("triangle_amplitude", s.triangle_amplitude)?;
                check_at_least("chain_sites", s.chain_sites, 2)?;
                check_finite("j0", s.j0)?;
                check_finite("j1", s.j1)
            }
            Parameters::PeriodBound(s) => {
                if !(s.eps > 0.0 && s.eps < 1.0) {
                    return Err(invalid("parameters.eps", "must lie in (0, 1)"));
                }
                check_positive("t_evol", s.t_evol)?;
                match (s.h_max, s.switch_amplitude) {
                    (Some(_), Some(_)) => {
                        return Err(invalid(
                            "parameters.h_max",
                            "give either h_max or switch_amplitude, not both",
                        ))
                    }
                    (Some(h), None) => check_positive("h_max", h)?,
                    (None, Some(a)) => {
                        check_finite("switch_amplitude", a)?;
                        check_at_least("arm_length", s.arm_length, 1)?;
                        check_at_least("iterations", s.iterations, 1)?;
                    }
                    (None, None) => return Err(invalid("parameters.h_max", "give either h_max or switch_amplitude")),
                }
                Ok(())
            }
        }
    }
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: Experiment,
    pub parameters: Parameters,
    pub numerics: Numerics,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Resolved {
    pub fn new(experiment: Experiment, config: ExperimentConfig) -> Result<Self, CliError> {
        if let Some(named) = &config.experiment {
            if named != experiment.name() {
                return Err(invalid(
                    "experiment",
                    format!("config names `{named}` but `{experiment}` was requested"),
                ));
            }
        }
        config.numerics.validate()?;
        let parameters = Parameters::parse(experiment, config.parameters)?;
        parameters.validate()?;
        Ok(Self {
            experiment,
            parameters,
            numerics: config.numerics,
            output: config.output,
        })
    }
}
