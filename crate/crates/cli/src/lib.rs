//! Configuration-driven experiment runner writing CSV tables and a run
//! manifest.

pub mod config;
mod experiments;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use config::{parse_config, Experiment, ExperimentConfig, Numerics, Parameters, Resolved};
pub use table::{emit_csv, Table, TableError};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "FLOQUET_WALK_THREADS";

/// Default output directory when neither `--out` nor `output` is given.
pub const DEFAULT_OUTPUT: &str = "out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },
    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: floquet_core::Error,
    },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

impl CliError {
    /// 2 for configuration errors, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigInvalid { .. } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } | CliError::Table(_) => 1,
        }
    }
}

#[derive(Serialize)]
struct NumericsRecord<'a> {
    integrator: &'static str,
    /// Fixed value when configured; otherwise the largest count the adaptive
    /// propagator settled on (0 means exact piecewise-constant propagation).
    steps_per_period: usize,
    tolerances: &'a floquet_core::NumericsSettings<f64>,
}

/// Everything a run produces, before it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<(String, Table)>,
    pub manifest: Value,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Runs a validated experiment in memory.
pub fn execute(resolved: &Resolved) -> Result<RunOutput, CliError> {
    let n = &resolved.numerics;
    let outcome = match &resolved.parameters {
        Parameters::TriangleSweep(p) => experiments::triangle_sweep(p, n),
        Parameters::Switch(p) => experiments::switch(p, n),
        Parameters::Chain(p) => experiments::chain(p, n),
        Parameters::Nnn1d(p) => experiments::nnn_1d(p, n),
        Parameters::StarCbg(p) => experiments::star_cbg(p, n),
        Parameters::Waveguides(p) => experiments::waveguides(p),
        Parameters::ErrorScaling(p) => experiments::error_scaling(p, n),
        Parameters::PeriodBound(p) => experiments::period_bound_table(p, n),
    }?;
    let numerics = NumericsRecord {
        integrator: if n.steps_per_period.is_some() {
            "fixed"
        } else {
            "adaptive"
        },
        steps_per_period: n.steps_per_period.unwrap_or(outcome.steps_used),
        tolerances: &n.tolerances,
    };
    let outputs: Vec<String> = outcome.tables.iter().map(|(name, _)| format!("{name}.csv")).collect();
    let manifest = serde_json::json!({
        "experiment": resolved.experiment,
        "library_version": floquet_core::VERSION,
        "runner_version": env!("CARGO_PKG_VERSION"),
        "parameters": resolved.parameters,
        "numerics": numerics,
        "outputs": outputs,
        "summary": outcome.summary,
    });
    Ok(RunOutput {
        tables: outcome.tables,
        manifest,
    })
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes every table as `<name>.csv` and the manifest as `manifest.json`.
pub fn write_output(output: &RunOutput, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    for (name, table) in &output.tables {
        emit_csv(table, &dir.join(format!("{name}.csv")))?;
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&output.manifest).expect("manifest is plain JSON");
    text.push('\n');
    fs::write(&path, text).map_err(io_error(&path))
}

/// Reads and validates the config, runs the experiment and writes its
/// outputs. Returns the output directory.
pub fn run(experiment: &str, config_path: &Path, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let experiment: Experiment = experiment.parse()?;
    let text = fs::read_to_string(config_path).map_err(|e| CliError::ConfigInvalid {
        field: "config".into(),
        reason: format!("cannot read {}: {e}", config_path.display()),
    })?;
    let resolved = Resolved::new(experiment, parse_config(&text)?)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| resolved.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let output = execute(&resolved)?;
    write_output(&output, &dir)?;
    Ok(dir)
}

/// Worker count from [`THREADS_ENV`]; `None` leaves the pool default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::ConfigInvalid {
                field: THREADS_ENV.into(),
                reason: format!("expected a positive integer, got `{s}`"),
            }),
        },
    }
}
