//! JSON configuration files for `simulate` and `experiment`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{sweep_config, ExperimentConfig, SweepSpec};
use crate::simulate::{Condition, DEFAULT_BURNIN};

/// Parses JSON, reporting type and unknown-field errors with their path.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_json(&text)
}

fn prefixed(prefix: &str, err: Error) -> Error {
    match err {
        Error::Schema { path, message } => Error::Schema {
            path: format!("{prefix}.{path}"),
            message,
        },
        other => other,
    }
}

fn default_condition() -> Condition {
    Condition::IndependentWhite
}

fn default_burnin() -> usize {
    DEFAULT_BURNIN
}

/// Configuration of `fracconn simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Samples per series, a power of two.
    pub length: usize,
    /// Memory parameter of every series.
    pub d: Vec<f64>,
    #[serde(default = "default_condition")]
    pub condition: Condition,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_burnin")]
    pub burnin: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        let schema = |path: &str, message: String| Error::Schema {
            path: path.into(),
            message,
        };
        if self.length < 2 || !self.length.is_power_of_two() {
            return Err(schema("length", format!("must be a power of two, got {}", self.length)));
        }
        if self.d.is_empty() {
            return Err(schema("d", "must list at least one memory parameter".into()));
        }
        if let Some((i, d)) = self.d.iter().enumerate().find(|(_, d)| !(d.abs() < 0.5)) {
            return Err(schema(&format!("d[{i}]"), format!("{d} is outside (-0.5, 0.5)")));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.d.len() {
                return Err(schema(
                    "labels",
                    format!("{} labels for {} series", labels.len(), self.d.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<String> {
        self.labels
            .clone()
            .unwrap_or_else(|| (1..=self.d.len()).map(|k| format!("S{k}")).collect())
    }
}

/// Configuration of `fracconn experiment`: one experiment, optionally swept
/// along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.experiment.validate().map_err(|e| prefixed("experiment", e))?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Schema {
                    path: "sweep.values".into(),
                    message: "must not be empty".into(),
                });
            }
            for (i, &v) in sweep.values.iter().enumerate() {
                let config = sweep_config(sweep.axis, v, &self.experiment)?;
                config
                    .validate()
                    .map_err(|e| prefixed(&format!("sweep.values[{i}]"), e))?;
            }
        }
        Ok(())
    }
}
