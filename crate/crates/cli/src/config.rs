//! Run configuration: strict JSON parsing for full-run configs and the
//! scan ladder config.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Full-run configuration file: selects the subcommand and carries its
/// parameters. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    /// Inline scenario object or a path string to a scenario JSON file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<serde_json::Value>,
    /// Subcommand-specific parameters.
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// Scenario template for randomly drawn scenarios.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTemplate {
    pub d: usize,
    pub r_n: usize,
    pub r_s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Control variable: "theta0" or "r_n".
    pub axis: String,
    pub values: Vec<f64>,
}

/// Ladder configuration consumed by `scan`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub scenario: ScenarioTemplate,
    pub sweep: SweepSpec,
    pub strategy: String,
    pub trials: usize,
    pub target_beta: f64,
    pub alpha_cap: f64,
    /// Ideal-filter failure level, required by the dme_qsp strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_delta: Option<f64>,
}
