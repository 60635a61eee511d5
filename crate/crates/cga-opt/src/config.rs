//! Run manifests: the JSON document tying together a space, an evaluator, a
//! FoM rule set and an algorithm configuration.
//!
//! ```json
//! {
//!   "space": "../spaces/rx_receiver.json",
//!   "evaluator": { "kind": "physical_lite" },
//!   "algorithm": "cga",
//!   "pop_size": 30,
//!   "max_simulations": 1000,
//!   "seed": 42,
//!   "output_dir": "runs/receiver"
//! }
//! ```
//!
//! Algorithm fields sit at the top level next to the `algorithm` tag.
//! Relative paths inside a manifest (the space file, an external evaluator's
//! template) resolve against the manifest's own directory, so a config tree
//! works from any working directory; `output_dir` resolves against the
//! caller's working directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cga::CgaConfig;
use crate::eval::{
    Benchmark, BenchmarkParams, EvalError, Evaluator, PhysicalLite, PhysicalLiteParams,
    QuadraticRf, QuadraticRfParams,
};
use crate::fitness::{FitnessError, FomConfig};
use crate::ga::GaConfig;
use crate::sim::{NetlistTemplate, SimAdapter, SimError, SimJobConfig};
use crate::space::SpaceError;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("set either max_simulations or n_gen, not both")]
    ConflictingBudget,
    #[error("no budget: set max_simulations (or n_gen)")]
    MissingBudget,
    #[error("budget {budget} cannot cover the initial population of {pop_size}")]
    BudgetBelowPopulation { budget: u64, pop_size: usize },
    #[error("selection keeps floor({pop_size} * {fraction}) = 0 individuals")]
    EmptySelection { pop_size: usize, fraction: f64 },
    #[error("unknown evaluator kind `{0}` (expected quadratic_rf, physical_lite, benchmark or external)")]
    UnknownEvaluatorKind(String),
    #[error("invalid `{kind}` evaluator params: {source}")]
    EvaluatorParams {
        kind: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("failed to read config `{path}`")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config `{path}`: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Which optimizer to run, tagged by the `algorithm` field; the variant's
/// fields live at the same JSON level as the tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum AlgorithmConfig {
    Cga(CgaConfig),
    Ga(GaConfig),
}

impl AlgorithmConfig {
    pub fn seed(&self) -> u64 {
        match self {
            AlgorithmConfig::Cga(c) => c.seed,
            AlgorithmConfig::Ga(g) => g.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            AlgorithmConfig::Cga(c) => AlgorithmConfig::Cga(CgaConfig { seed, ..c.clone() }),
            AlgorithmConfig::Ga(g) => AlgorithmConfig::Ga(GaConfig { seed, ..g.clone() }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmConfig::Cga(_) => "cga",
            AlgorithmConfig::Ga(_) => "ga",
        }
    }
}

/// Declarative evaluator selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatorSpec {
    /// `quadratic_rf`, `physical_lite`, `benchmark` or `external`.
    pub kind: String,
    /// Kind-specific parameters; each kind documents its own defaults.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
    /// Whether concurrent evaluations are safe. Only honored by `external`
    /// (the built-ins are pure); defaults to false there, conservatively.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reentrant: Option<bool>,
}

impl EvaluatorSpec {
    pub fn new(kind: &str) -> Self {
        EvaluatorSpec {
            kind: kind.to_string(),
            params: serde_json::Value::Null,
            reentrant: None,
        }
    }

    fn parse_params<T: serde::de::DeserializeOwned + Default>(
        &self,
    ) -> Result<T, ConfigError> {
        if self.params.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.params.clone()).map_err(|source| {
            ConfigError::EvaluatorParams {
                kind: self.kind.clone(),
                source,
            }
        })
    }

    /// Instantiate the evaluator. `base_dir` anchors relative paths named in
    /// the params (the external template, command entries starting with
    /// `./` or `../`).
    pub fn build(
        &self,
        fom: &FomConfig,
        base_dir: &Path,
    ) -> Result<Box<dyn Evaluator>, ConfigError> {
        match self.kind.as_str() {
            "quadratic_rf" => {
                let params: QuadraticRfParams = self.parse_params()?;
                Ok(Box::new(QuadraticRf::new(params, fom.clone())?))
            }
            "physical_lite" => {
                let params: PhysicalLiteParams = self.parse_params()?;
                Ok(Box::new(PhysicalLite::new(params, fom.clone())?))
            }
            "benchmark" => {
                let params: BenchmarkParams = self.parse_params()?;
                Ok(Box::new(Benchmark::from_params(params)))
            }
            "external" => {
                let params: ExternalParams = self.parse_params()?;
                let template_path = params
                    .template
                    .as_ref()
                    .ok_or_else(|| ConfigError::Invalid {
                        field: "evaluator.params.template",
                        reason: "external evaluator needs a template path".into(),
                    })?;
                let template = NetlistTemplate::load(&resolve(base_dir, template_path))?;
                let mut job = SimJobConfig::new(
                    params.command,
                    params.timeout_s,
                    params.result_file,
                );
                job.fixed_constants = params.fixed_constants;
                job.workers = params.workers;
                job.keep_workdir = params.keep_workdir;
                // Command args that point back into the config tree must
                // become absolute: the child process runs inside a scratch
                // directory, where a relative path would dangle.
                for arg in &mut job.command {
                    if arg.starts_with("./") || arg.starts_with("../") {
                        let resolved = resolve(base_dir, Path::new(arg));
                        let absolute = fs::canonicalize(&resolved).unwrap_or_else(|_| {
                            std::env::current_dir()
                                .map(|cwd| cwd.join(&resolved))
                                .unwrap_or(resolved)
                        });
                        *arg = absolute.display().to_string();
                    }
                }
                let adapter =
                    SimAdapter::new(template, job, fom.clone(), self.reentrant.unwrap_or(false))?;
                Ok(Box::new(adapter))
            }
            other => Err(ConfigError::UnknownEvaluatorKind(other.to_string())),
        }
    }
}

/// `external` evaluator params: a template path plus the job configuration
/// (same field names as [`SimJobConfig`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExternalParams {
    template: Option<PathBuf>,
    command: Vec<String>,
    timeout_s: f64,
    result_file: String,
    fixed_constants: std::collections::BTreeMap<String, f64>,
    workers: usize,
    keep_workdir: crate::sim::KeepWorkdir,
}

impl Default for ExternalParams {
    fn default() -> Self {
        ExternalParams {
            template: None,
            command: Vec::new(),
            timeout_s: 60.0,
            result_file: "metrics.txt".into(),
            fixed_constants: std::collections::BTreeMap::new(),
            workers: 1,
            keep_workdir: crate::sim::KeepWorkdir::default(),
        }
    }
}

/// Resolve `path` against `base` unless it is already absolute.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// A complete run description, as read from `-c <file>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Path to the parameter-space JSON, relative to the manifest.
    pub space: PathBuf,
    pub evaluator: EvaluatorSpec,
    #[serde(default)]
    pub fom: FomConfig,
    #[serde(flatten)]
    pub algorithm: AlgorithmConfig,
    /// Where runlog.json and the CSVs go; relative to the caller's working
    /// directory. Optional here but required by `optimize` (flag or field).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Seeds for `compare`; overridable with `--seeds`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Baseline settings for `compare` (its `generations` is derived from
    /// the budget there and ignored). Defaults to the stock GA.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaConfig>,
}

impl RunManifest {
    /// Load a manifest, returning it with its base directory (for resolving
    /// the relative paths inside).
    pub fn load(path: &Path) -> Result<(Self, PathBuf), ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let manifest: RunManifest =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        let base = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((manifest, base))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.fom.validate()?;
        match &self.algorithm {
            AlgorithmConfig::Cga(c) => c.validate()?,
            AlgorithmConfig::Ga(g) => g.validate()?,
        }
        if let Some(ga) = &self.ga {
            ga.validate()?;
        }
        Ok(())
    }
}
