//! Config file loading and backend resolution.
//!
//! The optional JSON config file supplies backend endpoints per task plus
//! defaults for workers, seed, and pipeline flags. Command-line flags win
//! over config values; `--stub` replaces every endpoint with the in-process
//! deterministic stubs. The bearer token is only ever read from the
//! `TAGT_TOKEN` environment variable so it never lands in config files or
//! shell history.

use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;
use tagt_core::backend::http::{EndpointConfig, HttpBackend};
use tagt_core::backend::stub::stub_for_task;
use tagt_core::backend::Task;
use tagt_core::pipeline::PipelineConfig;
use tagt_core::BackendHandle;

use crate::args::BackendFlags;
use crate::error::CliError;

/// One backend endpoint in the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointSpec {
    /// Scheme + host + optional port, e.g. `http://127.0.0.1:8109`.
    pub base_url: String,
    pub timeout_secs: Option<u64>,
    pub max_attempts: Option<u32>,
    pub backoff_ms: Option<u64>,
    pub max_in_flight: Option<usize>,
}

impl EndpointSpec {
    fn to_endpoint_config(&self, bearer_token: Option<String>) -> EndpointConfig {
        let mut config = EndpointConfig::new(self.base_url.clone());
        if let Some(secs) = self.timeout_secs {
            config.timeout = Duration::from_secs(secs);
        }
        if let Some(attempts) = self.max_attempts {
            config.max_attempts = attempts;
        }
        if let Some(ms) = self.backoff_ms {
            config.backoff = Duration::from_millis(ms);
        }
        if let Some(cap) = self.max_in_flight {
            config.max_in_flight = cap;
        }
        config.bearer_token = bearer_token;
        config
    }
}

/// Endpoints per backend task.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoints {
    pub verbalize: Option<EndpointSpec>,
    pub aggregate: Option<EndpointSpec>,
    pub subjectify: Option<EndpointSpec>,
    pub classify: Option<EndpointSpec>,
    pub score: Option<EndpointSpec>,
}

/// The JSON config file. Every field is optional; flags override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub endpoints: Endpoints,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub group_size: Option<usize>,
    pub skip_aggregation: Option<bool>,
    pub skip_subjectivity: Option<bool>,
    pub skip_empty_cells: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::input(format!("invalid config {}: {e}", path.display())))
    }
}

/// Resolved backend handles for every task slot.
pub struct Backends {
    pub verbalize: Option<BackendHandle>,
    pub aggregate: Option<BackendHandle>,
    pub subjectify: Option<BackendHandle>,
    pub classify: Option<BackendHandle>,
    pub score: Option<BackendHandle>,
}

/// Everything a command needs after merging flags and config file.
pub struct Resolved {
    pub backends: Backends,
    pub workers: usize,
    pub seed: Option<u64>,
    pub group_size: usize,
    pub skip_aggregation: bool,
    pub skip_subjectivity: bool,
    pub skip_empty_cells: bool,
}

/// Merges `--config` file values with command-line flags (flags win) and
/// builds backend handles: stubs under `--stub`, HTTP clients otherwise.
pub fn resolve(flags: &BackendFlags) -> Result<Resolved, CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let workers = flags.workers.or(file.workers).unwrap_or(4);
    if workers == 0 {
        return Err(CliError::input("--workers must be at least 1"));
    }
    let token = std::env::var("TAGT_TOKEN").ok().filter(|t| !t.is_empty());
    let http = |spec: &Option<EndpointSpec>| -> Option<BackendHandle> {
        spec.as_ref().map(|s| {
            Arc::new(HttpBackend::new(s.to_endpoint_config(token.clone()))) as BackendHandle
        })
    };
    let backends = if flags.stub {
        Backends {
            verbalize: Some(stub_for_task(Task::Verbalize)),
            aggregate: Some(stub_for_task(Task::Aggregate)),
            subjectify: Some(stub_for_task(Task::Subjectify)),
            classify: Some(stub_for_task(Task::ClassifySubjectivity)),
            score: Some(stub_for_task(Task::ScorePair)),
        }
    } else {
        Backends {
            verbalize: http(&file.endpoints.verbalize),
            aggregate: http(&file.endpoints.aggregate),
            subjectify: http(&file.endpoints.subjectify),
            classify: http(&file.endpoints.classify),
            score: http(&file.endpoints.score),
        }
    };
    Ok(Resolved {
        backends,
        workers,
        seed: flags.seed.or(file.seed),
        group_size: file.group_size.unwrap_or(8),
        skip_aggregation: file.skip_aggregation.unwrap_or(false),
        skip_subjectivity: file.skip_subjectivity.unwrap_or(false),
        skip_empty_cells: file.skip_empty_cells.unwrap_or(false),
    })
}

impl Resolved {
    /// Applies per-command overrides (flags beat config file values).
    pub fn apply_overrides(
        &mut self,
        skip_aggregation: bool,
        skip_subjectivity: bool,
        skip_empty_cells: bool,
        group_size: Option<usize>,
    ) {
        if skip_aggregation {
            self.skip_aggregation = true;
        }
        if skip_subjectivity {
            self.skip_subjectivity = true;
        }
        if skip_empty_cells {
            self.skip_empty_cells = true;
        }
        if let Some(size) = group_size {
            self.group_size = size;
        }
    }

    /// Builds the pipeline configuration from the resolved state.
    pub fn pipeline_config(&self) -> Result<PipelineConfig, CliError> {
        let config = PipelineConfig {
            verbalizer: self.backends.verbalize.clone(),
            aggregator: self.backends.aggregate.clone(),
            subjectifier: self.backends.subjectify.clone(),
            skip_aggregation: self.skip_aggregation,
            skip_subjectivity: self.skip_subjectivity,
            skip_empty_cells: self.skip_empty_cells,
            group_size: self.group_size,
            seed: self.seed,
        };
        config
            .validate()
            .map_err(|e| CliError::input(e.to_string()))?;
        Ok(config)
    }
}
