//! Instance generators, file formats, CSV reports and experiment drivers.

pub mod config;
pub mod csv;
pub mod experiments;
pub mod formats;
pub mod generators;

pub use config::ExperimentConfig;
pub use experiments::{default_candidates, lower_bound_experiment, ofl_bound_report, EnsembleOutcome, LowerBoundRow};
pub use formats::{
    atomic_write, to_json, read_loadbal_instance, read_ofl_instance, read_probing_instance, write_json, FamilyFile, LoadBalFile,
    MetricFile, OflCostsFile, OflInstanceFile, ProbingInstanceFile, DistributionFile, SCHEMA_VERSION,
};
pub use generators::{
    gen_lower_bound_tree, gen_random_euclidean, gen_random_probing, gen_star, CostSpec, TreeLowerBoundInstance,
};

use thiserror::Error;

use crate::loadbal::LoadBalError;
use crate::norms::NormError;
use crate::ofl::OflError;
use crate::probing::ProbingError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Ofl(#[from] OflError),
    #[error(transparent)]
    Probing(#[from] ProbingError),
    #[error(transparent)]
    LoadBal(#[from] LoadBalError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unsupported schema version {0}; expected {SCHEMA_VERSION}")]
    Schema(u64),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code: 2 for enumeration budget errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Ofl(OflError::Budget { .. }) | Error::Probing(ProbingError::Budget(_)) | Error::LoadBal(LoadBalError::Budget(_)) => 2,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
