//! Configuration-driven convergence and degradation studies on manufactured
//! sine solutions, with CSV output and an oracle-backed self-test.

mod config;
mod csv;
mod problem;
mod selftest;
mod study;

use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::fem::FemError;
use crate::mesh::MeshError;
use crate::solver::SolverError;

pub use config::{ConstantsConfig, DegradationConfig, MeshConfig, StudyConfig, StudyKind, UserConstant};
pub use csv::{CONVERGENCE_HEADER, CSV_VERSION, DEGRADATION_HEADER};
pub use problem::manufactured_problem;
pub use selftest::{run_selftest, SelftestCase};
pub use study::{
    bounds_for_config, run_convergence_study, run_degradation_study, ConvergenceOutcome, ConvergenceRow,
    ConvergenceTable, DegradationRow, DegradationTable, LevelData,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("study level {level} failed: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<HarnessError>,
    },
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Parse(_) => 2,
            Self::Io { .. } => 2,
            _ => 1,
        }
    }
}
