//! Damped Newton iteration for the discrete semilinear system, with a
//! Jacobi-preconditioned CG inner solver.

mod dense;
mod newton;
mod pcg;

use thiserror::Error;

use crate::fem::FemError;

pub use dense::dense_lu_solve;
pub use newton::{default_quadrature_degree, newton_solve, residual, residual_with_degree, NewtonConfig, NewtonResult};
pub use pcg::{pcg_solve, PcgOutcome};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("CG breakdown at iteration {iteration}: {reason}")]
    Breakdown { iteration: usize, reason: String },
    #[error("CG did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },
    #[error("linear solve failed at Newton iterate {newton_iteration}: {source}")]
    Jacobian {
        newton_iteration: usize,
        #[source]
        source: Box<SolverError>,
    },
    #[error("line search failed at Newton iteration {iteration} (residual history {history:?})")]
    LineSearch {
        iteration: usize,
        history: Vec<f64>,
        last: Vec<f64>,
    },
    #[error("Newton did not converge in {iterations} iterations (final residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    Diverged {
        iterations: usize,
        history: Vec<f64>,
        last: Vec<f64>,
    },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Fem(#[from] FemError),
}

impl SolverError {
    /// Residual history of a failed Newton run, if any.
    pub fn history(&self) -> Option<&[f64]> {
        match self {
            Self::LineSearch { history, .. } | Self::Diverged { history, .. } => Some(history),
            _ => None,
        }
    }
}
