//! Explicit a-priori constants and bounds, error norms, convergence orders,
//! the De Giorgi iteration check and the local-Lipschitz probe.

mod bounds;
mod constants;
mod degiorgi;
mod errors;
mod levelset;
mod probe;

use thiserror::Error;

use crate::fem::FemError;

pub use bounds::{
    barrier_bounds, bounds_report, degiorgi_bounds, degiorgi_bounds_with_exponent, degiorgi_constant, energy_radius,
    AprioriBounds, BoundMethod,
};
pub use constants::{default_degiorgi_exponent, Provenance, SobolevConstants, SobolevEntry};
pub use degiorgi::{degiorgi_iterate_verify, degiorgi_threshold, DeGiorgiLemmaInput, DeGiorgiReport, Violation};
pub use errors::{eoc, error_norms, l2_norm_of, ErrorTriple};
pub use levelset::{cell_superlevel_fraction, superlevel_measure};
pub use probe::lipschitz_probe;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no Sobolev constant C_s({p}) available")]
    MissingConstant { p: u32 },
    #[error("nonlinearity carries no barrier pair (alpha, beta)")]
    NoBarrier,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Fem(#[from] FemError),
}
