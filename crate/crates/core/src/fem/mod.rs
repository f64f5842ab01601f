//! P1 Lagrange finite elements: quadrature, assembly, interpolation and
//! Dirichlet elimination.

mod assembly;
mod dirichlet;
mod function;
mod problem;
mod quadrature;
mod sparse;

use thiserror::Error;

pub use assembly::{
    assemble_functional, assemble_load, assemble_nonlinear_jacobian, assemble_nonlinear_term,
    assemble_stiffness, assemble_weighted_mass, gradient_norm_sq, NonlinearTerm, QuadPoint,
};
pub use dirichlet::apply_dirichlet;
pub use function::{interpolate, map_to_physical, FeFunction};
pub use problem::{
    Barrier, DiffusionTensor, ExactSolution, Nonlinearity, ProblemSpec, ScalarField, ScalarMap, VectorField,
};
pub use quadrature::{quadrature_rule, QuadratureRule, MAX_DEGREE_2D, MAX_DEGREE_3D};
pub use sparse::CsrMatrix;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("no quadrature rule of degree {degree} in {dim}D")]
    UnsupportedQuadrature { dim: usize, degree: usize },
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("expected {expected} coefficients, got {actual}")]
    CoefficientCount { expected: usize, actual: usize },
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
}
