//! Problem data: diffusion tensor, nonlinearity, source and boundary data.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3};

use super::FemError;
use crate::mesh::{Point, SimplexMesh};

pub type ScalarField = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Constant symmetric diffusion tensor with declared eigenvalue bounds `m ≤ λ(D) ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionTensor {
    pub dim: usize,
    pub matrix: [[f64; 3]; 3],
    pub lower: f64,
    pub upper: f64,
}

impl DiffusionTensor {
    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut matrix = [[0.0; 3]; 3];
        for (k, row) in matrix.iter_mut().enumerate().take(dim) {
            row[k] = c;
        }
        Self {
            dim,
            matrix,
            lower: c,
            upper: c,
        }
    }

    pub fn new(dim: usize, matrix: [[f64; 3]; 3], lower: f64, upper: f64) -> Result<Self, FemError> {
        let d = Self {
            dim,
            matrix,
            lower,
            upper,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let a = &self.matrix;
        let mut ev: Vec<f64> = match self.dim {
            2 => Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
            _ => Matrix3::new(
                a[0][0], a[0][1], a[0][2], a[1][0], a[1][1], a[1][2], a[2][0], a[2][1], a[2][2],
            )
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect(),
        };
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if self.dim != 2 && self.dim != 3 {
            return Err(FemError::InvalidProblem(format!("diffusion dimension {}", self.dim)));
        }
        if !(self.lower > 0.0 && self.lower <= self.upper) {
            return Err(FemError::InvalidProblem(format!(
                "diffusion bounds must satisfy 0 < m <= M, got m = {}, M = {}",
                self.lower, self.upper
            )));
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self.matrix[i][j] - self.matrix[j][i]).abs() > 1e-14 {
                    return Err(FemError::InvalidProblem("diffusion tensor is not symmetric".into()));
                }
            }
        }
        let ev = self.eigenvalues();
        let slack = 1e-12 * self.upper;
        if ev[0] < self.lower - slack || ev[ev.len() - 1] > self.upper + slack {
            return Err(FemError::InvalidProblem(format!(
                "eigenvalues {ev:?} outside declared bounds [{}, {}]",
                self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// `D a · b`.
    pub fn apply(&self, a: &Point, b: &Point) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.matrix[i][j] * a[j] * b[i];
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    pub alpha: f64,
    pub beta: f64,
}

/// Scalar nonlinearity `b(ξ)` with its derivative and growth data.
#[derive(Clone)]
pub struct Nonlinearity {
    pub name: String,
    pub value: ScalarMap,
    pub derivative: ScalarMap,
    /// Order `n` of the bounded derivative `|b^(n)| ≤ K`; also the polynomial degree for power laws.
    pub growth_order: u32,
    pub growth_bound: f64,
    pub monotone: bool,
    pub barrier: Option<Barrier>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("growth_order", &self.growth_order)
            .field("growth_bound", &self.growth_bound)
            .field("monotone", &self.monotone)
            .field("barrier", &self.barrier)
            .finish()
    }
}

impl Nonlinearity {
    /// `b ≡ 0`.
    pub fn zero() -> Self {
        Self {
            name: "0".into(),
            value: Arc::new(|_| 0.0),
            derivative: Arc::new(|_| 0.0),
            growth_order: 1,
            growth_bound: 1.0,
            monotone: true,
            barrier: None,
        }
    }

    /// `b(s) = s^p`; monotone exactly when `p` is odd.
    pub fn power(p: u32) -> Self {
        assert!(p >= 1, "power nonlinearity needs p >= 1");
        let pi = p as i32;
        let pf = p as f64;
        Self {
            name: format!("s^{p}"),
            value: Arc::new(move |s| s.powi(pi)),
            derivative: Arc::new(move |s| pf * s.powi(pi - 1)),
            growth_order: p,
            growth_bound: (1..=p).map(f64::from).product(),
            monotone: p % 2 == 1,
            barrier: None,
        }
    }

    pub fn with_barrier(mut self, alpha: f64, beta: f64) -> Self {
        self.barrier = Some(Barrier { alpha, beta });
        self
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.value)(s)
    }

    pub fn eval_derivative(&self, s: f64) -> f64 {
        (self.derivative)(s)
    }

    /// Checks `b(0) = 0`, the declared monotonicity on `[-10, 10]`, growth data
    /// and the critical-growth range for the given dimension.
    pub fn validate(&self, dim: usize) -> Result<(), FemError> {
        let b0 = self.eval(0.0);
        if b0.abs() > 1e-14 {
            return Err(FemError::InvalidProblem(format!("b(0) = {b0}, expected 0")));
        }
        if self.growth_order < 1 || !(self.growth_bound > 0.0) {
            return Err(FemError::InvalidProblem("growth data must satisfy n >= 1 and K > 0".into()));
        }
        if dim == 3 && self.growth_order > 5 {
            return Err(FemError::InvalidProblem(format!(
                "growth order {} exceeds the critical exponent 5 in 3D",
                self.growth_order
            )));
        }
        if self.monotone {
            for k in 0..=2000 {
                let xi = -10.0 + 0.01 * k as f64;
                if self.eval_derivative(xi) < -1e-12 {
                    return Err(FemError::InvalidProblem(format!(
                        "b'({xi}) < 0 but b is declared monotone"
                    )));
                }
            }
        }
        if let Some(Barrier { alpha, beta }) = self.barrier {
            if !(alpha <= beta) {
                return Err(FemError::InvalidProblem(format!(
                    "barrier requires alpha <= beta, got ({alpha}, {beta})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarField,
    pub gradient: VectorField,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub dim: usize,
    pub diffusion: DiffusionTensor,
    pub nonlinearity: Nonlinearity,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dim", &self.dim)
            .field("diffusion", &self.diffusion)
            .field("nonlinearity", &self.nonlinearity)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Problem with `D = I`, homogeneous boundary data and no exact solution.
    pub fn homogeneous(dim: usize, nonlinearity: Nonlinearity, source: ScalarField) -> Self {
        Self {
            dim,
            diffusion: DiffusionTensor::identity(dim),
            nonlinearity,
            source,
            dirichlet: Arc::new(|_| 0.0),
            exact: None,
        }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if self.diffusion.dim != self.dim {
            return Err(FemError::InvalidProblem("diffusion dimension mismatch".into()));
        }
        self.diffusion.validate()?;
        self.nonlinearity.validate(self.dim)
    }

    /// Also checks that the boundary data matches the exact solution's trace on `mesh`.
    pub fn validate_on(&self, mesh: &SimplexMesh) -> Result<(), FemError> {
        self.validate()?;
        if mesh.dim() != self.dim {
            return Err(FemError::InvalidProblem("mesh dimension mismatch".into()));
        }
        if let Some(exact) = &self.exact {
            for v in (0..mesh.n_vertices()).filter(|&v| mesh.is_boundary(v)) {
                let x = mesh.vertex(v);
                let (g, u) = ((self.dirichlet)(x), (exact.value)(x));
                if (g - u).abs() > 1e-12 {
                    return Err(FemError::InvalidProblem(format!(
                        "boundary data {g} differs from exact trace {u} at vertex {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}
