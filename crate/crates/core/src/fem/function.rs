use std::sync::Arc;

use super::FemError;
use crate::mesh::{CellGeometry, Point, SimplexMesh};

/// Piecewise-linear function given by its vertex values.
#[derive(Debug, Clone)]
pub struct FeFunction {
    mesh: Arc<SimplexMesh>,
    coefficients: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Arc<SimplexMesh>, coefficients: Vec<f64>) -> Result<Self, FemError> {
        if coefficients.len() != mesh.n_vertices() {
            return Err(FemError::CoefficientCount {
                expected: mesh.n_vertices(),
                actual: coefficients.len(),
            });
        }
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(FemError::NonFinite { index: i });
        }
        Ok(Self { mesh, coefficients })
    }

    pub fn zero(mesh: Arc<SimplexMesh>) -> Self {
        let n = mesh.n_vertices();
        Self {
            mesh,
            coefficients: vec![0.0; n],
        }
    }

    pub fn mesh(&self) -> &Arc<SimplexMesh> {
        &self.mesh
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Value at the point with barycentric coordinates `bary` in cell `c`.
    pub fn eval_in_cell(&self, c: usize, bary: &[f64]) -> f64 {
        self.mesh
            .cell(c)
            .iter()
            .zip(bary)
            .map(|(&v, l)| self.coefficients[v] * l)
            .sum()
    }

    /// Constant gradient on cell `c`.
    pub fn gradient_in_cell(&self, c: usize, geom: &CellGeometry) -> Point {
        let mut g = [0.0; 3];
        for (&v, grad) in self.mesh.cell(c).iter().zip(&geom.barycentric_gradients) {
            for k in 0..3 {
                g[k] += self.coefficients[v] * grad[k];
            }
        }
        g
    }

    /// Maximum nodal magnitude, which is the L∞ norm for P1 functions.
    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Nodal interpolant `I_h u`.
pub fn interpolate(mesh: &Arc<SimplexMesh>, u: impl Fn(&Point) -> f64) -> FeFunction {
    let coefficients = mesh.vertices().iter().map(u).collect();
    FeFunction {
        mesh: mesh.clone(),
        coefficients,
    }
}

/// Physical coordinates of a barycentric point in cell `c`.
pub fn map_to_physical(mesh: &SimplexMesh, c: usize, bary: &[f64]) -> Point {
    let mut x = [0.0; 3];
    for (&v, l) in mesh.cell(c).iter().zip(bary) {
        let p = mesh.vertex(v);
        for k in 0..3 {
            x[k] += l * p[k];
        }
    }
    x
}
