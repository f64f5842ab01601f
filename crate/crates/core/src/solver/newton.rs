use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{pcg_solve, SolverError};
use crate::fem::{
    apply_dirichlet, assemble_load, assemble_nonlinear_jacobian, assemble_nonlinear_term, assemble_stiffness,
    CsrMatrix, FeFunction, ProblemSpec, MAX_DEGREE_2D, MAX_DEGREE_3D,
};
use crate::mesh::SimplexMesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    pub abs_tol: f64,
    pub max_iters: usize,
    /// Step shrink factor of the line search.
    pub damping: f64,
    pub max_halvings: usize,
    pub linear_tol: f64,
    /// Defaults to `10 * n_dofs` when unset.
    pub linear_maxit: Option<usize>,
    /// Defaults to [`default_quadrature_degree`] when unset.
    pub quadrature_degree: Option<usize>,
    pub verbose: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_iters: 50,
            damping: 0.5,
            max_halvings: 30,
            linear_tol: 1e-12,
            linear_maxit: None,
            quadrature_degree: None,
            verbose: false,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.into()));
        if !(self.abs_tol > 0.0) || !(self.linear_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad("damping must lie in (0, 1)");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.linear_maxit == Some(0) {
            return bad("linear_maxit must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub solution: FeFunction,
    pub iterations: usize,
    /// `‖r‖_∞` of the initial guess and of every accepted iterate.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub linear_iterations: usize,
}

/// Quadrature degree `n + 1`, which integrates `b(u_h) φ_i` and
/// `b'(u_h) φ_i φ_j` exactly for a degree-`n` polynomial `b`, capped at the
/// highest available rule.
pub fn default_quadrature_degree(dim: usize, growth_order: u32) -> usize {
    let max = if dim == 2 { MAX_DEGREE_2D } else { MAX_DEGREE_3D };
    (growth_order as usize + 1).clamp(2, max)
}

struct DiscreteSystem<'a> {
    spec: &'a ProblemSpec,
    mesh: &'a Arc<SimplexMesh>,
    stiffness: CsrMatrix,
    load: Vec<f64>,
    degree: usize,
}

impl<'a> DiscreteSystem<'a> {
    fn new(spec: &'a ProblemSpec, mesh: &'a Arc<SimplexMesh>, degree: usize) -> Result<Self, SolverError> {
        let stiffness = assemble_stiffness(mesh, &spec.diffusion);
        let source = &spec.source;
        let load = assemble_load(mesh, |x| source(x), degree)?;
        Ok(Self {
            spec,
            mesh,
            stiffness,
            load,
            degree,
        })
    }

    fn residual(&self, u: &FeFunction) -> Result<Vec<f64>, SolverError> {
        let n = assemble_nonlinear_term(self.mesh, &self.spec.nonlinearity, u, self.degree)?;
        let mut r = self.stiffness.mul_vec(u.coefficients());
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = if self.mesh.is_boundary(i) {
                0.0
            } else {
                *ri + n.values[i] - self.load[i]
            };
        }
        Ok(r)
    }

    fn jacobian(&self, u: &FeFunction) -> Result<CsrMatrix, SolverError> {
        let jn = assemble_nonlinear_jacobian(self.mesh, &self.spec.nonlinearity, u, self.degree)?;
        Ok(self.stiffness.add_scaled(1.0, &jn))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `A u + N(u) - F` at interior dofs, zero at boundary dofs.
pub fn residual(spec: &ProblemSpec, mesh: &Arc<SimplexMesh>, u_h: &FeFunction) -> Result<Vec<f64>, SolverError> {
    residual_with_degree(
        spec,
        mesh,
        u_h,
        default_quadrature_degree(mesh.dim(), spec.nonlinearity.growth_order),
    )
}

pub fn residual_with_degree(
    spec: &ProblemSpec,
    mesh: &Arc<SimplexMesh>,
    u_h: &FeFunction,
    degree: usize,
) -> Result<Vec<f64>, SolverError> {
    DiscreteSystem::new(spec, mesh, degree)?.residual(u_h)
}

/// Damped Newton from the boundary-lifted zero guess.
pub fn newton_solve(
    spec: &ProblemSpec,
    mesh: &Arc<SimplexMesh>,
    config: &NewtonConfig,
) -> Result<NewtonResult, SolverError> {
    config.validate()?;
    spec.validate_on(mesh)?;
    let degree = config
        .quadrature_degree
        .unwrap_or_else(|| default_quadrature_degree(mesh.dim(), spec.nonlinearity.growth_order));
    let system = DiscreteSystem::new(spec, mesh, degree)?;
    let n = mesh.n_vertices();
    let linear_maxit = config.linear_maxit.unwrap_or(10 * n.max(1));

    let g = &spec.dirichlet;
    let initial: Vec<f64> = (0..n)
        .map(|v| if mesh.is_boundary(v) { g(mesh.vertex(v)) } else { 0.0 })
        .collect();
    let mut u = FeFunction::new(mesh.clone(), initial)?;
    let mut r = system.residual(&u)?;
    let mut r_norm = inf_norm(&r);
    let mut history = vec![r_norm];
    let mut linear_iterations = 0;
    if config.verbose {
        eprintln!("iter 0 residual {r_norm:e}");
    }

    for k in 1..=config.max_iters {
        if r_norm <= config.abs_tol {
            return Ok(NewtonResult {
                solution: u,
                iterations: k - 1,
                residual_history: history,
                converged: true,
                linear_iterations,
            });
        }
        let jac = system.jacobian(&u)?;
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let (jac, rhs) = apply_dirichlet(&jac, &neg_r, mesh, |_| 0.0);
        let step = pcg_solve(&jac, &rhs, config.linear_tol, linear_maxit).map_err(|e| SolverError::Jacobian {
            newton_iteration: k - 1,
            source: Box::new(e),
        })?;
        linear_iterations += step.iterations;

        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let trial: Vec<f64> = u
                .coefficients()
                .iter()
                .zip(&step.solution)
                .map(|(a, d)| a + s * d)
                .collect();
            let trial = FeFunction::new(mesh.clone(), trial)?;
            let r_trial = system.residual(&trial)?;
            let norm = inf_norm(&r_trial);
            if norm < r_norm {
                accepted = Some((trial, r_trial, norm));
                break;
            }
            s *= config.damping;
        }
        let Some((trial, r_trial, norm)) = accepted else {
            return Err(SolverError::LineSearch {
                iteration: k,
                history,
                last: u.into_coefficients(),
            });
        };
        u = trial;
        r = r_trial;
        r_norm = norm;
        history.push(r_norm);
        if config.verbose {
            eprintln!("iter {k} residual {r_norm:e}");
        }
    }
    if r_norm <= config.abs_tol {
        return Ok(NewtonResult {
            solution: u,
            iterations: config.max_iters,
            residual_history: history,
            converged: true,
            linear_iterations,
        });
    }
    Err(SolverError::Diverged {
        iterations: config.max_iters,
        history,
        last: u.into_coefficients(),
    })
}
