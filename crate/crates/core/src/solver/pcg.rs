use super::SolverError;
use crate::fem::CsrMatrix;

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final `‖A x - b‖₂` (recomputed, not the recursive estimate).
    pub residual_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for an SPD system.
///
/// Stops once `‖r‖₂ ≤ tol ‖b‖₂`. A non-positive diagonal entry or curvature
/// `pᵀAp ≤ 0` is reported as a breakdown.
pub fn pcg_solve(a: &CsrMatrix, rhs: &[f64], tol: f64, maxit: usize) -> Result<PcgOutcome, SolverError> {
    let n = a.dim();
    assert_eq!(rhs.len(), n, "rhs length must match the matrix dimension");
    let b_norm = dot(rhs, rhs).sqrt();
    if b_norm == 0.0 {
        return Ok(PcgOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            residual_norm: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if d > 0.0 {
                Ok(1.0 / d)
            } else {
                Err(SolverError::Breakdown {
                    iteration: 0,
                    reason: format!("non-positive diagonal entry {d} in row {i}"),
                })
            }
        })
        .collect::<Result<_, _>>()?;

    let target = tol * b_norm;
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 1..=maxit {
        a.mul_vec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(SolverError::Breakdown {
                iteration: it,
                reason: format!("non-positive curvature pᵀAp = {curvature:e}"),
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= target {
            let residual_norm = true_residual(a, &x, rhs);
            return Ok(PcgOutcome {
                solution: x,
                iterations: it,
                residual_norm,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = true_residual(a, &x, rhs);
    Err(SolverError::NotConverged {
        iterations: maxit,
        residual,
        best: x,
    })
}

fn true_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}
