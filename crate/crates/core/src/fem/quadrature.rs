//! Fully symmetric, positive-weight quadrature on the reference triangle and tetrahedron.
//!
//! Rules are collapsed (conical) Gauss–Jacobi products symmetrised over all
//! permutations of the barycentric coordinates. Symmetrisation keeps the
//! polynomial exactness of the product rule (the space of polynomials of a
//! given total degree is invariant under vertex permutations) and keeps
//! every weight positive.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use super::FemError;
use crate::mesh::geometry::factorial;

pub const MAX_DEGREE_2D: usize = 12;
pub const MAX_DEGREE_3D: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    /// Barycentric coordinates `(λ0, ..., λd)` of each point; unused slots are zero.
    pub points: Vec<[f64; 4]>,
    /// Weights on the reference simplex; they sum to `1/d!`.
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reference-simplex weights scaled to a cell of the given volume.
    pub fn scaled_weights(&self, volume: f64) -> impl Iterator<Item = f64> + '_ {
        let scale = factorial(self.dim) * volume;
        self.weights.iter().map(move |w| w * scale)
    }
}

/// Gauss–Jacobi rule with `m` points for `∫_0^1 (1-x)^a g(x) dx`.
pub(crate) fn gauss_jacobi_unit(m: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let (alpha, beta) = (a, 0.0);
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for n in 0..m {
        let nf = n as f64;
        let s = 2.0 * nf + alpha + beta;
        jac[(n, n)] = if n == 0 {
            (beta - alpha) / (alpha + beta + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        if n + 1 < m {
            let k = nf + 1.0;
            let s = 2.0 * k + alpha + beta;
            let num = 4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jac[(n, n + 1)] = off;
            jac[(n + 1, n)] = off;
        }
    }
    // μ0 = ∫_{-1}^{1} (1-t)^α dt = 2^{α+1}/(α+1); mapping to [0,1] scales by 2^{-α-1}.
    let mu0_unit = 1.0 / (alpha + 1.0);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let t = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (1.0 + t), mu0_unit * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

fn conical_product(dim: usize, m: usize) -> Vec<([f64; 4], f64)> {
    let (x1, w1) = gauss_jacobi_unit(m, (dim - 1) as f64);
    let (x2, w2) = gauss_jacobi_unit(m, (dim - 2) as f64);
    let mut out = Vec::new();
    if dim == 2 {
        for (a, wa) in x1.iter().zip(&w1) {
            for (b, wb) in x2.iter().zip(&w2) {
                let (x, y) = (*a, b * (1.0 - a));
                out.push(([1.0 - x - y, x, y, 0.0], wa * wb));
            }
        }
    } else {
        let (x3, w3) = gauss_jacobi_unit(m, 0.0);
        for (a, wa) in x1.iter().zip(&w1) {
            for (b, wb) in x2.iter().zip(&w2) {
                for (c, wc) in x3.iter().zip(&w3) {
                    let x = *a;
                    let y = b * (1.0 - a);
                    let z = c * (1.0 - a) * (1.0 - b);
                    out.push(([1.0 - x - y - z, x, y, z], wa * wb * wc));
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Replaces barycentric coordinates that agree to 1e-12 by their mean so that
/// permuted copies of the point coincide bitwise and merge.
fn snap_coincident(bary: &mut [f64]) {
    let n = bary.len();
    let mut group = vec![usize::MAX; n];
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        for j in i + 1..n {
            if group[j] == usize::MAX && (bary[i] - bary[j]).abs() < 1e-12 {
                group[j] = i;
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == g).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| bary[k]).sum::<f64>() / members.len() as f64;
            members.iter().for_each(|&k| bary[k] = mean);
        }
    }
}

fn build_rule(dim: usize, degree: usize) -> QuadratureRule {
    let m = degree / 2 + 1;
    let perms = permutations(dim + 1);
    let share = 1.0 / perms.len() as f64;
    let mut raw: Vec<([f64; 4], f64)> = Vec::new();
    for (mut bary, w) in conical_product(dim, m) {
        snap_coincident(&mut bary[..=dim]);
        for p in &perms {
            let mut q = [0.0; 4];
            for (k, &src) in p.iter().enumerate() {
                q[k] = bary[src];
            }
            raw.push((q, w * share));
        }
    }
    raw.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut points: Vec<[f64; 4]> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (q, w) in raw {
        if points.last() == Some(&q) {
            *weights.last_mut().unwrap() += w;
        } else {
            points.push(q);
            weights.push(w);
        }
    }
    QuadratureRule {
        dim,
        points,
        weights,
        exactness_degree: 2 * m - 1,
    }
}

/// Symmetric positive rule on the reference simplex, exact for total degree `degree`.
pub fn quadrature_rule(dim: usize, degree: usize) -> Result<Arc<QuadratureRule>, FemError> {
    let max = match dim {
        2 => MAX_DEGREE_2D,
        3 => MAX_DEGREE_3D,
        _ => return Err(FemError::UnsupportedQuadrature { dim, degree }),
    };
    if degree == 0 || degree > max {
        return Err(FemError::UnsupportedQuadrature { dim, degree });
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    Ok(guard
        .entry((dim, degree))
        .or_insert_with(|| Arc::new(build_rule(dim, degree)))
        .clone())
}
