use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AnalysisError;
use crate::fem::{
    assemble_functional, assemble_stiffness, map_to_physical, quadrature_rule, CsrMatrix, DiffusionTensor, FeFunction,
    Nonlinearity, MAX_DEGREE_2D, MAX_DEGREE_3D,
};
use crate::mesh::Point;

/// Empirical local-Lipschitz ratio
/// `max_v |(b(u) - b(u_h), v)| / (‖∇(u - u_h)‖ ‖∇v‖)`
/// over `n_samples` seeded random P1 functions `v` vanishing on the boundary.
///
/// Integrals use a rule of degree `n + 2` (capped at the highest available).
pub fn lipschitz_probe<U, G>(
    b: &Nonlinearity,
    u_exact: U,
    grad_exact: G,
    u_h: &FeFunction,
    n_samples: usize,
    seed: u64,
) -> Result<f64, AnalysisError>
where
    U: Fn(&Point) -> f64 + Sync,
    G: Fn(&Point) -> Point + Sync,
{
    if n_samples == 0 {
        return Err(AnalysisError::InvalidInput("lipschitz_probe needs at least one sample".into()));
    }
    let mesh = u_h.mesh();
    let dim = mesh.dim();
    let max = if dim == 2 { MAX_DEGREE_2D } else { MAX_DEGREE_3D };
    let degree = (b.growth_order as usize + 2).min(max);

    let rule = quadrature_rule(dim, degree)?;
    let mut grad_err_sq = 0.0;
    for c in 0..mesh.n_cells() {
        let geom = mesh.cell_geometry(c);
        let gh = u_h.gradient_in_cell(c, &geom);
        for (bary, w) in rule.points.iter().zip(rule.scaled_weights(geom.volume)) {
            let g = grad_exact(&map_to_physical(mesh, c, bary));
            grad_err_sq += w * (0..dim).map(|k| (g[k] - gh[k]).powi(2)).sum::<f64>();
        }
    }
    let grad_err = grad_err_sq.sqrt();
    if grad_err == 0.0 {
        return Ok(0.0);
    }

    // w_i = (b(u) - b(u_h), φ_i), so (b(u) - b(u_h), v) = w · v
    let w = assemble_functional(mesh, degree, |q| b.eval(u_exact(&q.x)) - b.eval(u_h.eval_in_cell(q.cell, q.bary)))?;
    let stiffness = assemble_stiffness(mesh, &DiffusionTensor::identity(dim));
    let interior: Vec<usize> = (0..mesh.n_vertices()).filter(|&v| !mesh.is_boundary(v)).collect();
    if interior.is_empty() {
        return Ok(0.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0.0; mesh.n_vertices()];
    let mut best = 0.0_f64;
    for _ in 0..n_samples {
        for &i in &interior {
            v[i] = rng.gen_range(-1.0..1.0);
        }
        best = best.max(ratio(&w, &stiffness, &interior, grad_err, &v));
    }
    Ok(best)
}

/// `|w · v| / (grad_err ‖∇v‖)` for `v` supported on `interior`.
fn ratio(w: &[f64], stiffness: &CsrMatrix, interior: &[usize], grad_err: f64, v: &[f64]) -> f64 {
    let av = stiffness.mul_vec(v);
    let grad_v = interior.iter().map(|&i| v[i] * av[i]).sum::<f64>().sqrt();
    if grad_v == 0.0 {
        return 0.0;
    }
    let pairing: f64 = interior.iter().map(|&i| w[i] * v[i]).sum();
    pairing.abs() / (grad_err * grad_v)
}
