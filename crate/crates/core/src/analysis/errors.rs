use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::fem::{map_to_physical, quadrature_rule, FeFunction};
use crate::mesh::Point;

const ERROR_QUADRATURE_DEGREE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorTriple {
    /// `‖∇(u - u_h)‖_{L²}`
    pub h1_semi: f64,
    pub l2: f64,
    /// Maximum of `|u - u_h|` over quadrature points and vertices.
    pub linf: f64,
}

/// Errors of `u_h` against an exact solution and its gradient.
pub fn error_norms<U, G>(u_h: &FeFunction, exact: U, exact_grad: G) -> Result<ErrorTriple, AnalysisError>
where
    U: Fn(&Point) -> f64 + Sync,
    G: Fn(&Point) -> Point + Sync,
{
    let mesh = u_h.mesh();
    let dim = mesh.dim();
    let rule = quadrature_rule(dim, ERROR_QUADRATURE_DEGREE)?;
    let parts: Vec<(f64, f64, f64)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let geom = mesh.cell_geometry(c);
            let grad_h = u_h.gradient_in_cell(c, &geom);
            let (mut h1, mut l2, mut linf) = (0.0, 0.0, 0.0_f64);
            for (bary, w) in rule.points.iter().zip(rule.scaled_weights(geom.volume)) {
                let x = map_to_physical(mesh, c, bary);
                let e = exact(&x) - u_h.eval_in_cell(c, bary);
                let g = exact_grad(&x);
                let ge: f64 = (0..dim).map(|k| (g[k] - grad_h[k]).powi(2)).sum();
                h1 += w * ge;
                l2 += w * e * e;
                linf = linf.max(e.abs());
            }
            (h1, l2, linf)
        })
        .collect();
    let vertex_max = mesh
        .vertices()
        .iter()
        .zip(u_h.coefficients())
        .fold(0.0_f64, |m, (x, c)| m.max((exact(x) - c).abs()));
    let (h1, l2, linf) = parts
        .iter()
        .fold((0.0, 0.0, vertex_max), |(a, b, m), (h, l, i)| (a + h, b + l, m.max(*i)));
    Ok(ErrorTriple {
        h1_semi: h1.sqrt(),
        l2: l2.sqrt(),
        linf,
    })
}

/// `‖f‖_{L²}` over the mesh with a quadrature rule of the given degree.
pub fn l2_norm_of<F>(mesh: &crate::mesh::SimplexMesh, f: F, degree: usize) -> Result<f64, AnalysisError>
where
    F: Fn(&Point) -> f64 + Sync,
{
    let rule = quadrature_rule(mesh.dim(), degree)?;
    let parts: Vec<f64> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let vol = mesh.cell_geometry(c).volume;
            rule.points
                .iter()
                .zip(rule.scaled_weights(vol))
                .map(|(b, w)| w * f(&map_to_physical(mesh, c, b)).powi(2))
                .sum()
        })
        .collect();
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Observed orders `log(e_{k-1}/e_k) / log(h_{k-1}/h_k)`; `None` where an
/// error or mesh-size ratio makes the rate undefined.
pub fn eoc(errors: &[f64], h: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), h.len(), "errors and mesh sizes must pair up");
    errors
        .windows(2)
        .zip(h.windows(2))
        .map(|(e, hh)| {
            if !(e[0] > 0.0 && e[1] > 0.0 && hh[0] > 0.0 && hh[1] > 0.0) || hh[0] == hh[1] {
                return None;
            }
            Some((e[0] / e[1]).ln() / (hh[0] / hh[1]).ln())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate;
    use crate::mesh::{build_structured_mesh, uniform_refine, Domain, SimplexMesh};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sine(x: &Point) -> f64 {
        (PI * x[0]).sin() * (PI * x[1]).sin()
    }

    fn sine_grad(x: &Point) -> Point {
        [
            PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
            PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
            0.0,
        ]
    }

    #[test]
    fn affine_functions_are_reproduced() {
        for mesh in [
            build_structured_mesh(Domain::UnitSquare, 3, 0.75).unwrap(),
            build_structured_mesh(Domain::UnitCube, 2, 0.75).unwrap(),
        ] {
            let mesh = Arc::new(mesh);
            let u = |x: &Point| 1.0 + 2.0 * x[0] - 0.5 * x[1] + 0.25 * x[2];
            let uh = interpolate(&mesh, u);
            let e = error_norms(&uh, u, |_| [2.0, -0.5, 0.25]).unwrap();
            assert!(e.h1_semi <= 1e-12 && e.l2 <= 1e-12 && e.linf <= 1e-12, "{e:?}");
        }
    }

    #[test]
    fn zero_approximation_of_sine() {
        let mesh = Arc::new(build_structured_mesh(Domain::UnitSquare, 8, 0.0).unwrap());
        let e = error_norms(&FeFunction::zero(mesh.clone()), sine, sine_grad).unwrap();
        // ∫ sin²(πx) sin²(πy) = 1/4; quadrature of degree 6 is close on h = 1/8
        assert!((e.l2 - 0.5).abs() < 1e-4, "{}", e.l2);
        assert!((e.linf - 1.0).abs() < 1e-12);
        assert!((e.h1_semi - PI / 2.0_f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn interpolation_rates() {
        let mut mesh = build_structured_mesh(Domain::UnitSquare, 4, 0.0).unwrap();
        let (mut h1, mut l2, mut hs) = (vec![], vec![], vec![]);
        for _ in 0..4 {
            let m = Arc::new(mesh.clone());
            let e = error_norms(&interpolate(&m, sine), sine, sine_grad).unwrap();
            h1.push(e.h1_semi);
            l2.push(e.l2);
            hs.push(1.0 / ((m.n_vertices() as f64).sqrt() - 1.0));
            mesh = uniform_refine(&mesh);
        }
        for r in eoc(&h1, &hs) {
            assert!((r.unwrap() - 1.0).abs() < 0.1);
        }
        for r in eoc(&l2, &hs) {
            assert!((r.unwrap() - 2.0).abs() < 0.1);
        }
    }

    #[test]
    fn eoc_examples() {
        assert_eq!(eoc(&[1.0, 0.25], &[1.0, 0.5]), vec![Some(2.0)]);
        assert_eq!(eoc(&[1.0, 0.5], &[1.0, 0.5]), vec![Some(1.0)]);
        assert_eq!(eoc(&[0.3, 0.3], &[1.0, 0.5]), vec![Some(0.0)]);
        assert_eq!(eoc(&[1.0, 0.0, 1.0], &[1.0, 0.5, 0.25]), vec![None, None]);
        assert_eq!(eoc(&[1.0, -1.0], &[1.0, 0.5]), vec![None]);
    }

    #[test]
    fn l2_norm_of_constant() {
        let mesh: SimplexMesh = build_structured_mesh(Domain::UnitCube, 2, 0.0).unwrap();
        assert!((l2_norm_of(&mesh, |_| 3.0, 2).unwrap() - 3.0).abs() < 1e-13);
    }
}
