//! Global assembly of P1 operators and vectors.
//!
//! Cell contributions are computed in parallel and scattered sequentially in
//! cell order, so every result is bitwise reproducible regardless of the
//! thread count.

use rayon::prelude::*;

use super::{quadrature_rule, CsrMatrix, DiffusionTensor, FeFunction, FemError, Nonlinearity};
use crate::fem::function::map_to_physical;
use crate::mesh::{geometry::dot, Point, SimplexMesh};

/// A quadrature point handed to weight callbacks.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint<'a> {
    pub cell: usize,
    pub bary: &'a [f64; 4],
    pub x: Point,
}

type LocalMatrix = [[f64; 4]; 4];

fn scatter_matrix(mesh: &SimplexMesh, locals: Vec<LocalMatrix>) -> CsrMatrix {
    let mut a = CsrMatrix::with_mesh_pattern(mesh);
    for (c, local) in locals.into_iter().enumerate() {
        let cell = mesh.cell(c);
        for (i, &vi) in cell.iter().enumerate() {
            for (j, &vj) in cell.iter().enumerate() {
                a.add(vi, vj, local[i][j]);
            }
        }
    }
    a
}

fn scatter_vector(mesh: &SimplexMesh, locals: Vec<[f64; 4]>) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_vertices()];
    for (c, local) in locals.into_iter().enumerate() {
        for (i, &v) in mesh.cell(c).iter().enumerate() {
            out[v] += local[i];
        }
    }
    out
}

/// `A_ij = ∫ D ∇φ_j · ∇φ_i`.
pub fn assemble_stiffness(mesh: &SimplexMesh, diffusion: &DiffusionTensor) -> CsrMatrix {
    let dim = mesh.dim();
    let locals: Vec<LocalMatrix> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let geom = mesh.cell_geometry(c);
            let g = &geom.barycentric_gradients;
            let mut local = [[0.0; 4]; 4];
            for i in 0..=dim {
                for j in 0..=dim {
                    local[i][j] = geom.volume * diffusion.apply(&g[j], &g[i]);
                }
            }
            local
        })
        .collect();
    scatter_matrix(mesh, locals)
}

/// `M_ij = ∫ w φ_i φ_j` with a quadrature rule exact to `degree`.
pub fn assemble_weighted_mass<W>(mesh: &SimplexMesh, degree: usize, weight: W) -> Result<CsrMatrix, FemError>
where
    W: Fn(&QuadPoint) -> f64 + Sync,
{
    let dim = mesh.dim();
    let rule = quadrature_rule(dim, degree)?;
    let locals: Vec<LocalMatrix> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let volume = mesh.cell_geometry(c).volume;
            let mut local = [[0.0; 4]; 4];
            for (bary, w) in rule.points.iter().zip(rule.scaled_weights(volume)) {
                let q = QuadPoint {
                    cell: c,
                    bary,
                    x: map_to_physical(mesh, c, bary),
                };
                let ww = w * weight(&q);
                for i in 0..=dim {
                    for j in 0..=dim {
                        local[i][j] += ww * bary[i] * bary[j];
                    }
                }
            }
            local
        })
        .collect();
    Ok(scatter_matrix(mesh, locals))
}

/// `F_i = ∫ g φ_i` for an integrand evaluated at quadrature points.
pub fn assemble_functional<G>(mesh: &SimplexMesh, degree: usize, integrand: G) -> Result<Vec<f64>, FemError>
where
    G: Fn(&QuadPoint) -> f64 + Sync,
{
    let dim = mesh.dim();
    let rule = quadrature_rule(dim, degree)?;
    let locals: Vec<[f64; 4]> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let volume = mesh.cell_geometry(c).volume;
            let mut local = [0.0; 4];
            for (bary, w) in rule.points.iter().zip(rule.scaled_weights(volume)) {
                let q = QuadPoint {
                    cell: c,
                    bary,
                    x: map_to_physical(mesh, c, bary),
                };
                let val = w * integrand(&q);
                for i in 0..=dim {
                    local[i] += val * bary[i];
                }
            }
            local
        })
        .collect();
    Ok(scatter_vector(mesh, locals))
}

/// `F_i = ∫ f φ_i`.
pub fn assemble_load<F>(mesh: &SimplexMesh, f: F, degree: usize) -> Result<Vec<f64>, FemError>
where
    F: Fn(&Point) -> f64 + Sync,
{
    assemble_functional(mesh, degree, |q| f(&q.x))
}

#[derive(Debug, Clone)]
pub struct NonlinearTerm {
    pub values: Vec<f64>,
    /// Set when the rule cannot integrate a degree-`n` polynomial nonlinearity exactly.
    pub underintegrated: bool,
}

/// `N_i = ∫ b(u_h) φ_i`.
pub fn assemble_nonlinear_term(
    mesh: &SimplexMesh,
    b: &Nonlinearity,
    u_h: &FeFunction,
    degree: usize,
) -> Result<NonlinearTerm, FemError> {
    let needed = b.growth_order as usize + 1;
    let underintegrated = degree < needed;
    if underintegrated {
        log::warn!(
            "nonlinear term for {} integrated with degree {degree} < {needed}",
            b.name
        );
    }
    let values = assemble_functional(mesh, degree, |q| b.eval(u_h.eval_in_cell(q.cell, q.bary)))?;
    Ok(NonlinearTerm {
        values,
        underintegrated,
    })
}

/// Jacobian block `∫ b'(u_h) φ_i φ_j`.
pub fn assemble_nonlinear_jacobian(
    mesh: &SimplexMesh,
    b: &Nonlinearity,
    u_h: &FeFunction,
    degree: usize,
) -> Result<CsrMatrix, FemError> {
    assemble_weighted_mass(mesh, degree, |q| b.eval_derivative(u_h.eval_in_cell(q.cell, q.bary)))
}

/// `∫ |∇v|²` for a P1 function, independent of any diffusion tensor.
pub fn gradient_norm_sq(v: &FeFunction) -> f64 {
    let mesh = v.mesh();
    let parts: Vec<f64> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let geom = mesh.cell_geometry(c);
            let g = v.gradient_in_cell(c, &geom);
            geom.volume * dot(&g, &g)
        })
        .collect();
    parts.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate;
    use crate::mesh::{build_structured_mesh, geometry::factorial, Domain};
    use std::sync::Arc;

    fn reference_triangle() -> Arc<SimplexMesh> {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        Arc::new(SimplexMesh::new(2, v, vec![[0, 1, 2, usize::MAX]]).unwrap())
    }

    /// ∫_T λ0^a λ1^b λ2^c = a! b! c! 2|T| / (a + b + c + 2)!
    fn bary_monomial(a: usize, b: usize, c: usize, area: f64) -> f64 {
        factorial(a) * factorial(b) * factorial(c) * 2.0 * area / factorial(a + b + c + 2)
    }

    #[test]
    fn reference_stiffness() {
        let mesh = reference_triangle();
        let a = assemble_stiffness(&mesh, &DiffusionTensor::identity(2));
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        let a2 = assemble_stiffness(&mesh, &DiffusionTensor::scaled_identity(2, 2.0));
        for i in 0..3 {
            for j in 0..3 {
                assert!((a2.get(i, j) - 2.0 * expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stiffness_kills_constants_and_is_symmetric() {
        for mesh in [
            build_structured_mesh(Domain::UnitSquare, 5, 0.75).unwrap(),
            build_structured_mesh(Domain::UnitCube, 3, 0.75).unwrap(),
        ] {
            let a = assemble_stiffness(&mesh, &DiffusionTensor::identity(mesh.dim()));
            let r = a.mul_vec(&vec![1.0; mesh.n_vertices()]);
            assert!(r.iter().all(|x| x.abs() < 1e-12));
            assert!(a.symmetry_defect() <= 1e-12 * a.max_abs());
        }
    }

    #[test]
    fn reference_mass_matrix() {
        let mesh = reference_triangle();
        let m = assemble_weighted_mass(&mesh, 2, |_| 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { 1.0 } / 24.0;
                assert!((m.get(i, j) - expect).abs() < 1e-15);
            }
        }
        let zero = assemble_weighted_mass(&mesh, 2, |_| 0.0).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let three = assemble_weighted_mass(&mesh, 2, |_| 3.0).unwrap();
        assert!((three.get(0, 0) - 3.0 * m.get(0, 0)).abs() < 1e-15);
    }

    #[test]
    fn mass_matrix_closed_form_on_tetrahedra() {
        let mesh = build_structured_mesh(Domain::UnitCube, 1, 0.0).unwrap();
        let m = assemble_weighted_mass(&mesh, 2, |_| 1.0).unwrap();
        let mut expect = CsrMatrix::with_mesh_pattern(&mesh);
        for c in 0..mesh.n_cells() {
            let vol = mesh.cell_geometry(c).volume;
            for (i, &vi) in mesh.cell(c).iter().enumerate() {
                for (j, &vj) in mesh.cell(c).iter().enumerate() {
                    expect.add(vi, vj, vol * (1.0 + (i == j) as u8 as f64) / 20.0);
                }
            }
        }
        let diff = m.add_scaled(-1.0, &expect);
        assert!(diff.max_abs() < 1e-15);
    }

    #[test]
    fn load_vector() {
        let mesh = build_structured_mesh(Domain::UnitSquare, 1, 0.0).unwrap();
        let zero = assemble_load(&mesh, |_| 0.0, 1).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
        let ones = assemble_load(&mesh, |_| 1.0, 1).unwrap();
        // vertex 1 = (1, 0) lies in a single triangle of area 1/2
        assert!((ones[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!((ones.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_term_paths() {
        let mesh = Arc::new(build_structured_mesh(Domain::UnitSquare, 3, 0.75).unwrap());
        let zero = FeFunction::zero(mesh.clone());
        let n = assemble_nonlinear_term(&mesh, &Nonlinearity::power(11), &zero, 12).unwrap();
        assert!(n.values.iter().all(|v| *v == 0.0));
        assert!(!n.underintegrated);

        // b(s) = s must match the mass matrix applied to the coefficients
        let uh = interpolate(&mesh, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let lin = assemble_nonlinear_term(&mesh, &Nonlinearity::power(1), &uh, 2).unwrap();
        let mass = assemble_weighted_mass(&mesh, 2, |_| 1.0).unwrap();
        let mu = mass.mul_vec(uh.coefficients());
        for (a, b) in lin.values.iter().zip(&mu) {
            assert!((a - b).abs() < 1e-12);
        }

        let low = assemble_nonlinear_term(&mesh, &Nonlinearity::power(5), &uh, 4).unwrap();
        assert!(low.underintegrated);
    }

    #[test]
    fn quintic_against_barycentric_monomials() {
        let mesh = reference_triangle();
        let mut coeffs = vec![0.0; 3];
        coeffs[1] = 1.0; // u_h = λ1
        let uh = FeFunction::new(mesh.clone(), coeffs).unwrap();
        let n = assemble_nonlinear_term(&mesh, &Nonlinearity::power(5), &uh, 6).unwrap();
        let expect = [
            bary_monomial(1, 5, 0, 0.5),
            bary_monomial(0, 6, 0, 0.5),
            bary_monomial(0, 5, 1, 0.5),
        ];
        for i in 0..3 {
            assert!((n.values[i] - expect[i]).abs() < 1e-15, "{i}");
        }
    }
}
