use super::CsrMatrix;
use crate::mesh::{Point, SimplexMesh};

/// Imposes `u = g` at boundary vertices.
///
/// Boundary rows become identity rows with `rhs_i = g(x_i)`; the boundary
/// columns of interior rows are eliminated into the right-hand side, so the
/// returned operator stays symmetric.
pub fn apply_dirichlet(
    a: &CsrMatrix,
    rhs: &[f64],
    mesh: &SimplexMesh,
    g: impl Fn(&Point) -> f64,
) -> (CsrMatrix, Vec<f64>) {
    let n = mesh.n_vertices();
    assert_eq!(a.dim(), n);
    assert_eq!(rhs.len(), n);
    let values: Vec<f64> = (0..n)
        .map(|v| if mesh.is_boundary(v) { g(mesh.vertex(v)) } else { 0.0 })
        .collect();
    let mut out = a.clone();
    let mut b = rhs.to_vec();
    for i in 0..n {
        if mesh.is_boundary(i) {
            out.set_identity_row(i);
            b[i] = values[i];
            continue;
        }
        let (cols, vals) = out.row_entries_mut(i);
        for (&j, v) in cols.iter().zip(vals.iter_mut()) {
            if mesh.is_boundary(j) {
                b[i] -= *v * values[j];
                *v = 0.0;
            }
        }
    }
    (out, b)
}
