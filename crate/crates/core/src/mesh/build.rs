use serde::{Deserialize, Serialize};

use super::{signed_volume, MeshError, Point, SimplexMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    UnitSquare,
    UnitCube,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::UnitSquare => 2,
            Domain::UnitCube => 3,
        }
    }

    pub fn for_dim(dim: usize) -> Result<Self, MeshError> {
        match dim {
            2 => Ok(Domain::UnitSquare),
            3 => Ok(Domain::UnitCube),
            d => Err(MeshError::Dimension(d)),
        }
    }
}

/// Structured triangulation of the unit square (two triangles per grid
/// square) or unit cube (six Kuhn tetrahedra per grid cube).
///
/// A positive `shear` produces a poor-quality mesh of the same domain:
/// on every odd grid row (`y` index odd) the vertices off the faces `x = 0`
/// and `x = 1` are shifted by `shear / n` along `x`. Vertices only slide
/// within their own face, so the domain is still the unit square or cube.
/// `shear = 0.75` gives minimum and maximum angles of about 8.1° and 126.9°
/// in 2D, and the same dihedral extremes in 3D.
pub fn build_structured_mesh(domain: Domain, n: usize, shear: f64) -> Result<SimplexMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::EmptyGrid);
    }
    if !shear.is_finite() || shear < 0.0 {
        return Err(MeshError::InvalidShear(shear));
    }
    let dim = domain.dim();
    let np = n + 1;
    let h = 1.0 / n as f64;
    let shift = |i: usize, j: usize| -> f64 {
        if j % 2 == 1 && i > 0 && i < n {
            shear * h
        } else {
            0.0
        }
    };

    let mut plain: Vec<Point> = Vec::new();
    let mut sheared: Vec<Point> = Vec::new();
    let mut cells: Vec<[usize; 4]> = Vec::new();
    match dim {
        2 => {
            for j in 0..np {
                for i in 0..np {
                    let (x, y) = (i as f64 * h, j as f64 * h);
                    plain.push([x, y, 0.0]);
                    sheared.push([x + shift(i, j), y, 0.0]);
                }
            }
            let idx = |i: usize, j: usize| j * np + i;
            for j in 0..n {
                for i in 0..n {
                    let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                    cells.push([a, b, c, usize::MAX]);
                    cells.push([a, c, d, usize::MAX]);
                }
            }
        }
        _ => {
            for k in 0..np {
                for j in 0..np {
                    for i in 0..np {
                        let (x, y, z) = (i as f64 * h, j as f64 * h, k as f64 * h);
                        plain.push([x, y, z]);
                        sheared.push([x + shift(i, j), y, z]);
                    }
                }
            }
            let idx = |p: [usize; 3]| (p[2] * np + p[1]) * np + p[0];
            const AXIS_ORDERS: [[usize; 3]; 6] =
                [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        for order in AXIS_ORDERS {
                            let mut p = [i, j, k];
                            let mut cell = [idx(p); 4];
                            for (slot, axis) in order.into_iter().enumerate() {
                                p[axis] += 1;
                                cell[slot + 1] = idx(p);
                            }
                            cells.push(cell);
                        }
                    }
                }
            }
        }
    }

    // Orient against the unsheared grid, then require the shear to keep every
    // cell's orientation: an inverted cell after shearing is a fold, not a
    // representational flip.
    for (c, cell) in cells.iter_mut().enumerate() {
        let pts: Vec<Point> = cell[..=dim].iter().map(|&v| plain[v]).collect();
        if signed_volume(&pts, dim) < 0.0 {
            cell.swap(0, 1);
        }
        let pts: Vec<Point> = cell[..=dim].iter().map(|&v| sheared[v]).collect();
        if !(signed_volume(&pts, dim) > 0.0) {
            return Err(MeshError::DegenerateCell { cell: c });
        }
    }
    SimplexMesh::new(dim, sheared, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_stats;

    #[test]
    fn minimal_meshes() {
        let sq = build_structured_mesh(Domain::UnitSquare, 1, 0.0).unwrap();
        assert_eq!((sq.n_cells(), sq.n_vertices()), (2, 4));
        let cube = build_structured_mesh(Domain::UnitCube, 1, 0.0).unwrap();
        assert_eq!((cube.n_cells(), cube.n_vertices()), (6, 8));
        assert!((cube.total_volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn counts_scale_with_n() {
        for n in 1..5 {
            let sq = build_structured_mesh(Domain::UnitSquare, n, 0.0).unwrap();
            assert_eq!(sq.n_cells(), 2 * n * n);
            assert_eq!(sq.n_vertices(), (n + 1) * (n + 1));
            let cube = build_structured_mesh(Domain::UnitCube, n, 0.0).unwrap();
            assert_eq!(cube.n_cells(), 6 * n * n * n);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(build_structured_mesh(Domain::UnitSquare, 0, 0.0), Err(MeshError::EmptyGrid)));
        assert!(matches!(
            build_structured_mesh(Domain::UnitSquare, 2, f64::NAN),
            Err(MeshError::InvalidShear(_))
        ));
        // shifting a vertex a full cell width folds the grid
        assert!(matches!(
            build_structured_mesh(Domain::UnitSquare, 4, 1.0),
            Err(MeshError::DegenerateCell { .. })
        ));
        assert!(build_structured_mesh(Domain::UnitCube, 2, 1.5).is_err());
    }

    #[test]
    fn poor_square_hits_target_angles() {
        let mesh = build_structured_mesh(Domain::UnitSquare, 4, 0.75).unwrap();
        let stats = mesh_stats(&mesh);
        assert!((6.0..=10.0).contains(&stats.min_angle_deg), "{}", stats.min_angle_deg);
        assert!((stats.max_angle_deg - 126.0).abs() < 2.0, "{}", stats.max_angle_deg);
        assert!((mesh.total_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poor_cube_hits_target_dihedral() {
        let mesh = build_structured_mesh(Domain::UnitCube, 2, 0.75).unwrap();
        let stats = mesh_stats(&mesh);
        assert!((6.0..=10.0).contains(&stats.min_angle_deg), "{}", stats.min_angle_deg);
        assert!((mesh.total_volume() - 1.0).abs() < 1e-12);
    }
}
