use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{angle_between, dist_sq, signed_volume, sub, CellGeometry};
use super::{Point, SimplexMesh};

/// Knupp's mean-ratio shape metric: 1 for an equilateral triangle or a
/// regular tetrahedron, 0 for a degenerate cell. Invariant under scaling.
pub fn knupp_quality(points: &[Point], dim: usize) -> f64 {
    let mut edge_sq = 0.0;
    for a in 0..=dim {
        for b in a + 1..=dim {
            edge_sq += dist_sq(&points[a], &points[b]);
        }
    }
    if edge_sq == 0.0 {
        return 0.0;
    }
    let volume = signed_volume(points, dim).abs();
    let q = match dim {
        2 => 4.0 * 3.0_f64.sqrt() * volume / edge_sq,
        3 => 12.0 * (3.0 * volume).powf(2.0 / 3.0) / edge_sq,
        _ => unreachable!("simplex dimension must be 2 or 3"),
    };
    q.clamp(0.0, 1.0)
}

/// Interior angles of a triangle, or the six dihedral angles of a tetrahedron, in degrees.
pub fn cell_angles_deg(points: &[Point], dim: usize) -> Vec<f64> {
    match dim {
        2 => (0..3)
            .map(|k| {
                let u = sub(&points[(k + 1) % 3], &points[k]);
                let v = sub(&points[(k + 2) % 3], &points[k]);
                angle_between(&u, &v).to_degrees()
            })
            .collect(),
        3 => {
            let Some(geom) = CellGeometry::new(points, 3) else {
                return vec![0.0; 6];
            };
            let g = geom.barycentric_gradients;
            let mut out = Vec::with_capacity(6);
            for a in 0..4 {
                for b in a + 1..4 {
                    // the face normals ∇λ point inwards; the dihedral angle is π minus their angle
                    let neg_b = [-g[b][0], -g[b][1], -g[b][2]];
                    out.push(angle_between(&g[a], &neg_b).to_degrees());
                }
            }
            out
        }
        _ => unreachable!("simplex dimension must be 2 or 3"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshStats {
    pub h_max: f64,
    pub h_min: f64,
    pub n_cells: usize,
    pub n_vertices: usize,
    pub n_interior_dofs: usize,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    pub min_quality: f64,
    pub max_quality: f64,
}

#[derive(Clone, Copy)]
struct Extremes {
    h: (f64, f64),
    angle: (f64, f64),
    quality: (f64, f64),
}

impl Extremes {
    const EMPTY: Self = Self {
        h: (f64::INFINITY, f64::NEG_INFINITY),
        angle: (f64::INFINITY, f64::NEG_INFINITY),
        quality: (f64::INFINITY, f64::NEG_INFINITY),
    };

    fn merge(self, o: Self) -> Self {
        let mm = |a: (f64, f64), b: (f64, f64)| (a.0.min(b.0), a.1.max(b.1));
        Self {
            h: mm(self.h, o.h),
            angle: mm(self.angle, o.angle),
            quality: mm(self.quality, o.quality),
        }
    }
}

pub fn mesh_stats(mesh: &SimplexMesh) -> MeshStats {
    let dim = mesh.dim();
    let ext = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let pts = mesh.cell_points(c);
            let h = mesh.cell_diameter(c);
            let angles = cell_angles_deg(&pts, dim);
            let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = angles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let q = knupp_quality(&pts, dim);
            Extremes {
                h: (h, h),
                angle: (lo, hi),
                quality: (q, q),
            }
        })
        .reduce(|| Extremes::EMPTY, Extremes::merge);
    MeshStats {
        h_max: ext.h.1,
        h_min: ext.h.0,
        n_cells: mesh.n_cells(),
        n_vertices: mesh.n_vertices(),
        n_interior_dofs: mesh.n_interior_vertices(),
        min_angle_deg: ext.angle.0,
        max_angle_deg: ext.angle.1,
        min_quality: ext.quality.0,
        max_quality: ext.quality.1,
    }
}
