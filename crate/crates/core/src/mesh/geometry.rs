//! Affine simplex geometry shared by the mesh and assembly code.

use super::Point;

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist_sq(a: &Point, b: &Point) -> f64 {
    let d = sub(a, b);
    dot(&d, &d)
}

/// Angle between two vectors in radians, robust near 0 and π.
pub(crate) fn angle_between(a: &Point, b: &Point) -> f64 {
    norm(&cross(a, b)).atan2(dot(a, b))
}

/// Determinant of the edge matrix `[x1 - x0, ..., xd - x0]`.
pub(crate) fn edge_determinant(points: &[Point], dim: usize) -> f64 {
    let e1 = sub(&points[1], &points[0]);
    let e2 = sub(&points[2], &points[0]);
    match dim {
        2 => e1[0] * e2[1] - e1[1] * e2[0],
        3 => {
            let e3 = sub(&points[3], &points[0]);
            dot(&e1, &cross(&e2, &e3))
        }
        _ => unreachable!("simplex dimension must be 2 or 3"),
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Signed volume of a `dim`-simplex (positive for counter-clockwise / right-handed order).
pub fn signed_volume(points: &[Point], dim: usize) -> f64 {
    edge_determinant(points, dim) / factorial(dim)
}

/// Volume and barycentric gradients of a single P1 cell.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub volume: f64,
    /// Gradient of the barycentric coordinate attached to each local vertex.
    /// Only the first `dim + 1` entries are meaningful.
    pub barycentric_gradients: [Point; 4],
}

impl CellGeometry {
    /// Geometry of the simplex spanned by `points[..=dim]`. Returns `None` for a degenerate cell.
    pub fn new(points: &[Point], dim: usize) -> Option<Self> {
        let det = edge_determinant(points, dim);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let mut grads = [[0.0; 3]; 4];
        match dim {
            2 => {
                let e1 = sub(&points[1], &points[0]);
                let e2 = sub(&points[2], &points[0]);
                // rows of the inverse of [[e1x, e2x], [e1y, e2y]]
                grads[1] = [e2[1] / det, -e2[0] / det, 0.0];
                grads[2] = [-e1[1] / det, e1[0] / det, 0.0];
            }
            3 => {
                let e1 = sub(&points[1], &points[0]);
                let e2 = sub(&points[2], &points[0]);
                let e3 = sub(&points[3], &points[0]);
                let c23 = cross(&e2, &e3);
                let c31 = cross(&e3, &e1);
                let c12 = cross(&e1, &e2);
                for k in 0..3 {
                    grads[1][k] = c23[k] / det;
                    grads[2][k] = c31[k] / det;
                    grads[3][k] = c12[k] / det;
                }
            }
            _ => unreachable!("simplex dimension must be 2 or 3"),
        }
        for k in 0..3 {
            grads[0][k] = -(1..=dim).map(|i| grads[i][k]).sum::<f64>();
        }
        Some(Self {
            volume: det.abs() / factorial(dim),
            barycentric_gradients: grads,
        })
    }

    pub fn gradients(&self, dim: usize) -> &[Point] {
        &self.barycentric_gradients[..=dim]
    }
}
