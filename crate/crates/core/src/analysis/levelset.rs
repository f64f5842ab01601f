//! Exact measure of superlevel sets `{u_h > s}` of P1 functions.
//!
//! For a linear function on a `d`-simplex with vertex values `u_i`, the volume
//! fraction of `{u ≤ s}` is the truncated-power divided difference
//! `Σ_i (s - u_i)_+^d / Π_{j≠i} (u_j - u_i)`. The evaluation below picks the
//! branch that avoids cancellation.

use rayon::prelude::*;

use crate::fem::FeFunction;

/// Sorted-value cases below this relative gap are treated as coincident.
const GAP_TOL: f64 = 1e-8;

fn fraction_above_triangle(u: [f64; 3], s: f64) -> f64 {
    let [u0, u1, u2] = u;
    if s >= u2 {
        0.0
    } else if s < u0 {
        1.0
    } else if s >= u1 {
        (u2 - s).powi(2) / ((u2 - u0) * (u2 - u1))
    } else {
        1.0 - (s - u0).powi(2) / ((u1 - u0) * (u2 - u0))
    }
}

fn fraction_above_tetrahedron(u: [f64; 4], s: f64) -> f64 {
    let [u0, u1, u2, u3] = u;
    if s >= u3 {
        return 0.0;
    }
    if s < u0 {
        return 1.0;
    }
    if s >= u2 {
        return (u3 - s).powi(3) / ((u3 - u0) * (u3 - u1) * (u3 - u2));
    }
    if s < u1 {
        return 1.0 - (s - u0).powi(3) / ((u1 - u0) * (u2 - u0) * (u3 - u0));
    }
    // u1 ≤ s < u2
    let (low_gap, high_gap) = (u1 - u0, u3 - u2);
    if low_gap.max(high_gap) <= GAP_TOL * (u3 - u0) {
        // two pairs of coincident values: λ2 + λ3 follows Beta(2, 2)
        let t = (s - u1) / (u2 - u1);
        return 1.0 - t * t * (3.0 - 2.0 * t);
    }
    if low_gap >= high_gap {
        let below = (s - u0).powi(3) / ((u1 - u0) * (u2 - u0) * (u3 - u0))
            + (s - u1).powi(3) / ((u0 - u1) * (u2 - u1) * (u3 - u1));
        1.0 - below
    } else {
        (u3 - s).powi(3) / ((u3 - u0) * (u3 - u1) * (u3 - u2)) + (u2 - s).powi(3) / ((u2 - u0) * (u2 - u1) * (u2 - u3))
    }
}

/// Fraction of a cell's volume where the linear interpolant of `values` exceeds `s`.
pub fn cell_superlevel_fraction(values: &[f64], s: f64) -> f64 {
    let f = match values.len() {
        3 => {
            let mut u = [values[0], values[1], values[2]];
            u.sort_by(f64::total_cmp);
            fraction_above_triangle(u, s)
        }
        4 => {
            let mut u = [values[0], values[1], values[2], values[3]];
            u.sort_by(f64::total_cmp);
            fraction_above_tetrahedron(u, s)
        }
        n => panic!("cells have 3 or 4 vertices, got {n}"),
    };
    f.clamp(0.0, 1.0)
}

/// `|{x : u_h(x) > s}|`.
pub fn superlevel_measure(u_h: &FeFunction, s: f64) -> f64 {
    let mesh = u_h.mesh();
    let c = u_h.coefficients();
    let parts: Vec<f64> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|cell| {
            let vals: Vec<f64> = mesh.cell(cell).iter().map(|&v| c[v]).collect();
            let frac = cell_superlevel_fraction(&vals, s);
            if frac == 0.0 {
                0.0
            } else {
                frac * mesh.cell_geometry(cell).volume
            }
        })
        .collect();
    parts.iter().sum()
}
