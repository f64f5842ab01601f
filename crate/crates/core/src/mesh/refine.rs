use std::collections::HashMap;

use super::geometry::dist_sq;
use super::{Point, SimplexMesh};

struct MidpointTable {
    vertices: Vec<Point>,
    index: HashMap<(usize, usize), usize>,
}

impl MidpointTable {
    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&m) = self.index.get(&key) {
            return m;
        }
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let m = self.vertices.len();
        self.vertices.push([
            0.5 * (pa[0] + pb[0]),
            0.5 * (pa[1] + pb[1]),
            0.5 * (pa[2] + pb[2]),
        ]);
        self.index.insert(key, m);
        m
    }
}

/// Red refinement: every triangle splits into 4 similar children, every
/// tetrahedron into 4 corner tetrahedra plus 4 from its inner octahedron.
/// The octahedron is cut along its shortest diagonal (ties go to the
/// lexicographically smallest sorted vertex pair).
pub fn uniform_refine(mesh: &SimplexMesh) -> SimplexMesh {
    let dim = mesh.dim();
    let mut table = MidpointTable {
        vertices: mesh.vertices().to_vec(),
        index: HashMap::new(),
    };
    let children_per_cell = if dim == 2 { 4 } else { 8 };
    let mut cells: Vec<[usize; 4]> = Vec::with_capacity(mesh.n_cells() * children_per_cell);

    for c in 0..mesh.n_cells() {
        let v = mesh.cell(c).to_vec();
        if dim == 2 {
            let m01 = table.midpoint(v[0], v[1]);
            let m12 = table.midpoint(v[1], v[2]);
            let m02 = table.midpoint(v[0], v[2]);
            cells.push([v[0], m01, m02, usize::MAX]);
            cells.push([m01, v[1], m12, usize::MAX]);
            cells.push([m02, m12, v[2], usize::MAX]);
            cells.push([m01, m12, m02, usize::MAX]);
            continue;
        }

        let mut mid = [[usize::MAX; 4]; 4];
        for a in 0..4 {
            for b in a + 1..4 {
                let m = table.midpoint(v[a], v[b]);
                mid[a][b] = m;
                mid[b][a] = m;
            }
        }
        cells.push([v[0], mid[0][1], mid[0][2], mid[0][3]]);
        cells.push([mid[0][1], v[1], mid[1][2], mid[1][3]]);
        cells.push([mid[0][2], mid[1][2], v[2], mid[2][3]]);
        cells.push([mid[0][3], mid[1][3], mid[2][3], v[3]]);

        // Octahedron diagonals join midpoints of opposite edges (ij, kl).
        let candidates = [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)];
        let (i, j, k, l) = candidates
            .into_iter()
            .min_by(|&(i, j, k, l), &(i2, j2, k2, l2)| {
                let len = dist_sq(&table.vertices[mid[i][j]], &table.vertices[mid[k][l]]);
                let len2 = dist_sq(&table.vertices[mid[i2][j2]], &table.vertices[mid[k2][l2]]);
                let pair = sorted_pair(mid[i][j], mid[k][l]);
                let pair2 = sorted_pair(mid[i2][j2], mid[k2][l2]);
                if (len - len2).abs() <= 1e-12 * len.max(len2) {
                    pair.cmp(&pair2)
                } else {
                    len.total_cmp(&len2)
                }
            })
            .expect("three candidate diagonals");
        let (da, db) = (mid[i][j], mid[k][l]);
        // The four remaining midpoints form a cycle around the diagonal.
        let ring = [mid[i][k], mid[i][l], mid[j][l], mid[j][k]];
        for r in 0..4 {
            cells.push([da, db, ring[r], ring[(r + 1) % 4]]);
        }
    }

    SimplexMesh::new(dim, table.vertices, cells).expect("red refinement of a conforming mesh is conforming")
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}
