use super::geometry::dist_sq;
use super::{MeshError, SimplexMesh};

/// Repeatedly bisects the globally shortest edge of a triangle mesh.
///
/// Each step inserts the midpoint of the shortest edge (ties go to the
/// lexicographically smallest sorted vertex pair) and splits the one or two
/// incident triangles by joining the midpoint to the opposite vertex.
pub fn bisect_shortest_edge(mesh: &SimplexMesh, steps: usize) -> Result<SimplexMesh, MeshError> {
    if mesh.dim() != 2 {
        return Err(MeshError::WrongDimension {
            expected: 2,
            actual: mesh.dim(),
        });
    }
    let mut vertices = mesh.vertices().to_vec();
    let mut cells: Vec<[usize; 4]> = mesh.raw_cells().to_vec();

    for _ in 0..steps {
        let (a, b) = shortest_edge(&vertices, &cells);
        let (pa, pb) = (vertices[a], vertices[b]);
        let m = vertices.len();
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]), 0.0]);

        let mut split = Vec::with_capacity(2);
        for cell in cells.iter_mut() {
            let tri = [cell[0], cell[1], cell[2]];
            if !(tri.contains(&a) && tri.contains(&b)) {
                continue;
            }
            // rotate so that the cut edge is (tri[r], tri[r+1]) in cell orientation
            let r = (0..3)
                .find(|&r| {
                    let (p, q) = (tri[r], tri[(r + 1) % 3]);
                    (p == a && q == b) || (p == b && q == a)
                })
                .expect("edge belongs to the triangle");
            let (p, q, opp) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
            *cell = [p, m, opp, usize::MAX];
            split.push([m, q, opp, usize::MAX]);
        }
        cells.extend(split);
    }

    SimplexMesh::new(2, vertices, cells)
}

fn shortest_edge(vertices: &[super::Point], cells: &[[usize; 4]]) -> (usize, usize) {
    let mut edges: Vec<(usize, usize)> = cells
        .iter()
        .flat_map(|c| [(c[0], c[1]), (c[1], c[2]), (c[0], c[2])])
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let len = |&(i, j): &(usize, usize)| dist_sq(&vertices[i], &vertices[j]);
    let shortest = edges.iter().map(len).fold(f64::INFINITY, f64::min);
    *edges
        .iter()
        .find(|e| len(e) <= shortest * (1.0 + 1e-12))
        .expect("mesh has edges")
}
