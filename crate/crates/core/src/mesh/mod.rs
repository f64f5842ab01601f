//! Conforming simplicial meshes of the unit square and unit cube.
//!
//! A [`SimplexMesh`] is immutable once built. Every operation that changes
//! the topology (refinement, bisection) returns a new mesh, and every
//! constructor checks positive orientation, facet conformity and the
//! boundary flags before handing the mesh out.

mod bisect;
mod build;
pub mod geometry;
mod io;
mod quality;
mod refine;

use std::collections::HashMap;

use thiserror::Error;

pub use bisect::bisect_shortest_edge;
pub use build::{build_structured_mesh, Domain};
pub use geometry::{signed_volume, CellGeometry};
pub use io::{read_mesh, read_mesh_from_str, write_mesh, write_mesh_to_string};
pub use quality::{cell_angles_deg, knupp_quality, mesh_stats, MeshStats};
pub use refine::uniform_refine;

/// Vertex coordinates. In 2D the third component is zero.
pub type Point = [f64; 3];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    Dimension(usize),
    #[error("cells per side must be at least 1")]
    EmptyGrid,
    #[error("invalid shear {0}: must be finite and non-negative")]
    InvalidShear(f64),
    #[error("cell {cell} is degenerate (zero or inverted volume)")]
    DegenerateCell { cell: usize },
    #[error("cell {cell} references vertex {index} but the mesh has {n_vertices} vertices")]
    IndexOutOfRange {
        cell: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("cell {cell} repeats a vertex")]
    RepeatedVertex { cell: usize },
    #[error("facet {facet:?} is shared by {count} cells")]
    NonConforming { facet: Vec<usize>, count: usize },
    #[error("boundary flag of vertex {vertex} disagrees with the facet structure")]
    BoundaryFlag { vertex: usize },
    #[error("operation requires a {expected}D mesh, got {actual}D")]
    WrongDimension { expected: usize, actual: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<[usize; 4]>,
    boundary: Vec<bool>,
}

impl SimplexMesh {
    /// Builds a mesh from raw connectivity, computing the boundary flags.
    ///
    /// Negatively oriented cells are repaired by swapping their first two
    /// vertices. Zero-volume cells, dangling indices and non-conforming
    /// facets are rejected.
    pub fn new(dim: usize, vertices: Vec<Point>, cells: Vec<[usize; 4]>) -> Result<Self, MeshError> {
        let mut mesh = Self::oriented(dim, vertices, cells)?;
        mesh.boundary = mesh.boundary_from_facets()?;
        Ok(mesh)
    }

    /// Like [`SimplexMesh::new`], but also checks externally supplied boundary flags.
    pub fn with_boundary(
        dim: usize,
        vertices: Vec<Point>,
        cells: Vec<[usize; 4]>,
        boundary: Vec<bool>,
    ) -> Result<Self, MeshError> {
        let mesh = Self::new(dim, vertices, cells)?;
        if boundary.len() != mesh.n_vertices() {
            return Err(MeshError::Parse {
                line: 0,
                message: format!(
                    "expected {} boundary flags, found {}",
                    mesh.n_vertices(),
                    boundary.len()
                ),
            });
        }
        if let Some(v) = (0..boundary.len()).find(|&v| boundary[v] != mesh.boundary[v]) {
            return Err(MeshError::BoundaryFlag { vertex: v });
        }
        Ok(mesh)
    }

    fn oriented(dim: usize, vertices: Vec<Point>, mut cells: Vec<[usize; 4]>) -> Result<Self, MeshError> {
        if dim != 2 && dim != 3 {
            return Err(MeshError::Dimension(dim));
        }
        let nv = vertices.len();
        for (c, cell) in cells.iter_mut().enumerate() {
            let local = &mut cell[..=dim];
            if let Some(&index) = local.iter().find(|&&i| i >= nv) {
                return Err(MeshError::IndexOutOfRange {
                    cell: c,
                    index,
                    n_vertices: nv,
                });
            }
            for a in 0..local.len() {
                if local[a + 1..].contains(&local[a]) {
                    return Err(MeshError::RepeatedVertex { cell: c });
                }
            }
            let pts: Vec<Point> = local.iter().map(|&i| vertices[i]).collect();
            let vol = signed_volume(&pts, dim);
            if !(vol.abs() > 0.0) || !vol.is_finite() {
                return Err(MeshError::DegenerateCell { cell: c });
            }
            if vol < 0.0 {
                local.swap(0, 1);
            }
            if dim == 2 {
                cell[3] = usize::MAX;
            }
        }
        Ok(Self {
            dim,
            vertices,
            cells,
            boundary: Vec::new(),
        })
    }

    fn boundary_from_facets(&self) -> Result<Vec<bool>, MeshError> {
        let counts = self.facet_counts();
        let mut boundary = vec![false; self.n_vertices()];
        // sort for a deterministic error report
        let mut facets: Vec<_> = counts.into_iter().collect();
        facets.sort_unstable();
        for (facet, count) in facets {
            match count {
                1 => facet[..self.dim].iter().for_each(|&v| boundary[v] = true),
                2 => {}
                _ => {
                    return Err(MeshError::NonConforming {
                        facet: facet[..self.dim].to_vec(),
                        count,
                    })
                }
            }
        }
        Ok(boundary)
    }

    /// Number of cells sharing each facet, keyed by sorted vertex indices.
    /// In 2D the key's last slot is `usize::MAX`.
    pub fn facet_counts(&self) -> HashMap<[usize; 3], usize> {
        let mut counts = HashMap::with_capacity(self.n_cells() * (self.dim + 1));
        for c in 0..self.n_cells() {
            let cell = self.cell(c);
            for skip in 0..=self.dim {
                let mut key = [usize::MAX; 3];
                let mut k = 0;
                for (i, &v) in cell.iter().enumerate() {
                    if i != skip {
                        key[k] = v;
                        k += 1;
                    }
                }
                key[..self.dim].sort_unstable();
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Re-runs every structural check. Meshes built through this module always pass.
    pub fn check_conformity(&self) -> Result<(), MeshError> {
        for c in 0..self.n_cells() {
            if !(self.cell_signed_volume(c) > 0.0) {
                return Err(MeshError::DegenerateCell { cell: c });
            }
        }
        let boundary = self.boundary_from_facets()?;
        if let Some(v) = (0..boundary.len()).find(|&v| boundary[v] != self.boundary[v]) {
            return Err(MeshError::BoundaryFlag { vertex: v });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Point {
        &self.vertices[v]
    }

    /// Vertex indices of cell `c` (length `dim + 1`).
    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c][..=self.dim]
    }

    pub(crate) fn raw_cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn n_interior_vertices(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    pub fn cell_points(&self, c: usize) -> [Point; 4] {
        let mut pts = [[0.0; 3]; 4];
        for (k, &v) in self.cell(c).iter().enumerate() {
            pts[k] = self.vertices[v];
        }
        pts
    }

    pub fn cell_signed_volume(&self, c: usize) -> f64 {
        signed_volume(&self.cell_points(c), self.dim)
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry {
        CellGeometry::new(&self.cell_points(c), self.dim)
            .expect("mesh cells are non-degenerate by construction")
    }

    /// Longest edge of cell `c`.
    pub fn cell_diameter(&self, c: usize) -> f64 {
        let pts = self.cell_points(c);
        let mut h2: f64 = 0.0;
        for a in 0..=self.dim {
            for b in a + 1..=self.dim {
                h2 = h2.max(geometry::dist_sq(&pts[a], &pts[b]));
            }
        }
        h2.sqrt()
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_signed_volume(c)).sum()
    }

    /// Unique edges as sorted vertex pairs, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.n_cells() * 6);
        for c in 0..self.n_cells() {
            let cell = self.cell(c);
            for a in 0..cell.len() {
                for b in a + 1..cell.len() {
                    let (i, j) = (cell[a].min(cell[b]), cell[a].max(cell[b]));
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}
