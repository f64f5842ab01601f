//! Plain-text mesh files.
//!
//! ```text
//! dim n_vertices n_cells
//! x y [z]            (one line per vertex, 17 significant digits)
//! i j k [l]          (one line per cell, zero-based)
//! b0 b1 ... bn       (boundary flags, 0 or 1)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{MeshError, Point, SimplexMesh};

pub fn write_mesh_to_string(mesh: &SimplexMesh) -> String {
    let dim = mesh.dim();
    let mut out = String::new();
    writeln!(out, "{} {} {}", dim, mesh.n_vertices(), mesh.n_cells()).unwrap();
    for v in mesh.vertices() {
        let line: Vec<String> = v[..dim].iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    for c in 0..mesh.n_cells() {
        let line: Vec<String> = mesh.cell(c).iter().map(|i| i.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    let flags: Vec<&str> = mesh
        .boundary_flags()
        .iter()
        .map(|&b| if b { "1" } else { "0" })
        .collect();
    writeln!(out, "{}", flags.join(" ")).unwrap();
    out
}

pub fn write_mesh(mesh: &SimplexMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh_to_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<SimplexMesh, MeshError> {
    read_mesh_from_str(&std::fs::read_to_string(path)?)
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn fields<T: std::str::FromStr>(line_no: usize, line: &str, expected: usize, what: &str) -> Result<Vec<T>, MeshError> {
    let parsed: Vec<T> = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| parse_err(line_no, format!("cannot parse {what} entry `{tok}`")))
        })
        .collect::<Result<_, _>>()?;
    if parsed.len() != expected {
        return Err(parse_err(
            line_no,
            format!("expected {expected} {what} entries, found {}", parsed.len()),
        ));
    }
    Ok(parsed)
}

pub fn read_mesh_from_str(text: &str) -> Result<SimplexMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file while reading {what}")));

    let (ln, header) = next("header")?;
    let header: Vec<usize> = fields(ln, header, 3, "header")?;
    let (dim, nv, nc) = (header[0], header[1], header[2]);
    if dim != 2 && dim != 3 {
        return Err(parse_err(ln, format!("unsupported dimension {dim}")));
    }

    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = next("vertices")?;
        let xs: Vec<f64> = fields(ln, line, dim, "coordinate")?;
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(ln, "non-finite coordinate"));
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&xs);
        vertices.push(p);
    }

    let mut cells: Vec<[usize; 4]> = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, line) = next("cells")?;
        let idx: Vec<i64> = fields(ln, line, dim + 1, "cell index")?;
        let mut cell = [usize::MAX; 4];
        for (k, &i) in idx.iter().enumerate() {
            if i < 0 || i as usize >= nv {
                return Err(parse_err(ln, format!("vertex index {i} out of range 0..{nv}")));
            }
            cell[k] = i as usize;
        }
        cells.push(cell);
    }

    let (ln, line) = next("boundary flags")?;
    let flags: Vec<u8> = fields(ln, line, nv, "boundary flag")?;
    let mut boundary = Vec::with_capacity(nv);
    for f in flags {
        match f {
            0 => boundary.push(false),
            1 => boundary.push(true),
            other => return Err(parse_err(ln, format!("boundary flag must be 0 or 1, found {other}"))),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after boundary flags"));
    }

    SimplexMesh::with_boundary(dim, vertices, cells, boundary)
}
