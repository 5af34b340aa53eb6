//! Plain-text mesh files.
//!
//! ```text
//! V E T
//! x y        (V lines)
//! i j k      (T lines, 0-based, counterclockwise)
//! ```
//!
//! `E` is informational; edges are always derived from the triangles and a
//! mismatching count is rejected.

use std::io::{BufRead, Write};

use super::Mesh;
use crate::error::{Error, Result};
use crate::Point;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_mesh(reader: impl BufRead) -> Result<Mesh> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

    let mut next_fields = |what: &str| -> Result<(usize, Vec<String>)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")))?;
        let line = line?;
        Ok((no, line.split_whitespace().map(str::to_owned).collect()))
    };

    let (no, header) = next_fields("header")?;
    if header.len() != 3 {
        return Err(parse_err(no, "header must be \"V E T\""));
    }
    let counts: Vec<usize> = header
        .iter()
        .map(|s| s.parse().map_err(|_| parse_err(no, format!("bad count {s:?}"))))
        .collect::<Result<_>>()?;
    let (nv, ne, nt) = (counts[0], counts[1], counts[2]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, f) = next_fields("vertex")?;
        if f.len() != 2 {
            return Err(parse_err(no, "vertex line must be \"x y\""));
        }
        let x: f64 = f[0]
            .parse()
            .map_err(|_| parse_err(no, format!("bad coordinate {:?}", f[0])))?;
        let y: f64 = f[1]
            .parse()
            .map_err(|_| parse_err(no, format!("bad coordinate {:?}", f[1])))?;
        vertices.push(Point::new(x, y));
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (no, f) = next_fields("triangle")?;
        if f.len() != 3 {
            return Err(parse_err(no, "triangle line must be \"i j k\""));
        }
        let mut tri = [0usize; 3];
        for (slot, s) in tri.iter_mut().zip(&f) {
            *slot = s
                .parse()
                .map_err(|_| parse_err(no, format!("bad vertex index {s:?}")))?;
        }
        triangles.push(tri);
    }
    let mesh = Mesh::new(vertices, triangles)?;
    if mesh.num_edges() != ne {
        return Err(parse_err(
            1,
            format!(
                "header declares {ne} edges but the triangles define {}",
                mesh.num_edges()
            ),
        ));
    }
    Ok(mesh)
}

pub fn write_mesh(mesh: &Mesh, mut writer: impl Write) -> Result<()> {
    writeln!(
        writer,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_edges(),
        mesh.num_triangles()
    )?;
    for v in mesh.vertices() {
        // round-trip exact
        writeln!(writer, "{:?} {:?}", v.x, v.y)?;
    }
    for t in mesh.triangles() {
        writeln!(writer, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}
