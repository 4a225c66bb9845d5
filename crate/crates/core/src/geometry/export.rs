//! Line-oriented `jacmesh v1` text format.
//!
//! ```text
//! jacmesh v1 n=2 chi=2
//! v x y z
//! t i j k
//! be i j
//! f v q K bweight kappa
//! ```
//!
//! Floats carry 17 significant digits; `bweight`/`kappa` are `-` on interior
//! vertices.

use std::fmt::Write as _;

use super::mesh::{RiemannianMesh, VertexField};
use super::GeometryError;
use crate::fmt_f64;

pub fn write_jacmesh(mesh: &RiemannianMesh) -> String {
    let mut out = String::new();
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_else(|| "-".to_string());
    writeln!(out, "jacmesh v1 n=2 chi={}", mesh.euler_characteristic()).unwrap();
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "t {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    for lp in &mesh.boundary_loops {
        for e in lp {
            writeln!(out, "be {} {}", e[0], e[1]).unwrap();
        }
    }
    for (i, f) in mesh.field.iter().enumerate() {
        writeln!(
            out,
            "f {i} {} {} {} {}",
            fmt_f64(f.q),
            fmt_f64(f.k),
            opt(f.bweight),
            opt(f.kappa)
        )
        .unwrap();
    }
    out
}

/// Contents of a `jacmesh` document. Edge lengths are not part of the
/// format, so this is not a full [`RiemannianMesh`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshFile {
    pub n: usize,
    pub chi: i64,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 2]>,
    pub field: Vec<VertexField>,
}

pub fn parse_jacmesh(text: &str) -> Result<MeshFile, GeometryError> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, reason: &str| GeometryError::Parse {
        line: line + 1,
        reason: reason.to_string(),
    };
    let (_, header) = lines.next().ok_or_else(|| bad(0, "empty document"))?;
    let mut out = MeshFile::default();
    let mut parts = header.split_whitespace();
    if parts.next() != Some("jacmesh") || parts.next() != Some("v1") {
        return Err(bad(0, "missing `jacmesh v1` header"));
    }
    for kv in parts {
        match kv.split_once('=') {
            Some(("n", v)) => out.n = v.parse().map_err(|_| bad(0, "bad n"))?,
            Some(("chi", v)) => out.chi = v.parse().map_err(|_| bad(0, "bad chi"))?,
            _ => return Err(bad(0, "unknown header field")),
        }
    }
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad(ln, "bad float"));
        let index = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad index"));
        let opt = |s: &str| if s == "-" { Ok(None) } else { float(s).map(Some) };
        match (tag, rest.len()) {
            ("v", 3) => out
                .vertices
                .push([float(rest[0])?, float(rest[1])?, float(rest[2])?]),
            ("t", 3) => out
                .triangles
                .push([index(rest[0])?, index(rest[1])?, index(rest[2])?]),
            ("be", 2) => out.boundary_edges.push([index(rest[0])?, index(rest[1])?]),
            ("f", 5) => {
                if index(rest[0])? != out.field.len() {
                    return Err(bad(ln, "field records out of order"));
                }
                out.field.push(VertexField {
                    q: float(rest[1])?,
                    k: float(rest[2])?,
                    bweight: opt(rest[3])?,
                    kappa: opt(rest[4])?,
                });
            }
            _ => return Err(bad(ln, "unrecognised record")),
        }
    }
    Ok(out)
}
