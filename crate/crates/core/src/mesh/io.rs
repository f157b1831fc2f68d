//! OBJ, OFF and ASCII PLY readers, plus minimal OBJ/OFF writers.

use std::fmt::Write as _;
use std::path::Path;
use std::str::{FromStr, SplitWhitespace};

use nalgebra::Vector3;

use super::TriMesh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        ext.parse()
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "off" => Ok(MeshFormat::Off),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Reads a mesh from disk. When `format` is `None` it is inferred from the
/// file extension.
pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<TriMesh> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if format == MeshFormat::Ply && !is_ascii_ply(&bytes) {
        return Err(Error::UnsupportedFormat("binary PLY".into()));
    }
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        message: format!("not valid UTF-8: {e}"),
    })?;
    parse_mesh(&text, format)
}

fn is_ascii_ply(bytes: &[u8]) -> bool {
    let head = &bytes[..bytes.len().min(512)];
    let head = String::from_utf8_lossy(head);
    !head.lines().any(|l| l.trim_start().starts_with("format binary"))
}

pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<TriMesh> {
    let mut builder = match format {
        MeshFormat::Obj => parse_obj(text)?,
        MeshFormat::Off => parse_off(text)?,
        MeshFormat::Ply => parse_ply(text)?,
    };
    builder.finish()
}

/// Vertices plus polygon faces tagged with their source line.
#[derive(Default)]
struct Builder {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
    face_lines: Vec<usize>,
}

impl Builder {
    /// Fan-triangulates `polygon` from its first vertex.
    fn polygon(&mut self, line: usize, polygon: &[usize]) -> Result<()> {
        if polygon.len() < 3 {
            return Err(parse_err(line, "face with fewer than 3 vertices"));
        }
        for w in 1..polygon.len() - 1 {
            self.faces.push([polygon[0], polygon[w], polygon[w + 1]]);
            self.face_lines.push(line);
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<TriMesh> {
        let n = self.vertices.len();
        for (face, &line) in self.faces.iter().zip(&self.face_lines) {
            if let Some(&index) = face.iter().find(|&&i| i >= n) {
                return Err(Error::Index {
                    line,
                    index,
                    vertex_count: n,
                });
            }
        }
        if n == 0 {
            return Err(Error::EmptyMesh);
        }
        Ok(TriMesh {
            vertices: std::mem::take(&mut self.vertices),
            faces: std::mem::take(&mut self.faces),
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn next_num<T: FromStr>(tokens: &mut SplitWhitespace<'_>, line: usize, what: &str) -> Result<T> {
    let tok = tokens
        .next()
        .ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

fn read_point(tokens: &mut SplitWhitespace<'_>, line: usize) -> Result<Vector3<f64>> {
    let x = next_num(tokens, line, "x coordinate")?;
    let y = next_num(tokens, line, "y coordinate")?;
    let z = next_num(tokens, line, "z coordinate")?;
    let p = Vector3::new(x, y, z);
    if p.iter().all(|c: &f64| c.is_finite()) {
        Ok(p)
    } else {
        Err(parse_err(line, "non-finite coordinate"))
    }
}

fn parse_obj(text: &str) -> Result<Builder> {
    let mut b = Builder::default();
    let mut polygon = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            Some("v") => b.vertices.push(read_point(&mut tokens, line)?),
            Some("f") => {
                polygon.clear();
                for tok in tokens {
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head
                        .parse()
                        .map_err(|_| parse_err(line, format!("invalid face index {tok:?}")))?;
                    let resolved = match idx {
                        0 => return Err(parse_err(line, "OBJ indices are 1-based")),
                        i if i > 0 => (i - 1) as usize,
                        i => {
                            let back = b.vertices.len() as i64 + i;
                            if back < 0 {
                                return Err(Error::Index {
                                    line,
                                    index: usize::MAX,
                                    vertex_count: b.vertices.len(),
                                });
                            }
                            back as usize
                        }
                    };
                    polygon.push(resolved);
                }
                b.polygon(line, &polygon)?;
            }
            _ => {}
        }
    }
    Ok(b)
}

/// Lines with comments stripped and blanks skipped, keeping 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_off(text: &str) -> Result<Builder> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(line, "missing OFF header"))?
        .trim();
    let (line, counts) = if rest.is_empty() {
        lines
            .next()
            .ok_or_else(|| parse_err(line, "missing counts line"))?
    } else {
        (line, rest)
    };
    let mut tokens = counts.split_whitespace();
    let nv: usize = next_num(&mut tokens, line, "vertex count")?;
    let nf: usize = next_num(&mut tokens, line, "face count")?;

    let mut b = Builder::default();
    b.vertices.reserve(nv);
    for _ in 0..nv {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(line, "unexpected end of vertex list"))?;
        b.vertices.push(read_point(&mut l.split_whitespace(), line)?);
    }
    let mut polygon = Vec::new();
    for _ in 0..nf {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(line, "unexpected end of face list"))?;
        let mut tokens = l.split_whitespace();
        let k: usize = next_num(&mut tokens, line, "polygon size")?;
        polygon.clear();
        for _ in 0..k {
            polygon.push(next_num(&mut tokens, line, "face index")?);
        }
        b.polygon(line, &polygon)?;
    }
    Ok(b)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
    /// Set when the element carries a `property list`.
    has_list: bool,
}

fn parse_ply(text: &str) -> Result<Builder> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(1, "missing ply magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut last_line = 1;
    loop {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, "unterminated header"))?;
        last_line = line;
        let mut tokens = l.split_whitespace();
        match tokens.next() {
            Some("format") => match tokens.next() {
                Some("ascii") => {}
                Some(other) => return Err(Error::UnsupportedFormat(format!("PLY {other}"))),
                None => return Err(parse_err(line, "format line without a value")),
            },
            Some("element") => {
                let name = tokens
                    .next()
                    .ok_or_else(|| parse_err(line, "element without a name"))?
                    .to_string();
                if name != "vertex" && name != "face" {
                    return Err(Error::UnsupportedFormat(format!("PLY element {name:?}")));
                }
                let count = next_num(&mut tokens, line, "element count")?;
                elements.push(PlyElement {
                    name,
                    count,
                    properties: Vec::new(),
                    has_list: false,
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "property before any element"))?;
                let ty = tokens.next().unwrap_or("");
                if ty == "list" {
                    el.has_list = true;
                }
                let name = tokens.last().unwrap_or("").to_string();
                el.properties.push(name);
            }
            Some("end_header") => break,
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => return Err(parse_err(line, format!("unknown header keyword {other:?}"))),
        }
    }

    let mut b = Builder::default();
    let mut polygon = Vec::new();
    for el in &elements {
        match el.name.as_str() {
            "vertex" => {
                let pos = |axis: &str| {
                    el.properties
                        .iter()
                        .position(|p| p == axis)
                        .ok_or_else(|| parse_err(last_line, format!("vertex has no {axis} property")))
                };
                let (ix, iy, iz) = (pos("x")?, pos("y")?, pos("z")?);
                for _ in 0..el.count {
                    let (line, l) = lines
                        .next()
                        .ok_or_else(|| parse_err(last_line, "unexpected end of vertices"))?;
                    last_line = line;
                    let vals: Vec<f64> = l
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| parse_err(line, format!("invalid number {t:?}"))))
                        .collect::<Result<_>>()?;
                    let get = |i: usize| {
                        vals.get(i)
                            .copied()
                            .ok_or_else(|| parse_err(line, "too few vertex properties"))
                    };
                    b.vertices.push(Vector3::new(get(ix)?, get(iy)?, get(iz)?));
                }
            }
            _ => {
                if !el.has_list {
                    return Err(parse_err(last_line, "face element without a list property"));
                }
                for _ in 0..el.count {
                    let (line, l) = lines
                        .next()
                        .ok_or_else(|| parse_err(last_line, "unexpected end of faces"))?;
                    last_line = line;
                    let mut tokens = l.split_whitespace();
                    let k: usize = next_num(&mut tokens, line, "polygon size")?;
                    polygon.clear();
                    for _ in 0..k {
                        polygon.push(next_num(&mut tokens, line, "face index")?);
                    }
                    b.polygon(line, &polygon)?;
                }
            }
        }
    }
    Ok(b)
}

pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn write_off(mesh: &TriMesh) -> String {
    let mut out = format!("OFF\n{} {} 0\n", mesh.vertex_count(), mesh.face_count());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}
