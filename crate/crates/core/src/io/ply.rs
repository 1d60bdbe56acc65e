//! PLY reader (ascii and binary little-endian) and writers.
//!
//! Only vertex positions, an optional `ray_index` vertex property, and face
//! index lists are interpreted; every other element and property is skipped.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Ascii,
    BinaryLittleEndian,
}

/// One parsed element row: scalar values and list values in property order.
#[derive(Debug, Default)]
struct Row {
    scalars: Vec<(usize, f64)>,
    lists: Vec<(usize, Vec<f64>)>,
}

struct Parsed {
    elements: Vec<Element>,
    rows: Vec<Vec<Row>>,
}

fn parse(bytes: &[u8], path: &Path) -> Result<Parsed> {
    // Header is ASCII lines up to and including "end_header".
    let mut pos = 0;
    let mut lineno = 0;
    let mut next_line = |pos: &mut usize| -> Option<String> {
        if *pos >= bytes.len() {
            return None;
        }
        let end = bytes[*pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| *pos + e);
        let line = String::from_utf8_lossy(&bytes[*pos..end]).trim_end_matches('\r').to_string();
        *pos = (end + 1).min(bytes.len());
        lineno += 1;
        Some(line)
    };
    let perr = |line: usize, msg: String| Error::parse(path, line, msg);

    if next_line(&mut pos).as_deref() != Some("ply") {
        return Err(perr(1, "missing 'ply' magic".into()));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut header_lines = 1;
    loop {
        let line = next_line(&mut pos).ok_or_else(|| perr(header_lines, "unterminated header".into()))?;
        header_lines += 1;
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => format = Some(Format::Ascii),
            ["format", "binary_little_endian", _] => format = Some(Format::BinaryLittleEndian),
            ["format", other, ..] => {
                return Err(perr(header_lines, format!("unsupported PLY format {other}")));
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count.parse().map_err(|_| perr(header_lines, format!("bad element count {count:?}")))?,
                properties: Vec::new(),
            }),
            ["property", "list", count, item, name] => {
                let el = elements.last_mut().ok_or_else(|| perr(header_lines, "property before element".into()))?;
                let count = Scalar::parse(count).ok_or_else(|| perr(header_lines, format!("bad type {count}")))?;
                let item = Scalar::parse(item).ok_or_else(|| perr(header_lines, format!("bad type {item}")))?;
                el.properties.push(Property::List {
                    name: name.to_string(),
                    count,
                    item,
                });
            }
            ["property", ty, name] => {
                let el = elements.last_mut().ok_or_else(|| perr(header_lines, "property before element".into()))?;
                let ty = Scalar::parse(ty).ok_or_else(|| perr(header_lines, format!("bad type {ty}")))?;
                el.properties.push(Property::Scalar {
                    name: name.to_string(),
                    ty,
                });
            }
            _ => return Err(perr(header_lines, format!("unexpected header line {line:?}"))),
        }
    }
    let format = format.ok_or_else(|| perr(header_lines, "missing format line".into()))?;

    let mut rows = Vec::with_capacity(elements.len());
    match format {
        Format::Ascii => {
            let body = String::from_utf8_lossy(&bytes[pos..]);
            let mut lines = body.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
            for el in &elements {
                let mut el_rows = Vec::with_capacity(el.count);
                for _ in 0..el.count {
                    let (i, line) = lines
                        .next()
                        .ok_or_else(|| perr(header_lines + body.lines().count(), format!("missing {} rows", el.name)))?;
                    let line_no = header_lines + i + 1;
                    let mut nums = line.split_whitespace().map(|t| {
                        t.parse::<f64>().map_err(|_| perr(line_no, format!("bad number {t:?}")))
                    });
                    let mut next = || nums.next().unwrap_or_else(|| Err(perr(line_no, "row too short".into())));
                    let mut row = Row::default();
                    for (pi, p) in el.properties.iter().enumerate() {
                        match p {
                            Property::Scalar { .. } => row.scalars.push((pi, next()?)),
                            Property::List { .. } => {
                                let n = next()? as usize;
                                let items = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
                                row.lists.push((pi, items));
                            }
                        }
                    }
                    el_rows.push(row);
                }
                rows.push(el_rows);
            }
        }
        Format::BinaryLittleEndian => {
            let mut p = pos;
            let truncated = || perr(header_lines, "binary payload truncated".into());
            let read = |ty: Scalar, p: &mut usize| -> Result<f64> {
                let end = *p + ty.size();
                if end > bytes.len() {
                    return Err(truncated());
                }
                let v = ty.read_le(&bytes[*p..end]);
                *p = end;
                Ok(v)
            };
            for el in &elements {
                let mut el_rows = Vec::with_capacity(el.count.min(1 << 24));
                for _ in 0..el.count {
                    let mut row = Row::default();
                    for (pi, prop) in el.properties.iter().enumerate() {
                        match prop {
                            Property::Scalar { ty, .. } => row.scalars.push((pi, read(*ty, &mut p)?)),
                            Property::List { count, item, .. } => {
                                let n = read(*count, &mut p)? as usize;
                                let items = (0..n).map(|_| read(*item, &mut p)).collect::<Result<Vec<_>>>()?;
                                row.lists.push((pi, items));
                            }
                        }
                    }
                    el_rows.push(row);
                }
                rows.push(el_rows);
            }
        }
    }
    Ok(Parsed { elements, rows })
}

fn scalar_index(el: &Element, name: &str) -> Option<usize> {
    el.properties
        .iter()
        .position(|p| matches!(p, Property::Scalar { name: n, .. } if n == name))
}

fn vertices(parsed: &Parsed, path: &Path) -> Result<(Vec<Vec3>, Option<Vec<u32>>)> {
    let Some(vi) = parsed.elements.iter().position(|e| e.name == "vertex") else {
        return Ok((Vec::new(), None));
    };
    let el = &parsed.elements[vi];
    let find = |n: &str| {
        scalar_index(el, n).ok_or_else(|| Error::parse(path, 1, format!("vertex element lacks property {n}")))
    };
    let (xi, yi, zi) = (find("x")?, find("y")?, find("z")?);
    let ri = scalar_index(el, "ray_index");
    let get = |row: &Row, pi: usize| row.scalars.iter().find(|(i, _)| *i == pi).map(|&(_, v)| v).unwrap_or(0.0);
    let rows = &parsed.rows[vi];
    let points = rows.iter().map(|r| Vec3::new(get(r, xi), get(r, yi), get(r, zi))).collect();
    let index = ri.map(|ri| rows.iter().map(|r| get(r, ri) as u32).collect());
    Ok((points, index))
}

pub fn parse_ply_mesh(bytes: &[u8], path: &Path) -> Result<TriangleMesh> {
    let parsed = parse(bytes, path)?;
    let (verts, _) = vertices(&parsed, path)?;
    let mut triangles = Vec::new();
    if let Some(fi) = parsed.elements.iter().position(|e| e.name == "face") {
        let el = &parsed.elements[fi];
        let li = el
            .properties
            .iter()
            .position(|p| matches!(p, Property::List { name, .. } if name == "vertex_indices" || name == "vertex_index"))
            .ok_or_else(|| Error::parse(path, 1, "face element lacks vertex_indices"))?;
        for (row_no, row) in parsed.rows[fi].iter().enumerate() {
            let face = &row.lists.iter().find(|(i, _)| *i == li).expect("list parsed").1;
            if face.len() < 3 {
                return Err(Error::parse(path, 1, format!("face {row_no} has fewer than 3 vertices")));
            }
            let idx: Vec<u32> = face.iter().map(|&v| v as u32).collect();
            for k in 1..idx.len() - 1 {
                triangles.push([idx[0], idx[k], idx[k + 1]]);
            }
        }
    }
    TriangleMesh::new(verts, triangles)
}

pub fn parse_ply_cloud(bytes: &[u8], path: &Path) -> Result<PointCloud> {
    let parsed = parse(bytes, path)?;
    match vertices(&parsed, path)? {
        (points, Some(index)) => PointCloud::ordered(points, index),
        (points, None) => Ok(PointCloud::new(points)),
    }
}

/// Binary little-endian PLY with `double` coordinates (exact round trip) and
/// a `uint ray_index` property for ordered clouds.
pub fn write_ply_cloud(cloud: &PointCloud, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format binary_little_endian 1.0")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    if cloud.ray_index().is_some() {
        writeln!(w, "property uint ray_index")?;
    }
    writeln!(w, "end_header")?;
    let mut buf = Vec::with_capacity(cloud.len() * 28);
    for (i, p) in cloud.points().iter().enumerate() {
        for c in p.to_array() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        if let Some(idx) = cloud.ray_index() {
            buf.extend_from_slice(&idx[i].to_le_bytes());
        }
    }
    w.write_all(&buf)
}

pub fn write_ply_mesh_ascii(mesh: &TriangleMesh, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.vertices().len())?;
    writeln!(w, "property double x\nproperty double y\nproperty double z")?;
    writeln!(w, "element face {}", mesh.triangles().len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for v in mesh.vertices() {
        writeln!(w, "{} {} {}", v.x, v.y, v.z)?;
    }
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}
