//! File formats: SPL depth arrays, OBJ/PLY meshes, PLY/XYZ point clouds.

pub mod obj;
pub mod ply;
pub mod spl;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, TriangleMesh, Vec3};

pub use spl::{read_spl, write_spl, SplFile};

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default()
}

/// Loads an `.obj` or `.ply` mesh.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    match extension(path).as_str() {
        "obj" => obj::parse_obj(&fs::read_to_string(path)?, path),
        "ply" => ply::parse_ply_mesh(&fs::read(path)?, path),
        other => Err(Error::UnsupportedFormat(format!("mesh extension {other:?}"))),
    }
}

pub fn save_mesh(path: impl AsRef<Path>, mesh: &TriangleMesh) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(fs::File::create(path)?);
    match extension(path).as_str() {
        "obj" => obj::write_obj(mesh, &mut w)?,
        "ply" => ply::write_ply_mesh_ascii(mesh, &mut w)?,
        other => return Err(Error::UnsupportedFormat(format!("mesh extension {other:?}"))),
    }
    w.flush()?;
    Ok(())
}

/// Loads a `.ply` or `.xyz` point cloud. PLY clouds keep their ray indices.
pub fn load_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    match extension(path).as_str() {
        "ply" => ply::parse_ply_cloud(&fs::read(path)?, path),
        "xyz" | "txt" => parse_xyz(&fs::read_to_string(path)?, path),
        other => Err(Error::UnsupportedFormat(format!("point cloud extension {other:?}"))),
    }
}

pub fn save_cloud(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(fs::File::create(path)?);
    match extension(path).as_str() {
        "ply" => ply::write_ply_cloud(cloud, &mut w)?,
        "xyz" | "txt" => write_xyz(cloud, &mut w)?,
        other => return Err(Error::UnsupportedFormat(format!("point cloud extension {other:?}"))),
    }
    w.flush()?;
    Ok(())
}

/// Whitespace-separated `x y z` rows; `#` starts a comment.
pub fn parse_xyz(text: &str, path: &Path) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| Error::parse(path, i + 1, format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if nums.len() < 3 {
            return Err(Error::parse(path, i + 1, "expected 3 coordinates"));
        }
        points.push(Vec3::new(nums[0], nums[1], nums[2]));
    }
    Ok(PointCloud::new(points))
}

/// Shortest round-trip decimal formatting, so reloading is exact.
pub fn write_xyz(cloud: &PointCloud, mut w: impl Write) -> std::io::Result<()> {
    for p in cloud.points() {
        writeln!(w, "{:?} {:?} {:?}", p.x, p.y, p.z)?;
    }
    Ok(())
}
