//! Single-viewpoint pinhole depth scans, used to produce partial clouds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{bounding_sphere, PointCloud, Ray, TriangleMesh, Vec3};
use crate::raycast::MeshCaster;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub viewpoint: Vec3,
    /// Vertical field of view in radians.
    pub fov: f64,
    pub width: u32,
    pub height: u32,
}

/// Renders the mesh from `viewpoint` looking at its bounding-sphere centre and
/// returns the first hit of every pixel ray, in row-major pixel order.
pub fn scan(mesh: &TriangleMesh, params: &ScanParams) -> Result<PointCloud> {
    let ScanParams {
        viewpoint,
        fov,
        width,
        height,
    } = *params;
    if !(fov > 0.0 && fov < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("field of view must be in (0, 180) degrees, got {}", fov.to_degrees())));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter("resolution must be at least 1x1".into()));
    }
    if !viewpoint.is_finite() {
        return Err(Error::InvalidParameter("viewpoint must be finite".into()));
    }
    let sphere = bounding_sphere(mesh)?;
    if (viewpoint - sphere.center).norm() <= sphere.radius {
        return Err(Error::ViewpointInsideObject);
    }

    let forward = (sphere.center - viewpoint).normalize();
    let up_hint = if forward.z.abs() > 0.9 { Vec3::Y } else { Vec3::Z };
    let right = forward.cross(up_hint).normalize();
    let up = right.cross(forward);
    let half_h = (fov * 0.5).tan();
    let half_w = half_h * f64::from(width) / f64::from(height);

    let caster = MeshCaster::new(mesh.clone())?;
    let hits: Vec<Option<Vec3>> = (0..width as usize * height as usize)
        .into_par_iter()
        .map(|k| {
            let (i, j) = ((k % width as usize) as f64, (k / width as usize) as f64);
            let u = (2.0 * (i + 0.5) / f64::from(width) - 1.0) * half_w;
            let v = (1.0 - 2.0 * (j + 0.5) / f64::from(height)) * half_h;
            let ray = Ray::new(viewpoint, forward + right * u + up * v);
            caster.first_hit(&ray, 1e-9, f64::INFINITY).map(|h| h.point)
        })
        .collect();
    Ok(PointCloud::new(hits.into_iter().flatten().collect()))
}
