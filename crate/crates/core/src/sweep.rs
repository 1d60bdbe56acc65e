//! Completeness and hit-ratio sweeps over ray budgets and opening angles.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{bounding_sphere, normalize_to_unit_sphere, TriangleMesh};
use crate::metrics::{completeness, hit_ratio, Norm};
use crate::spotlights::{build_model, decode, encode};
use crate::surface::sample_surface;

pub const CSV_HEADER: &str = "mesh,rays,angle_deg,completeness,hit_ratio";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rays: Vec<u32>,
    pub angles_deg: Vec<f64>,
    /// Rays per viewpoint; the primary count is `rays / secondary`.
    pub secondary: u32,
    pub gt_points: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rays: vec![2048, 4096, 8192],
            angles_deg: vec![30.0, 60.0, 83.0],
            secondary: 64,
            gt_points: 16384,
            seed: 2022,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mesh: String,
    pub rays: u32,
    pub angle_deg: f64,
    /// Mean L2 distance from the dense ground truth to the decoded cloud;
    /// infinite when nothing was hit.
    pub completeness: f64,
    pub hit_ratio: f64,
}

impl SweepRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.8},{:.6}",
            self.mesh, self.rays, self.angle_deg, self.completeness, self.hit_ratio
        )
    }
}

/// Runs every (rays, angle) combination on one mesh, normalized into its
/// bounding sphere first.
pub fn sweep_mesh(name: &str, mesh: &TriangleMesh, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.secondary == 0 {
        return Err(Error::InvalidParameter("secondary count must be positive".into()));
    }
    let unit = normalize_to_unit_sphere(mesh, &bounding_sphere(mesh)?)?;
    let gt = sample_surface(&unit, config.gt_points, config.seed)?;
    let mut rows = Vec::new();
    for &rays in &config.rays {
        if rays % config.secondary != 0 || rays == 0 {
            return Err(Error::InvalidParameter(format!(
                "ray budget {rays} is not a positive multiple of {}",
                config.secondary
            )));
        }
        for &angle in &config.angles_deg {
            let model = build_model(rays / config.secondary, config.secondary, angle.to_radians())?;
            let depths = encode(&model, &unit)?;
            let cloud = decode(&model, &depths, 0.0)?;
            let completeness = if cloud.is_empty() {
                f64::INFINITY
            } else {
                completeness(&cloud, &gt, Norm::L2)?
            };
            rows.push(SweepRow {
                mesh: name.to_string(),
                rays,
                angle_deg: angle,
                completeness,
                hit_ratio: hit_ratio(&depths),
            });
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[SweepRow], config: &SweepConfig, mut w: impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "# seed={} gt_points={} secondary={} norm=l2",
        config.seed, config.gt_points, config.secondary
    )?;
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn grid_shape() {
        let config = SweepConfig {
            rays: vec![256, 512],
            angles_deg: vec![30.0, 60.0],
            secondary: 32,
            gt_points: 500,
            seed: 1,
        };
        let rows = sweep_mesh("ico", &shapes::icosphere(1.0, 2), &config).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].rays, rows[1].angle_deg), (256, 60.0));
        assert!(rows.iter().all(|r| r.completeness.is_finite() && r.hit_ratio > 0.0));
        let mut buf = Vec::new();
        write_csv(&rows, &config, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# seed=1"));
        assert_eq!(text.lines().nth(1), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn rejects_uneven_budget() {
        let config = SweepConfig {
            rays: vec![100],
            ..SweepConfig::default()
        };
        assert!(sweep_mesh("c", &shapes::cube(crate::Vec3::ZERO, 1.0), &config).is_err());
    }
}
