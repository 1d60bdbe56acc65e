//! Fibonacci lattices on the unit square, the unit sphere and spherical caps.
//!
//! Point `i` of an `n`-point lattice is `(frac(i / Φ), i / n)`. The sphere map
//! is the cylindrical equal-area projection `(φ, θ) = (2πx, acos(1 − 2y))`; the
//! cap map restricts the same projection to polar angles in `[0, ω]`, so each
//! cap point still owns an equal share of the cap's solid angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Golden ratio `(1 + √5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, PartialEq)]
pub struct FibonacciLattice2D {
    pub points: Vec<[f64; 2]>,
}

impl FibonacciLattice2D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPointSet {
    pub directions: Vec<Vec3>,
    /// `(φ, θ)` per point: azimuth in `[0, 2π)`, polar angle from +z in `[0, π]`.
    pub angles: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapPointSet {
    pub axis: Vec3,
    pub max_polar_angle: f64,
    pub directions: Vec<Vec3>,
}

pub fn fibonacci_lattice(n: usize) -> Result<FibonacciLattice2D> {
    if n == 0 {
        return Err(Error::InvalidParameter("lattice size must be at least 1".into()));
    }
    let inv_n = 1.0 / n as f64;
    let points = (0..n)
        .map(|i| {
            let x = (i as f64 / GOLDEN_RATIO).fract();
            [x, i as f64 * inv_n]
        })
        .collect();
    Ok(FibonacciLattice2D { points })
}

fn spherical(phi: f64, theta: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// `n` quasi-uniform directions on the unit sphere. Point 0 is the +z pole.
pub fn sphere_points(n: usize) -> Result<SphericalPointSet> {
    let lattice = fibonacci_lattice(n)?;
    let angles: Vec<(f64, f64)> = lattice
        .points
        .iter()
        .map(|&[x, y]| (2.0 * PI * x, (1.0 - 2.0 * y).acos()))
        .collect();
    let directions = angles.iter().map(|&(phi, theta)| spherical(phi, theta)).collect();
    Ok(SphericalPointSet { directions, angles })
}

/// Orthonormal tangent pair `(t1, t2)` completing `axis` to a right-handed
/// frame `(t1, t2, axis)`.
///
/// The reference vector is +z unless the axis is within ~25° of it, then +x.
/// Encoded depth arrays are only comparable between implementations that use
/// this exact convention.
pub fn cap_frame(axis: Vec3) -> (Vec3, Vec3) {
    let reference = if axis.z.abs() > 0.9 { Vec3::X } else { Vec3::Z };
    let t1 = axis.cross(reference).normalize();
    let t2 = axis.cross(t1);
    (t1, t2)
}

fn check_cap_angle(omega: f64) -> Result<()> {
    if omega > 0.0 && omega <= PI / 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidOpeningAngle(omega.to_degrees()))
    }
}

/// `m` directions within polar angle `omega` of `axis`.
pub fn cap_points(m: usize, axis: Vec3, omega: f64) -> Result<CapPointSet> {
    check_cap_angle(omega)?;
    if (axis.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "cap axis must be unit length (norm {})",
            axis.norm()
        )));
    }
    let lattice = fibonacci_lattice(m)?;
    let (t1, t2) = cap_frame(axis);
    let one_minus_cos = 1.0 - omega.cos();
    let directions = lattice
        .points
        .iter()
        .map(|&[x, y]| {
            let theta = (1.0 - one_minus_cos * y).acos();
            let local = spherical(2.0 * PI * x, theta);
            t1 * local.x + t2 * local.y + axis * local.z
        })
        .collect();
    Ok(CapPointSet {
        axis,
        max_polar_angle: omega,
        directions,
    })
}

/// Polar half-angle of the cap cut from a sphere of radius `big_r` by a
/// sphere of radius `r_small` centred on its surface: `acos(r / 2R)`.
pub fn opening_angle(r_small: f64, big_r: f64) -> Result<f64> {
    if big_r.is_nan() || r_small.is_nan() || big_r <= 0.0 || r_small <= 0.0 {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    if r_small > 2.0 * big_r {
        return Err(Error::InvalidParameter(format!(
            "small sphere radius {r_small} exceeds the outer diameter {}",
            2.0 * big_r
        )));
    }
    Ok((r_small / (2.0 * big_r)).acos())
}
