//! Procedural watertight meshes used for demos, sweeps and tests.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::{TriangleMesh, Vec3};

fn build(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> TriangleMesh {
    TriangleMesh::new(vertices, triangles).expect("procedural mesh is valid")
}

/// Axis-aligned cube with edge length `side`.
pub fn cube(center: Vec3, side: f64) -> TriangleMesh {
    box_mesh(center, Vec3::splat(side))
}

/// Axis-aligned box with edge lengths `size`, outward-facing triangles.
pub fn box_mesh(center: Vec3, size: Vec3) -> TriangleMesh {
    let h = size * 0.5;
    let vertices = (0..8)
        .map(|i| {
            let sx = if i & 1 == 0 { -h.x } else { h.x };
            let sy = if i & 2 == 0 { -h.y } else { h.y };
            let sz = if i & 4 == 0 { -h.z } else { h.z };
            center + Vec3::new(sx, sy, sz)
        })
        .collect();
    let quads: [[u32; 4]; 6] = [
        [0, 2, 3, 1], // -z
        [4, 5, 7, 6], // +z
        [0, 1, 5, 4], // -y
        [2, 6, 7, 3], // +y
        [0, 4, 6, 2], // -x
        [1, 3, 7, 5], // +x
    ];
    let triangles = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    build(vertices, triangles)
}

/// Subdivided icosahedron projected onto a sphere of `radius` at the origin.
/// `subdivisions` = 5 gives 20480 triangles.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let (vertices, triangles) = unit_icosphere(subdivisions);
    build(vertices.into_iter().map(|v| v * radius).collect(), triangles)
}

fn unit_icosphere(subdivisions: u32) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    // Golden-rectangle icosahedron; the first subdivision puts vertices on
    // all six axis poles.
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a as usize] + vertices[b as usize]) * 0.5).normalize());
                (vertices.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    (vertices, triangles)
}

/// Torus around the z axis with tube centre radius `major` and tube radius `minor`.
pub fn torus(major: f64, minor: f64, major_segments: u32, minor_segments: u32) -> TriangleMesh {
    let (nu, nv) = (major_segments.max(3), minor_segments.max(3));
    let mut vertices = Vec::with_capacity((nu * nv) as usize);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let ring = major + minor * v.cos();
            vertices.push(Vec3::new(ring * u.cos(), ring * u.sin(), minor * v.sin()));
        }
    }
    let idx = |i: u32, j: u32| (i % nu) * nv + (j % nv);
    let mut triangles = Vec::with_capacity((2 * nu * nv) as usize);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    build(vertices, triangles)
}

/// Sphere-topology mesh whose surface point in direction `d` lies at `radius(d) · d`.
pub fn radial_mesh(subdivisions: u32, radius: impl Fn(Vec3) -> f64) -> TriangleMesh {
    let (vertices, triangles) = unit_icosphere(subdivisions);
    build(vertices.into_iter().map(|d| d * radius(d)).collect(), triangles)
}

/// Convex ellipsoid with semi-axes `axes`, rotated about z by `yaw` radians.
pub fn ellipsoid(axes: Vec3, yaw: f64, subdivisions: u32) -> TriangleMesh {
    let (s, c) = yaw.sin_cos();
    let (vertices, triangles) = unit_icosphere(subdivisions);
    let vertices = vertices
        .into_iter()
        .map(|d| {
            let p = Vec3::new(d.x * axes.x, d.y * axes.y, d.z * axes.z);
            Vec3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
        })
        .collect();
    build(vertices, triangles)
}

/// Star-shaped, non-convex blob.
pub fn bumpy_sphere(subdivisions: u32) -> TriangleMesh {
    radial_mesh(subdivisions, |d| {
        let theta = d.z.clamp(-1.0, 1.0).acos();
        let phi = d.y.atan2(d.x);
        1.0 + 0.3 * (3.0 * theta).sin() * (2.0 * phi).cos() + 0.1 * (5.0 * phi).sin() * theta.sin()
    })
}

/// Extruded L-shaped block: a concave polyhedron with flat faces.
pub fn l_prism(width: f64, depth: f64, arm: f64, height: f64) -> TriangleMesh {
    // L outline in the xy plane, counter-clockwise.
    let outline = [
        (0.0, 0.0),
        (width, 0.0),
        (width, arm),
        (arm, arm),
        (arm, depth),
        (0.0, depth),
    ];
    let n = outline.len() as u32;
    let mut vertices = Vec::with_capacity(12);
    for z in [0.0, height] {
        for &(x, y) in &outline {
            vertices.push(Vec3::new(x, y, z));
        }
    }
    // Fan from the inner corner (index 3) covers the L without overlap.
    let cap = [[3, 4, 5], [3, 5, 0], [3, 0, 1], [3, 1, 2]];
    let mut triangles = Vec::new();
    for [a, b, c] in cap {
        triangles.push([a, c, b]);
        triangles.push([a + n, b + n, c + n]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        triangles.push([i, j, j + n]);
        triangles.push([i, j + n, i + n]);
    }
    build(vertices, triangles)
}

/// Named watertight fixtures: cube, icosphere, torus, an irregular convex
/// ellipsoid and two concave shapes.
pub fn corpus() -> Vec<(&'static str, TriangleMesh)> {
    vec![
        ("cube", cube(Vec3::ZERO, 1.0)),
        ("icosphere", icosphere(1.0, 3)),
        ("torus", torus(1.0, 0.35, 48, 24)),
        ("ellipsoid", ellipsoid(Vec3::new(1.0, 0.55, 0.35), 0.4, 3)),
        ("bumpy", bumpy_sphere(4)),
        ("l_prism", l_prism(1.0, 0.8, 0.35, 0.5)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every undirected edge shared by exactly two triangles, traversed in
    /// opposite directions: closed and consistently oriented.
    fn assert_watertight(mesh: &TriangleMesh) {
        let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
        for t in mesh.triangles() {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            assert_eq!(count, 1, "edge {a}->{b} used {count} times");
            assert_eq!(directed.get(&(b, a)), Some(&1), "edge {a}->{b} has no twin");
        }
    }

    /// Signed volume; positive for outward-facing triangles.
    fn volume(mesh: &TriangleMesh) -> f64 {
        (0..mesh.triangles().len())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    #[test]
    fn fixtures_are_closed_and_outward() {
        for (name, mesh) in corpus() {
            assert_eq!(mesh.dropped_degenerate(), 0, "{name}");
            assert_watertight(&mesh);
            assert!(volume(&mesh) > 0.0, "{name} has inward faces");
        }
    }

    #[test]
    fn cube_volume_and_counts() {
        let c = cube(Vec3::new(1.0, 2.0, 3.0), 2.0);
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.triangles().len(), 12);
        assert!((volume(&c) - 8.0).abs() < 1e-12);
        assert!((c.surface_area() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn l_prism_volume() {
        let m = l_prism(1.0, 0.8, 0.35, 0.5);
        let area = 1.0 * 0.35 + 0.35 * (0.8 - 0.35);
        assert!((volume(&m) - area * 0.5).abs() < 1e-12);
    }

    #[test]
    fn icosphere_counts() {
        let m = icosphere(2.0, 2);
        assert_eq!(m.triangles().len(), 320);
        for v in m.vertices() {
            assert!((v.norm() - 2.0).abs() < 1e-12);
        }
    }
}
