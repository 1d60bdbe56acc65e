use proptest::prelude::*;

use spotlights_core::raycast::{first_hit_bruteforce_with_policy, first_hit_with_policy, Bvh, FacePolicy};
use spotlights_core::shapes;
use spotlights_core::{Ray, TriangleMesh, Vec3};

fn vec3() -> impl Strategy<Value = Vec3> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn soup() -> impl Strategy<Value = TriangleMesh> {
    prop::collection::vec((vec3(), vec3(), vec3()), 1..60).prop_map(|tris| {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (a, b, c) in tris {
            let base = vertices.len() as u32;
            vertices.extend([a, b, c]);
            faces.push([base, base + 1, base + 2]);
        }
        TriangleMesh::new(vertices, faces).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bvh_matches_bruteforce_on_soups(
        mesh in soup(),
        origin in vec3(),
        dir in vec3().prop_filter("nonzero", |d| d.norm() > 1e-3),
        cull in any::<bool>(),
    ) {
        prop_assume!(!mesh.is_empty());
        let policy = if cull { FacePolicy::CullBackFaces } else { FacePolicy::BothFaces };
        let bvh = Bvh::build(&mesh).unwrap();
        prop_assert!(bvh.audit(&mesh).is_ok());
        let ray = Ray::new(origin, dir);
        let fast = first_hit_with_policy(&bvh, &mesh, &ray, 1e-9, f64::INFINITY, policy);
        let slow = first_hit_bruteforce_with_policy(&mesh, &ray, 1e-9, f64::INFINITY, policy);
        match (fast, slow) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                prop_assert!((a.t - b.t).abs() <= 1e-9);
                prop_assert_eq!(a.triangle, b.triangle);
            }
            (a, b) => prop_assert!(false, "bvh {:?} vs brute force {:?}", a, b),
        }
    }
}

#[test]
fn closed_mesh_rays_from_inside_always_hit() {
    for (name, mesh) in shapes::corpus() {
        let bvh = Bvh::build(&mesh).unwrap();
        // Step just behind a few faces (outward winding) to get interior origins.
        for tri in (0..mesh.triangles().len()).step_by(mesh.triangles().len() / 5 + 1) {
            let [a, b, c] = mesh.triangle(tri);
            let inward = -(b - a).cross(c - a).normalize();
            let origin = (a + b + c) / 3.0 + inward * 1e-3;
            for k in 0..200 {
                let f = k as f64;
                let dir = Vec3::new((f * 0.37).sin(), (f * 0.91).cos(), (f * 0.13).sin() * 0.7 + 0.1);
                let ray = Ray::new(origin, dir);
                let hit = first_hit_with_policy(&bvh, &mesh, &ray, 1e-9, f64::INFINITY, FacePolicy::BothFaces);
                assert!(hit.is_some(), "{name}: ray {k} from face {tri} leaked");
            }
        }
    }
}

#[test]
fn t_window_is_respected() {
    let mesh = shapes::box_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
    let bvh = Bvh::build(&mesh).unwrap();
    let ray = Ray::new(Vec3::new(0.0, 0.0, 3.0), -Vec3::Z);
    let near = first_hit_with_policy(&bvh, &mesh, &ray, 1e-9, f64::INFINITY, FacePolicy::BothFaces).unwrap();
    assert!((near.t - 2.5).abs() < 1e-12);
    let far = first_hit_with_policy(&bvh, &mesh, &ray, 2.6, f64::INFINITY, FacePolicy::BothFaces).unwrap();
    assert!((far.t - 3.5).abs() < 1e-12);
    assert!(first_hit_with_policy(&bvh, &mesh, &ray, 1e-9, 2.4, FacePolicy::BothFaces).is_none());
}

fn rotate(q: [f64; 4], v: Vec3) -> Vec3 {
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let (w, u) = (q[0] / n, Vec3::new(q[1] / n, q[2] / n, q[3] / n));
    let t = u.cross(v) * 2.0;
    v + t * w + u.cross(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hits_are_rigidly_covariant(
        quat in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |q| q.0.abs() + q.1.abs() + q.2.abs() + q.3.abs() > 0.1),
        shift in vec3(),
        target in vec3(),
        origin in vec3(),
    ) {
        let q = [quat.0, quat.1, quat.2, quat.3];
        let mesh = shapes::icosphere(1.0, 2);
        let moved = mesh.map_vertices(|v| rotate(q, v) + shift).unwrap();
        let ray = Ray::new(origin * 2.0, target * 0.2 - origin * 2.0);
        let ray2 = Ray::new(rotate(q, ray.origin) + shift, rotate(q, ray.direction));
        let a = first_hit_with_policy(&Bvh::build(&mesh).unwrap(), &mesh, &ray, 1e-9, f64::INFINITY, FacePolicy::BothFaces);
        let b = first_hit_with_policy(&Bvh::build(&moved).unwrap(), &moved, &ray2, 1e-9, f64::INFINITY, FacePolicy::BothFaces);
        match (a, b) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                prop_assert!((a.t - b.t).abs() <= 1e-9);
                prop_assert!((rotate(q, a.point) + shift - b.point).norm() <= 1e-9);
            }
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}
