use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spotlights_core::metrics::hit_ratio;
use spotlights_core::shapes;
use spotlights_core::spotlights::{
    build_model, decode, decode_world, encode, encode_object, ordered_correspondence, DepthArray,
};
use spotlights_core::surface::distance_to_surface;
use spotlights_core::{bounding_sphere, normalize_to_unit_sphere, Error, TriangleMesh, Vec3};

/// Smaller root of |o + t d|^2 = r^2 for unit d.
fn ray_sphere(o: Vec3, d: Vec3, r: f64) -> Option<f64> {
    let b = o.dot(d);
    let disc = b * b - (o.dot(o) - r * r);
    (disc >= 0.0).then(|| -b - disc.sqrt())
}

#[test]
fn sphere_depths_match_closed_form() {
    let model = build_model(32, 64, 60f64.to_radians()).unwrap();
    let sphere = shapes::icosphere(0.5, 5);
    let depths = encode(&model, &sphere).unwrap();
    // Chord sag of the tessellation bounds the gap to the analytic sphere.
    let sag = 2e-4;
    let mut hits = 0;
    for (k, &d) in depths.values().iter().enumerate() {
        let ray = model.ray(k);
        match ray_sphere(ray.origin, ray.direction, 0.5) {
            Some(t) if t > 0.0 => {
                // Rays that graze the rim may slip past the inscribed polyhedron.
                if d == 0.0 {
                    let miss = ray.origin.cross(ray.direction).norm();
                    assert!(miss > 0.5 - sag, "ray {k} missed at distance {miss}");
                    continue;
                }
                hits += 1;
                let t_mesh = 2.0 * f64::from(d);
                let grazing = ray.direction.dot(-ray.at(t).normalize()).max(1e-3);
                assert!((t_mesh - t).abs() < sag / grazing, "ray {k}: {t_mesh} vs {t}");
            }
            _ => assert_eq!(d, 0.0, "ray {k} should miss"),
        }
    }
    assert!(hits > 500);
    // Straight down the pole the depth is 0.5 / 2.
    let pole = build_model(1, 1, 0.3).unwrap();
    let d = encode(&pole, &sphere).unwrap().values()[0];
    assert!((f64::from(d) - 0.25).abs() < 1e-6);
    let cloud = decode(&pole, &encode(&pole, &sphere).unwrap(), 0.0).unwrap();
    assert!((cloud.points()[0] - Vec3::new(0.0, 0.0, 0.5)).norm() < 2e-6);
}

#[test]
fn hit_ratio_matches_visibility_cone() {
    // A centred sphere of radius 1/2 fills every direction within asin(1/2) of
    // a viewpoint's inward axis; caps sample uniformly by solid angle.
    let sphere = shapes::icosphere(0.5, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for omega_deg in [10.0f64, 45.0, 70.0] {
        let omega = omega_deg.to_radians();
        let model = build_model(64, 64, omega).unwrap();
        let measured = hit_ratio(&encode(&model, &sphere).unwrap());
        let cone = 30f64.to_radians();
        let trials = 200_000;
        let inside = (0..trials)
            .filter(|_| {
                let cos_theta = 1.0 - rng.random::<f64>() * (1.0 - omega.cos());
                cos_theta >= cone.cos()
            })
            .count();
        let expected = inside as f64 / trials as f64;
        assert!((measured - expected).abs() < 0.02, "omega {omega_deg}: {measured} vs {expected}");
    }
}

#[test]
fn encode_rejects_mesh_outside_unit_ball() {
    let model = build_model(4, 4, 1.0).unwrap();
    let err = encode(&model, &shapes::cube(Vec3::ZERO, 2.0)).unwrap_err();
    assert!(matches!(err, Error::ObjectExceedsSphere(_)));
    assert!(err.to_string().contains("object exceeds bounding sphere"));
}

#[test]
fn world_frame_roundtrip() {
    let model = build_model(48, 32, 60f64.to_radians()).unwrap();
    let mesh = shapes::torus(3.0, 1.0, 32, 16).map_vertices(|v| v * 2.0 + Vec3::new(10.0, -4.0, 7.0)).unwrap();
    let depths = encode_object(&model, &mesh).unwrap();
    let frame = depths.frame();
    assert_eq!(frame, bounding_sphere(&mesh).unwrap());
    let world = decode_world(&model, &depths, 0.0).unwrap();
    assert!(!world.is_empty());
    for p in world.points() {
        assert!(distance_to_surface(&mesh, *p) < 1e-6 * frame.radius);
    }
}

#[test]
fn clipping_only_removes_points() {
    let model = build_model(32, 64, 60f64.to_radians()).unwrap();
    let unit = |m: TriangleMesh| normalize_to_unit_sphere(&m, &bounding_sphere(&m).unwrap()).unwrap();
    let depths = encode(&model, &unit(shapes::l_prism(1.0, 0.8, 0.35, 0.5))).unwrap();
    let full = decode(&model, &depths, 0.0).unwrap();
    let clipped = decode(&model, &depths, 0.2).unwrap();
    assert!(clipped.len() <= full.len());
    let pairs = ordered_correspondence(&clipped, &full).unwrap();
    assert_eq!(pairs.len(), clipped.len());
    assert!(pairs.iter().all(|&(i, j)| clipped.points()[i] == full.points()[j]));

    let zeros = DepthArray::zeros(&model);
    assert!(decode(&model, &zeros, 0.0).unwrap().is_empty());
}

#[test]
fn decode_checks_binding() {
    let a = build_model(8, 8, 1.0).unwrap();
    let b = build_model(8, 8, 0.9).unwrap();
    assert!(matches!(decode(&b, &DepthArray::zeros(&a), 0.0), Err(Error::ModelMismatch)));
}

#[test]
fn poses_normalized_separately_pair_up() {
    let model = build_model(32, 64, 60f64.to_radians()).unwrap();
    let mesh = shapes::ellipsoid(Vec3::new(1.0, 0.55, 0.35), 0.4, 3);
    let moved = mesh.map_vertices(|v| v * 3.5 + Vec3::new(-2.0, 8.0, 1.0)).unwrap();
    let (da, db) = (encode_object(&model, &mesh).unwrap(), encode_object(&model, &moved).unwrap());
    let (a, b) = (decode(&model, &da, 0.0).unwrap(), decode(&model, &db, 0.0).unwrap());
    let both = da.values().iter().zip(db.values()).filter(|(x, y)| **x > 0.0 && **y > 0.0).count();
    let pairs = ordered_correspondence(&a, &b).unwrap();
    assert_eq!(pairs.len(), both);
    for (i, j) in pairs {
        assert!((a.points()[i] - b.points()[j]).norm() < 1e-5);
    }
}

#[test]
fn triangle_order_does_not_matter() {
    let model = build_model(16, 32, 70f64.to_radians()).unwrap();
    let mesh = shapes::torus(0.6, 0.25, 24, 12);
    let mut tris = mesh.triangles().to_vec();
    tris.reverse();
    let rotated: Vec<[u32; 3]> = tris.iter().map(|t| [t[1], t[2], t[0]]).collect();
    let shuffled = TriangleMesh::new(mesh.vertices().to_vec(), rotated).unwrap();
    assert_eq!(encode(&model, &mesh).unwrap(), encode(&model, &shuffled).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn depths_in_range_and_indices_increasing(
        n in 1u32..40,
        m in 1u32..40,
        omega in 0.05f64..std::f64::consts::FRAC_PI_2,
        k in 0usize..6,
    ) {
        let (_, mesh) = &shapes::corpus()[k];
        let unit = normalize_to_unit_sphere(mesh, &bounding_sphere(mesh).unwrap()).unwrap();
        let model = build_model(n, m, omega).unwrap();
        let depths = encode(&model, &unit).unwrap();
        prop_assert!(depths.values().iter().all(|d| (0.0..=1.0).contains(d)));
        let cloud = decode(&model, &depths, 0.0).unwrap();
        let idx = cloud.ray_index().unwrap();
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(cloud.len(), depths.hit_count());
    }
}
