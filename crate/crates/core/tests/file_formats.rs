use std::fs;

use spotlights_core::io::{self, spl};
use spotlights_core::shapes;
use spotlights_core::spotlights::{build_model, decode, encode_object, DepthArray};
use spotlights_core::{BoundingSphere, Error, PointCloud, Vec3};

#[test]
fn spl_golden_bytes() {
    // 1 primary x 2 secondary rays at 60 degrees, frame centred at (1, 2, 3) with R = 4.
    let model = build_model(1, 2, 60f64.to_radians()).unwrap();
    let frame = BoundingSphere::new(Vec3::new(1.0, 2.0, 3.0), 4.0).unwrap();
    let depths = DepthArray::new(model.id(), vec![0.5, 0.0], frame).unwrap();
    let bytes = spl::to_bytes(&model.descriptor(), &depths).unwrap();

    let mut expected = Vec::new();
    expected.extend_from_slice(b"SPLT\x01\x00");
    expected.extend_from_slice(&[1, 0, 0, 0, 2, 0, 0, 0]);
    expected.extend_from_slice(&60f64.to_radians().to_le_bytes());
    for v in [1.0f64, 2.0, 3.0, 4.0] {
        expected.extend_from_slice(&v.to_le_bytes());
    }
    expected.extend_from_slice(&model.id().0);
    expected.extend_from_slice(&[0x00, 0x00, 0x00, 0x3f, 0, 0, 0, 0]);
    assert_eq!(bytes, expected);
    assert_eq!(bytes.len(), 70);
}

#[test]
fn model_id_is_stable() {
    // Pinned so files written by one build stay readable by the next.
    let id = build_model(32, 64, 60f64.to_radians()).unwrap().id();
    assert_eq!(id.to_string().len(), 16);
    assert_eq!(id, build_model(32, 64, 60f64.to_radians()).unwrap().id());
    assert_ne!(id, build_model(64, 32, 60f64.to_radians()).unwrap().id());
    assert_ne!(id, build_model(32, 64, 59.999f64.to_radians()).unwrap().id());
}

#[test]
fn spl_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.spl");
    let model = build_model(32, 64, 60f64.to_radians()).unwrap();
    let mesh = shapes::torus(2.0, 0.5, 32, 16).map_vertices(|v| v + Vec3::new(0.0, 0.0, 5.0)).unwrap();
    let depths = encode_object(&model, &mesh).unwrap();
    spl::write_spl(&path, &model.descriptor(), &depths).unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 8254);
    let back = spl::read_spl(&path).unwrap();
    assert_eq!(back.descriptor, model.descriptor());
    assert_eq!(back.depths, depths);
    assert!(matches!(spl::read_spl(dir.path().join("missing.spl")), Err(Error::Io(_))));
}

#[test]
fn spl_reader_errors_are_io_class() {
    for bytes in [&b"SP"[..], &b"XXXXXXXXXX"[..], &b"SPLT\x01\x00"[..]] {
        let err = spl::from_bytes(bytes).unwrap_err();
        assert!(err.is_io(), "{err}");
    }
}

#[test]
fn obj_and_ply_meshes_load_identically() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = shapes::bumpy_sphere(2);
    let obj = dir.path().join("m.obj");
    let ply = dir.path().join("m.PLY");
    io::save_mesh(&obj, &mesh).unwrap();
    io::save_mesh(&ply, &mesh).unwrap();
    let a = io::load_mesh(&obj).unwrap();
    let b = io::load_mesh(&ply).unwrap();
    assert_eq!(a.triangles(), mesh.triangles());
    assert_eq!(a, b);
}

#[test]
fn decoded_cloud_keeps_ray_index_through_ply() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_model(32, 64, 60f64.to_radians()).unwrap();
    let depths = encode_object(&model, &shapes::cube(Vec3::ZERO, 1.0)).unwrap();
    let cloud = decode(&model, &depths, 0.0).unwrap();
    let path = dir.path().join("c.ply");
    io::save_cloud(&path, &cloud).unwrap();
    assert_eq!(io::load_cloud(&path).unwrap(), cloud);

    let xyz = dir.path().join("c.xyz");
    io::save_cloud(&xyz, &cloud).unwrap();
    let plain = io::load_cloud(&xyz).unwrap();
    assert_eq!(plain.points(), cloud.points());
    assert!(plain.ray_index().is_none());
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.obj");
    fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n").unwrap();
    let err = io::load_mesh(&path).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 4, .. }));
    assert!(err.to_string().contains("broken.obj:4"), "{err}");
    assert!(matches!(io::load_cloud(dir.path().join("c.las")), Err(Error::UnsupportedFormat(_))));
    let empty = PointCloud::default();
    io::save_cloud(dir.path().join("e.xyz"), &empty).unwrap();
    assert!(io::load_cloud(dir.path().join("e.xyz")).unwrap().is_empty());
}
