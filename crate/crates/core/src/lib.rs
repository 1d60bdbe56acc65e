//! Spotlights: a fixed arrangement of rays cast from viewpoints on a bounding
//! sphere, turning a 3D shape into a flat array of depths and back into an
//! ordered point cloud.
//!
//! ```
//! use spotlights_core::{build_model, decode, encode, shapes};
//!
//! let model = build_model(32, 16, 60f64.to_radians()).unwrap();
//! let mesh = shapes::icosphere(0.5, 2);
//! let depths = encode(&model, &mesh).unwrap();
//! let cloud = decode(&model, &depths, 0.0).unwrap();
//! assert_eq!(cloud.len(), depths.hit_count());
//! ```

pub mod density;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kdtree;
pub mod metrics;
pub mod raycast;
pub mod scan;
pub mod shapes;
pub mod sphere_sampling;
pub mod spotlights;
pub mod surface;
pub mod sweep;

pub use error::{Error, Result};
pub use geometry::{bounding_box, bounding_sphere, normalize_to_unit_sphere, BoundingSphere, PointCloud, Ray, TriangleMesh, Vec3};
pub use metrics::{accuracy, chamfer, completeness, consistency, hit_ratio, MetricKind, MetricReport, Norm};
pub use raycast::{first_hit, first_hit_bruteforce, Bvh, FacePolicy, HitRecord, MeshCaster};
pub use sphere_sampling::{cap_points, fibonacci_lattice, opening_angle, sphere_points};
pub use spotlights::{
    build_model, decode, decode_world, encode, encode_object, encode_with_threads, ordered_correspondence, DepthArray,
    ModelDescriptor, ModelId, SpotlightsModel, DEFAULT_CLIP,
};
