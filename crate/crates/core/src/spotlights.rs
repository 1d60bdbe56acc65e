//! The ray arrangement, and encoding shapes to depth arrays and back.
//!
//! A model places `n_primary` viewpoints on the unit sphere with the Fibonacci
//! map. Each viewpoint casts `m_secondary` rays through a Fibonacci cap of
//! half-angle `ω` around the inward direction. Rays are numbered
//! primary-major: ray `k` belongs to viewpoint `k / m_secondary`.
//!
//! A depth is the first-hit distance divided by the sphere diameter (2 in the
//! normalized frame), so every hit lands in `(0, 1]` and `0` marks a miss.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{bounding_sphere, normalize_to_unit_sphere, BoundingSphere, PointCloud, Ray, TriangleMesh, Vec3};
use crate::raycast::MeshCaster;
use crate::sphere_sampling::{cap_points, sphere_points};

/// Hits closer than this to the viewpoint are ignored.
pub const SELF_HIT_EPSILON: f64 = 1e-9;
/// Tolerance on the unit-ball containment check in [`encode`].
pub const CONTAINMENT_TOLERANCE: f64 = 1e-6;
/// Default decode threshold for predicted arrays.
pub const DEFAULT_CLIP: f32 = 0.2;

/// Bumped whenever the lattice or cap frame convention changes.
const LATTICE_VERSION: &[u8] = b"spotlights/fibonacci-cylindrical-equal-area/v1";

/// 8-byte digest binding a depth array to the arrangement that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelId(pub [u8; 8]);

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// The parameters that fully determine a ray arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelDescriptor {
    pub n_primary: u32,
    pub m_secondary: u32,
    /// Cap half-angle in radians.
    pub opening_angle: f64,
}

impl ModelDescriptor {
    pub fn new(n_primary: u32, m_secondary: u32, opening_angle: f64) -> Result<Self> {
        if n_primary == 0 || m_secondary == 0 {
            return Err(Error::InvalidParameter(format!(
                "ray counts must be at least 1 (primary {n_primary}, secondary {m_secondary})"
            )));
        }
        if !(opening_angle > 0.0 && opening_angle <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidOpeningAngle(opening_angle.to_degrees()));
        }
        Ok(ModelDescriptor {
            n_primary,
            m_secondary,
            opening_angle,
        })
    }

    pub fn ray_count(&self) -> usize {
        self.n_primary as usize * self.m_secondary as usize
    }

    pub fn id(&self) -> ModelId {
        let mut h = Sha256::new();
        h.update(LATTICE_VERSION);
        h.update(self.n_primary.to_le_bytes());
        h.update(self.m_secondary.to_le_bytes());
        h.update(self.opening_angle.to_le_bytes());
        let digest = h.finalize();
        let mut id = [0u8; 8];
        id.copy_from_slice(&digest[..8]);
        ModelId(id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpotlightsModel {
    descriptor: ModelDescriptor,
    id: ModelId,
    primary_points: Vec<Vec3>,
    ray_directions: Vec<Vec3>,
}

impl SpotlightsModel {
    pub fn from_descriptor(descriptor: ModelDescriptor) -> Result<Self> {
        let ModelDescriptor {
            n_primary,
            m_secondary,
            opening_angle,
        } = ModelDescriptor::new(descriptor.n_primary, descriptor.m_secondary, descriptor.opening_angle)?;
        let primary_points = sphere_points(n_primary as usize)?.directions;
        let mut ray_directions = Vec::with_capacity(descriptor.ray_count());
        for &p in &primary_points {
            // Viewpoints sit on the unit sphere around the origin, so the inward axis is -p.
            let cap = cap_points(m_secondary as usize, -p, opening_angle)?;
            ray_directions.extend(cap.directions);
        }
        Ok(SpotlightsModel {
            id: descriptor.id(),
            descriptor,
            primary_points,
            ray_directions,
        })
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        self.descriptor
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn n_primary(&self) -> usize {
        self.descriptor.n_primary as usize
    }

    pub fn m_secondary(&self) -> usize {
        self.descriptor.m_secondary as usize
    }

    pub fn opening_angle(&self) -> f64 {
        self.descriptor.opening_angle
    }

    pub fn ray_count(&self) -> usize {
        self.ray_directions.len()
    }

    pub fn primary_points(&self) -> &[Vec3] {
        &self.primary_points
    }

    pub fn ray_directions(&self) -> &[Vec3] {
        &self.ray_directions
    }

    /// Ray `k` in the normalized frame.
    pub fn ray(&self, k: usize) -> Ray {
        Ray {
            origin: self.primary_points[k / self.m_secondary()],
            direction: self.ray_directions[k],
        }
    }
}

/// Builds the arrangement for `n_primary` viewpoints with `m_secondary` rays each.
pub fn build_model(n_primary: u32, m_secondary: u32, opening_angle: f64) -> Result<SpotlightsModel> {
    SpotlightsModel::from_descriptor(ModelDescriptor::new(n_primary, m_secondary, opening_angle)?)
}

/// Normalized depths for one model, plus the world frame of the encoded object.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthArray {
    model_id: ModelId,
    values: Vec<f32>,
    frame: BoundingSphere,
}

impl DepthArray {
    pub fn new(model_id: ModelId, values: Vec<f32>, frame: BoundingSphere) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::DepthOutOfRange {
                index,
                value: values[index],
            });
        }
        BoundingSphere::new(frame.center, frame.radius)?;
        Ok(DepthArray {
            model_id,
            values,
            frame,
        })
    }

    pub fn zeros(model: &SpotlightsModel) -> Self {
        DepthArray {
            model_id: model.id(),
            values: vec![0.0; model.ray_count()],
            frame: BoundingSphere::UNIT,
        }
    }

    pub fn model_id(&self) -> ModelId {
        self.model_id
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn frame(&self) -> BoundingSphere {
        self.frame
    }

    pub fn with_frame(mut self, frame: BoundingSphere) -> Self {
        self.frame = frame;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn hit_count(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

fn check_inside_unit_ball(mesh: &TriangleMesh) -> Result<()> {
    let max = mesh.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max > 1.0 + CONTAINMENT_TOLERANCE {
        return Err(Error::ObjectExceedsSphere(max));
    }
    Ok(())
}

fn cast_all(model: &SpotlightsModel, caster: &MeshCaster) -> Vec<f32> {
    (0..model.ray_count())
        .into_par_iter()
        .map(|k| match caster.first_hit(&model.ray(k), SELF_HIT_EPSILON, f64::INFINITY) {
            Some(hit) => ((hit.t * 0.5) as f32).min(1.0),
            None => 0.0,
        })
        .collect()
}

/// Encodes a mesh that already lies in the unit ball. The stored frame is the
/// unit sphere at the origin.
pub fn encode(model: &SpotlightsModel, mesh: &TriangleMesh) -> Result<DepthArray> {
    check_inside_unit_ball(mesh)?;
    let caster = MeshCaster::new(mesh.clone())?;
    DepthArray::new(model.id(), cast_all(model, &caster), BoundingSphere::UNIT)
}

/// [`encode`] on a dedicated pool of `threads` workers. The output does not
/// depend on the thread count.
pub fn encode_with_threads(model: &SpotlightsModel, mesh: &TriangleMesh, threads: usize) -> Result<DepthArray> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| encode(model, mesh))
}

/// Normalizes a world-frame mesh into its bounding sphere and encodes it,
/// recording the sphere so decoded clouds can be mapped back.
pub fn encode_object(model: &SpotlightsModel, mesh: &TriangleMesh) -> Result<DepthArray> {
    let sphere = bounding_sphere(mesh)?;
    let normalized = normalize_to_unit_sphere(mesh, &sphere)?;
    Ok(encode(model, &normalized)?.with_frame(sphere))
}

fn check_binding(model: &SpotlightsModel, depths: &DepthArray) -> Result<()> {
    if depths.len() != model.ray_count() {
        return Err(Error::SizeMismatch {
            expected: model.ray_count(),
            actual: depths.len(),
        });
    }
    if depths.model_id() != model.id() {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

/// Recovers the ordered cloud in the normalized frame. Misses and depths
/// strictly below `clip` are dropped; ground-truth arrays are decoded with
/// `clip = 0`.
pub fn decode(model: &SpotlightsModel, depths: &DepthArray, clip: f32) -> Result<PointCloud> {
    check_binding(model, depths)?;
    let mut points = Vec::new();
    let mut index = Vec::new();
    for (k, &d) in depths.values().iter().enumerate() {
        if d > 0.0 && d >= clip {
            points.push(model.ray(k).at(f64::from(d) * 2.0));
            index.push(k as u32);
        }
    }
    PointCloud::ordered(points, index)
}

/// [`decode`] followed by the map back into the array's world frame.
pub fn decode_world(model: &SpotlightsModel, depths: &DepthArray, clip: f32) -> Result<PointCloud> {
    let frame = depths.frame();
    Ok(decode(model, depths, clip)?.map_points(|p| frame.to_world(p)))
}

/// Index pairs `(i, j)` with `a[i]` and `b[j]` produced by the same ray.
pub fn ordered_correspondence(a: &PointCloud, b: &PointCloud) -> Result<Vec<(usize, usize)>> {
    let (ra, rb) = match (a.ray_index(), b.ray_index()) {
        (Some(ra), Some(rb)) => (ra, rb),
        _ => return Err(Error::MissingRayIndex),
    };
    let mut pairs = Vec::with_capacity(ra.len().min(rb.len()));
    let (mut i, mut j) = (0, 0);
    while i < ra.len() && j < rb.len() {
        match ra[i].cmp(&rb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                pairs.push((i, j));
                i += 1;
                j += 1;
            }
        }
    }
    Ok(pairs)
}
