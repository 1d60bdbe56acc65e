//! First-hit ray casting against triangle meshes.
//!
//! [`Bvh`] is a median-split bounding volume hierarchy; [`first_hit`] walks it
//! and [`first_hit_bruteforce`] tests every triangle. Both share the same
//! triangle test, so they agree on `t` exactly whenever they agree on the
//! triangle.

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Ray, TriangleMesh, Vec3};

/// `|det|` below this is treated as a ray parallel to the triangle plane.
pub const PARALLEL_EPSILON: f64 = 1e-12;
/// Barycentric slack so rays crossing a shared edge hit at least one side.
pub const EDGE_EPSILON: f64 = 1e-9;
/// Maximum number of triangles per leaf.
pub const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FacePolicy {
    /// Hit front and back faces.
    #[default]
    BothFaces,
    /// Ignore triangles whose counter-clockwise normal faces away from the ray origin.
    CullBackFaces,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRecord {
    /// Distance along the ray.
    pub t: f64,
    pub triangle: usize,
    pub point: Vec3,
}

/// Ray parameter of the intersection with triangle `(a, b, c)`, if any.
#[inline]
pub fn intersect_triangle(ray: &Ray, [a, b, c]: [Vec3; 3], policy: FacePolicy) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = ray.direction.cross(e2);
    let det = e1.dot(p);
    match policy {
        FacePolicy::BothFaces if det.abs() < PARALLEL_EPSILON => return None,
        FacePolicy::CullBackFaces if det < PARALLEL_EPSILON => return None,
        _ => {}
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(p) * inv;
    if !(-EDGE_EPSILON..=1.0 + EDGE_EPSILON).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.direction.dot(q) * inv;
    if v < -EDGE_EPSILON || u + v > 1.0 + EDGE_EPSILON {
        return None;
    }
    Some(e2.dot(q) * inv)
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

fn triangle_bounds(tri: &[Vec3; 3]) -> Aabb {
    Aabb::from_points(tri.iter())
}

/// Inflates a box so that hits accepted within the barycentric slack still
/// fall inside it.
fn pad(b: Aabb) -> Aabb {
    let e = b.extent();
    let slack = 1e-7 * (1.0 + e.norm_l1()) + 1e-12 * b.min.norm_l1().max(b.max.norm_l1());
    Aabb {
        min: b.min - Vec3::splat(slack),
        max: b.max + Vec3::splat(slack),
    }
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Result<Bvh> {
        if mesh.is_empty() {
            return Err(Error::EmptyGeometry);
        }
        let n = mesh.triangles().len();
        let bounds: Vec<Aabb> = (0..n).map(|i| triangle_bounds(&mesh.triangle(i))).collect();
        let centroids: Vec<Vec3> = bounds.iter().map(Aabb::center).collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut order, 0, &bounds, &centroids);
        Ok(Bvh { nodes, order })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Triangle indices in leaf order; a permutation of `0..triangle_count`.
    pub fn triangle_order(&self) -> &[u32] {
        &self.order
    }

    pub fn root_bounds(&self) -> Aabb {
        self.nodes[0].bounds
    }

    /// Leaves as `(bounds, triangle indices)`, in depth-first order.
    pub fn leaves(&self) -> Vec<(Aabb, &[u32])> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Leaf { start, count } => {
                    Some((n.bounds, &self.order[start as usize..(start + count) as usize]))
                }
                NodeKind::Inner { .. } => None,
            })
            .collect()
    }

    /// Checks the structural invariants; returns a description of the first
    /// violation.
    pub fn audit(&self, mesh: &TriangleMesh) -> std::result::Result<(), String> {
        let mut seen = vec![0u32; mesh.triangles().len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    if count == 0 || count as usize > LEAF_SIZE {
                        return Err(format!("leaf {i} holds {count} triangles"));
                    }
                    for &t in &self.order[start as usize..(start + count) as usize] {
                        seen[t as usize] += 1;
                        if !node.bounds.contains_box(&triangle_bounds(&mesh.triangle(t as usize))) {
                            return Err(format!("leaf {i} does not contain triangle {t}"));
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    for c in [left as usize, right as usize] {
                        if !node.bounds.contains_box(&self.nodes[c].bounds) {
                            return Err(format!("node {i} does not contain child {c}"));
                        }
                        stack.push(c);
                    }
                }
            }
        }
        match seen.iter().position(|&c| c != 1) {
            Some(t) => Err(format!("triangle {t} appears {} times", seen[t])),
            None => Ok(()),
        }
    }

    pub fn is_leaf_root(&self) -> bool {
        matches!(self.nodes[0].kind, NodeKind::Leaf { .. })
    }
}

fn build_node(nodes: &mut Vec<Node>, order: &mut [u32], offset: usize, bounds: &[Aabb], centroids: &[Vec3]) -> u32 {
    let node_bounds = pad(order.iter().fold(Aabb::EMPTY, |b, &t| b.union(bounds[t as usize])));
    let index = nodes.len() as u32;
    if order.len() <= LEAF_SIZE {
        nodes.push(Node {
            bounds: node_bounds,
            kind: NodeKind::Leaf {
                start: offset as u32,
                count: order.len() as u32,
            },
        });
        return index;
    }
    let centroid_bounds = Aabb::from_points(order.iter().map(|&t| &centroids[t as usize]));
    let axis = centroid_bounds.longest_axis();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    nodes.push(Node {
        bounds: node_bounds,
        kind: NodeKind::Leaf { start: 0, count: 0 },
    });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build_node(nodes, lo, offset, bounds, centroids);
    let right = build_node(nodes, hi, offset + mid, bounds, centroids);
    nodes[index as usize].kind = NodeKind::Inner { left, right };
    index
}

/// Entry distance of the ray into the box, or `None` if it misses within `t_max`.
#[inline]
fn slab(b: &Aabb, origin: Vec3, inv_dir: Vec3, t_max: f64) -> Option<f64> {
    let mut lo = 0.0f64;
    let mut hi = t_max;
    for axis in 0..3 {
        let t0 = (b.min[axis] - origin[axis]) * inv_dir[axis];
        let t1 = (b.max[axis] - origin[axis]) * inv_dir[axis];
        let (near, far) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        lo = lo.max(near);
        hi = hi.min(far);
    }
    (lo <= hi).then_some(lo)
}

pub fn first_hit(bvh: &Bvh, mesh: &TriangleMesh, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
    first_hit_with_policy(bvh, mesh, ray, t_min, t_max, FacePolicy::default())
}

/// Closest hit with `t` in `(t_min, t_max]`.
pub fn first_hit_with_policy(
    bvh: &Bvh,
    mesh: &TriangleMesh,
    ray: &Ray,
    t_min: f64,
    t_max: f64,
    policy: FacePolicy,
) -> Option<HitRecord> {
    let inv_dir = Vec3::new(1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z);
    let mut best: Option<(f64, usize)> = None;
    let mut best_t = t_max;
    let mut stack: Vec<u32> = Vec::with_capacity(64);
    slab(&bvh.nodes[0].bounds, ray.origin, inv_dir, best_t)?;
    stack.push(0);
    while let Some(i) = stack.pop() {
        let node = &bvh.nodes[i as usize];
        match node.kind {
            NodeKind::Leaf { start, count } => {
                for &tri in &bvh.order[start as usize..(start + count) as usize] {
                    let tri = tri as usize;
                    if let Some(t) = intersect_triangle(ray, mesh.triangle(tri), policy) {
                        let better = match best {
                            None => t <= best_t,
                            // Ties resolve to the lower triangle index, as in the brute-force scan.
                            Some((bt, bi)) => t < bt || (t == bt && tri < bi),
                        };
                        if t > t_min && better {
                            best = Some((t, tri));
                            best_t = t;
                        }
                    }
                }
            }
            NodeKind::Inner { left, right } => {
                let l = slab(&bvh.nodes[left as usize].bounds, ray.origin, inv_dir, best_t);
                let r = slab(&bvh.nodes[right as usize].bounds, ray.origin, inv_dir, best_t);
                // Push the farther child first so the nearer one is visited next.
                match (l, r) {
                    (Some(lt), Some(rt)) => {
                        if lt <= rt {
                            stack.push(right);
                            stack.push(left);
                        } else {
                            stack.push(left);
                            stack.push(right);
                        }
                    }
                    (Some(_), None) => stack.push(left),
                    (None, Some(_)) => stack.push(right),
                    (None, None) => {}
                }
            }
        }
    }
    best.map(|(t, triangle)| HitRecord {
        t,
        triangle,
        point: ray.at(t),
    })
}

pub fn first_hit_bruteforce(mesh: &TriangleMesh, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
    first_hit_bruteforce_with_policy(mesh, ray, t_min, t_max, FacePolicy::default())
}

pub fn first_hit_bruteforce_with_policy(
    mesh: &TriangleMesh,
    ray: &Ray,
    t_min: f64,
    t_max: f64,
    policy: FacePolicy,
) -> Option<HitRecord> {
    let mut best: Option<(f64, usize)> = None;
    for tri in 0..mesh.triangles().len() {
        if let Some(t) = intersect_triangle(ray, mesh.triangle(tri), policy) {
            if t > t_min && t <= t_max && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, tri));
            }
        }
    }
    best.map(|(t, triangle)| HitRecord {
        t,
        triangle,
        point: ray.at(t),
    })
}

/// A mesh paired with its hierarchy.
#[derive(Debug, Clone)]
pub struct MeshCaster {
    mesh: TriangleMesh,
    bvh: Bvh,
}

impl MeshCaster {
    pub fn new(mesh: TriangleMesh) -> Result<Self> {
        let bvh = Bvh::build(&mesh)?;
        Ok(MeshCaster { mesh, bvh })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub fn first_hit(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
        first_hit(&self.bvh, &self.mesh, ray, t_min, t_max)
    }
}
