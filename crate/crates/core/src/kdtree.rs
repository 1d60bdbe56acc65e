//! Exact nearest-neighbour search over a static point set.

use crate::geometry::Vec3;
use crate::metrics::Norm;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Static 3-d tree. Queries return the exact nearest point under the chosen norm.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vec3>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: &[Vec3]) -> Self {
        let mut points = points.to_vec();
        let mut nodes = Vec::new();
        if !points.is_empty() {
            let n = points.len();
            build(&mut nodes, &mut points, 0, n);
        }
        KdTree { points, nodes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest stored point and its distance, or `None` for an empty tree.
    pub fn nearest(&self, query: Vec3, norm: Norm) -> Option<(Vec3, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (self.points[0], f64::INFINITY);
        self.search(0, query, norm, &mut best);
        Some(best)
    }

    fn search(&self, node: usize, q: Vec3, norm: Norm, best: &mut (Vec3, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &p in &self.points[start..end] {
                    let d = norm.distance(q, p);
                    if d < best.1 {
                        *best = (p, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, norm, best);
                // |Δ along one axis| bounds both the L1 and L2 distance from below.
                if diff.abs() <= best.1 {
                    self.search(far, q, norm, best);
                }
            }
        }
    }
}

fn build(nodes: &mut Vec<Node>, points: &mut [Vec3], start: usize, end: usize) -> usize {
    let index = nodes.len();
    let slice = &mut points[start..end];
    if slice.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return index;
    }
    let (lo, hi) = slice.iter().fold(
        (Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY)),
        |(lo, hi), &p| (lo.min(p), hi.max(p)),
    );
    let e = hi - lo;
    let axis = if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    };
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let value = slice[mid][axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    // Points left of `mid` are <= value and points from `mid` on are >= value.
    let left = build(nodes, points, start, start + mid);
    let right = build(nodes, points, start + mid, end);
    nodes[index] = Node::Split { axis, value, left, right };
    index
}
