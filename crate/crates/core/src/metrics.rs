//! Chamfer-style evaluation metrics.
//!
//! All metrics are averages of nearest-neighbour distances. `Norm` picks the
//! per-point distance: Euclidean (`L2`) or the L1 norm of the difference
//! vector. Every report records the norm so numbers stay comparable.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Vec3};
use crate::kdtree::KdTree;
use crate::spotlights::DepthArray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    L1,
    #[default]
    L2,
}

impl Norm {
    #[inline]
    pub fn distance(self, a: Vec3, b: Vec3) -> f64 {
        match self {
            Norm::L1 => (a - b).norm_l1(),
            Norm::L2 => (a - b).norm(),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(Error::InvalidParameter(format!("unknown norm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Chamfer,
    Accuracy,
    Completeness,
    Consistency,
    HitRatio,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Chamfer => "chamfer",
            MetricKind::Accuracy => "accuracy",
            MetricKind::Completeness => "completeness",
            MetricKind::Consistency => "consistency",
            MetricKind::HitRatio => "hit_ratio",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chamfer" => MetricKind::Chamfer,
            "accuracy" => MetricKind::Accuracy,
            "completeness" => MetricKind::Completeness,
            "consistency" => MetricKind::Consistency,
            "hit_ratio" => MetricKind::HitRatio,
            other => return Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub metric: MetricKind,
    pub norm: Norm,
    pub value: f64,
    /// Size of the first cloud (prediction or sample).
    pub size_a: usize,
    /// Size of the second cloud (reference).
    pub size_b: usize,
}

impl MetricReport {
    pub const CSV_HEADER: &'static str = "metric,norm,value,n_pred,n_gt";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.metric, self.norm, self.value, self.size_a, self.size_b)
    }
}

/// Mean over `from` of the distance to the nearest point of `to`.
fn one_sided(from: &[Vec3], to: &[Vec3], norm: Norm) -> f64 {
    let tree = KdTree::new(to);
    let nearest: Vec<f64> = from
        .par_iter()
        .map(|&p| tree.nearest(p, norm).map_or(f64::INFINITY, |(_, d)| d))
        .collect();
    nearest.iter().sum::<f64>() / from.len() as f64
}

fn require_points(c: &PointCloud) -> Result<()> {
    if c.is_empty() {
        Err(Error::UndefinedMetric("point cloud is empty"))
    } else {
        Ok(())
    }
}

/// Symmetric Chamfer distance: the sum of both one-sided mean distances.
pub fn chamfer(p: &PointCloud, q: &PointCloud, norm: Norm) -> Result<f64> {
    require_points(p)?;
    require_points(q)?;
    Ok(one_sided(p.points(), q.points(), norm) + one_sided(q.points(), p.points(), norm))
}

/// Mean distance from each predicted point to the dense reference.
pub fn accuracy(pred: &PointCloud, gt_dense: &PointCloud, norm: Norm) -> Result<f64> {
    require_points(pred)?;
    require_points(gt_dense)?;
    Ok(one_sided(pred.points(), gt_dense.points(), norm))
}

/// Mean distance from each reference point to the sampled cloud.
pub fn completeness(sample: &PointCloud, gt_dense: &PointCloud, norm: Norm) -> Result<f64> {
    require_points(sample)?;
    require_points(gt_dense)?;
    Ok(one_sided(gt_dense.points(), sample.points(), norm))
}

/// Fraction of rays that hit the object.
pub fn hit_ratio(depths: &DepthArray) -> f64 {
    if depths.is_empty() {
        return 0.0;
    }
    depths.hit_count() as f64 / depths.len() as f64
}

/// Mean Chamfer distance over all unordered pairs of predictions.
pub fn consistency(predictions: &[PointCloud], norm: Norm) -> Result<f64> {
    if predictions.len() < 2 {
        return Err(Error::UndefinedMetric("consistency needs at least two clouds"));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..predictions.len() {
        for j in i + 1..predictions.len() {
            total += chamfer(&predictions[i], &predictions[j], norm)?;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Runs one metric and wraps the result in a report.
pub fn report(metric: MetricKind, pred: &PointCloud, gt: &PointCloud, norm: Norm) -> Result<MetricReport> {
    let value = match metric {
        MetricKind::Chamfer => chamfer(pred, gt, norm)?,
        MetricKind::Accuracy => accuracy(pred, gt, norm)?,
        MetricKind::Completeness => completeness(pred, gt, norm)?,
        MetricKind::Consistency => consistency(&[pred.clone(), gt.clone()], norm)?,
        MetricKind::HitRatio => {
            return Err(Error::InvalidParameter("hit ratio is computed from a depth array".into()))
        }
    };
    Ok(MetricReport {
        metric,
        norm,
        value,
        size_a: pred.len(),
        size_b: gt.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingSphere;
    use crate::spotlights::ModelId;

    fn cloud(pts: &[(f64, f64, f64)]) -> PointCloud {
        PointCloud::new(pts.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect())
    }

    #[test]
    fn chamfer_fixtures() {
        let a = cloud(&[(0.0, 0.0, 0.0)]);
        let b = cloud(&[(1.0, 0.0, 0.0)]);
        assert_eq!(chamfer(&a, &a, Norm::L2).unwrap(), 0.0);
        assert_eq!(chamfer(&a, &b, Norm::L2).unwrap(), 2.0);
        let two = cloud(&[(0.0, 0.0, 0.0), (2.0, 0.0, 0.0)]);
        assert_eq!(chamfer(&two, &a, Norm::L2).unwrap(), 1.0);
    }

    #[test]
    fn l1_versus_l2() {
        let a = cloud(&[(0.0, 0.0, 0.0)]);
        let b = cloud(&[(1.0, 1.0, 1.0)]);
        assert_eq!(chamfer(&a, &b, Norm::L1).unwrap(), 6.0);
        assert!((chamfer(&a, &b, Norm::L2).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn accuracy_is_one_sided() {
        let pred = cloud(&[(0.0, 0.0, 0.0)]);
        let gt = cloud(&[(0.0, 0.0, 1.0), (0.0, 3.0, 0.0)]);
        assert_eq!(accuracy(&pred, &gt, Norm::L2).unwrap(), 1.0);
        assert_eq!(accuracy(&gt, &pred, Norm::L2).unwrap(), 2.0);
        assert_eq!(accuracy(&cloud(&[(0.0, 3.0, 0.0)]), &gt, Norm::L2).unwrap(), 0.0);
    }

    #[test]
    fn completeness_against_single_pole() {
        let gt = PointCloud::new(crate::sphere_sampling::sphere_points(500).unwrap().directions);
        let pole = cloud(&[(0.0, 0.0, 1.0)]);
        let expected = gt.points().iter().map(|p| (*p - Vec3::Z).norm()).sum::<f64>() / 500.0;
        let got = completeness(&pole, &gt, Norm::L2).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert_eq!(completeness(&gt, &gt, Norm::L2).unwrap(), 0.0);
    }

    #[test]
    fn empty_clouds_are_undefined() {
        let a = cloud(&[(0.0, 0.0, 0.0)]);
        let e = PointCloud::default();
        assert!(matches!(chamfer(&a, &e, Norm::L2), Err(Error::UndefinedMetric(_))));
        assert!(accuracy(&e, &a, Norm::L2).is_err());
        assert!(completeness(&a, &e, Norm::L2).is_err());
    }

    #[test]
    fn hit_ratio_extremes() {
        let id = ModelId([0; 8]);
        let zeros = DepthArray::new(id, vec![0.0; 10], BoundingSphere::UNIT).unwrap();
        let full = DepthArray::new(id, vec![0.5; 10], BoundingSphere::UNIT).unwrap();
        let half = DepthArray::new(id, vec![0.0, 0.3, 0.0, 1.0], BoundingSphere::UNIT).unwrap();
        assert_eq!(hit_ratio(&zeros), 0.0);
        assert_eq!(hit_ratio(&full), 1.0);
        assert_eq!(hit_ratio(&half), 0.5);
    }

    #[test]
    fn consistency_fixtures() {
        let a = cloud(&[(0.0, 0.0, 0.0)]);
        let b = cloud(&[(1.0, 0.0, 0.0)]);
        let c = cloud(&[(0.0, 2.0, 0.0)]);
        assert_eq!(consistency(&[a.clone(), a.clone(), a.clone()], Norm::L2).unwrap(), 0.0);
        assert_eq!(consistency(&[a.clone(), b.clone()], Norm::L2).unwrap(), 2.0);
        let abc = consistency(&[a.clone(), b.clone(), c.clone()], Norm::L2).unwrap();
        let cab = consistency(&[c, a.clone(), b], Norm::L2).unwrap();
        assert_eq!(abc, cab);
        assert!(consistency(&[a], Norm::L2).is_err());
    }

    #[test]
    fn report_row() {
        let a = cloud(&[(0.0, 0.0, 0.0)]);
        let b = cloud(&[(1.0, 0.0, 0.0)]);
        let r = report(MetricKind::Chamfer, &a, &b, Norm::L2).unwrap();
        assert_eq!(r.csv_row(), "chamfer,l2,2,1,1");
        assert_eq!("l1".parse::<Norm>().unwrap(), Norm::L1);
        assert_eq!("completeness".parse::<MetricKind>().unwrap(), MetricKind::Completeness);
    }
}
