//! Ray density received by a surfel inside the unit sphere.
//!
//! Sources are spread uniformly over the unit sphere and each emits rays
//! uniformly into the inward hemisphere. A surfel at distance `r` from the
//! centre, whose normal makes angle `α` with the centre-to-surfel direction,
//! receives
//!
//! ```text
//! ρ(r, α) = NM / (8π²) ∫∫ sinθ (cosθ − r cosα) / d³ dθ dφ,
//! d² = 1 + r² − 2r (cosα cosθ − sinα sinθ cosφ),
//! ```
//!
//! where `(θ, φ)` locate the source in a frame whose +z is the surfel normal.
//! Sources behind the surfel plane contribute nothing, so the integrand is
//! clamped at zero. All values here use `NM = 1`.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// `1 / (8π²)`: the density prefactor with `NM = 1`.
pub const PREFACTOR: f64 = 1.0 / (8.0 * PI * PI);
/// Radius of the disc surfel used by the Monte-Carlo estimator.
pub const MC_DISC_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfelParams {
    /// Distance from the sphere centre, in `[0, 1)`.
    pub r: f64,
    /// Angle between the surfel normal and the centre-to-surfel direction, in `[0, π]`.
    pub alpha: f64,
}

impl SurfelParams {
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::SurfelOutsideSphere(r));
        }
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside [0, π]")));
        }
        Ok(SurfelParams { r, alpha })
    }

    /// Surfel position in a frame where the normal is +z.
    fn position(&self) -> Vec3 {
        Vec3::new(-self.alpha.sin(), 0.0, self.alpha.cos()) * self.r
    }
}

/// Polar and azimuth angle of the single direction from which the surfel is lit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionParams {
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureResolution {
    pub theta: usize,
    pub phi: usize,
}

impl QuadratureResolution {
    pub const DEFAULT: QuadratureResolution = QuadratureResolution { theta: 512, phi: 1024 };

    pub fn doubled(self) -> Self {
        QuadratureResolution {
            theta: self.theta * 2,
            phi: self.phi * 2,
        }
    }
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Midpoint-rule value of the clamped density integral over
/// `θ ∈ [0, π]`, `φ ∈ [0, 2π]`.
pub fn density_free(s: SurfelParams, res: QuadratureResolution) -> Result<f64> {
    let s = SurfelParams::new(s.r, s.alpha)?;
    if res.theta < 64 || res.phi < 64 {
        return Err(Error::InvalidParameter(format!(
            "quadrature resolution must be at least 64x64, got {}x{}",
            res.theta, res.phi
        )));
    }
    let dtheta = PI / res.theta as f64;
    let dphi = 2.0 * PI / res.phi as f64;
    let cos_phi: Vec<f64> = (0..res.phi).map(|j| ((j as f64 + 0.5) * dphi).cos()).collect();
    let (r, (sa, ca)) = (s.r, s.alpha.sin_cos());
    let base = 1.0 + r * r;
    let mut total = 0.0;
    for i in 0..res.theta {
        let (st, ct) = ((i as f64 + 0.5) * dtheta).sin_cos();
        let numerator = st * (ct - r * ca);
        // The numerator does not depend on φ: a row is either fully lit or dark.
        if numerator <= 0.0 {
            continue;
        }
        let a = base - 2.0 * r * ca * ct;
        let b = 2.0 * r * sa * st;
        let row: f64 = cos_phi
            .iter()
            .map(|&cp| {
                let d2 = a + b * cp;
                1.0 / (d2 * d2.sqrt())
            })
            .sum();
        total += numerator * row;
    }
    Ok(PREFACTOR * total * dtheta * dphi)
}

/// Closed-form density when the surfel is lit from the single direction
/// `(β, γ)`. Zero when `cos β ≤ 0`.
pub fn density_occluded(s: SurfelParams, o: OcclusionParams) -> Result<f64> {
    let s = SurfelParams::new(s.r, s.alpha)?;
    let cb = o.beta.cos();
    if cb <= 0.0 {
        return Ok(0.0);
    }
    let (sa, ca) = s.alpha.sin_cos();
    let xi = (sa * o.beta.sin() * o.gamma.cos() - ca * cb).powi(2) - 1.0;
    let denom = xi * s.r * s.r + 1.0;
    assert!(denom > 0.0, "ξr² + 1 must be positive for r < 1 (got {denom})");
    Ok(PREFACTOR * cb / denom.sqrt())
}

/// Monte-Carlo estimate of the same density: `n_sources` uniformly random
/// sources each emit `m_rays` uniformly into the inward hemisphere, and rays
/// crossing a disc of radius [`MC_DISC_RADIUS`] from its front side are
/// counted. Returns `count / (area · n_sources · m_rays)`.
pub fn density_monte_carlo(s: SurfelParams, n_sources: usize, m_rays: usize, seed: u64) -> Result<f64> {
    let s = SurfelParams::new(s.r, s.alpha)?;
    if n_sources == 0 || m_rays == 0 {
        return Err(Error::InvalidParameter("source and ray counts must be positive".into()));
    }
    let center = s.position();
    let normal = Vec3::Z;
    let r2 = MC_DISC_RADIUS * MC_DISC_RADIUS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let rho = (1.0 - z * z).max(0.0).sqrt();
        Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
    };
    let mut count = 0u64;
    for _ in 0..n_sources {
        let source = unit();
        let to_surfel = center - source;
        let plane_offset = to_surfel.dot(normal);
        for _ in 0..m_rays {
            let mut dir = unit();
            if dir.dot(source) > 0.0 {
                dir = -dir;
            }
            let dn = dir.dot(normal);
            if dn >= 0.0 {
                continue;
            }
            let t = plane_offset / dn;
            if t <= 0.0 {
                continue;
            }
            let hit = source + dir * t - center;
            if hit.norm_squared() <= r2 {
                count += 1;
            }
        }
    }
    let area = PI * r2;
    Ok(count as f64 / (area * n_sources as f64 * m_rays as f64))
}

/// Density sampled on a regular `(r, α)` grid; `values` is r-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub r_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub values: Vec<f64>,
    /// Optional Monte-Carlo column, same layout as `values`.
    pub monte_carlo: Option<Vec<f64>>,
    /// Normalization `NM` applied to `values`.
    pub nm: f64,
}

impl DensityProfile {
    pub fn get(&self, ri: usize, ai: usize) -> f64 {
        self.values[ri * self.alpha_values.len() + ai]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Adds a Monte-Carlo column for every cell with `r ≤ r_limit` (NaN elsewhere).
    pub fn with_monte_carlo(mut self, n_sources: usize, m_rays: usize, seed: u64, r_limit: f64) -> Result<Self> {
        let na = self.alpha_values.len();
        let cells: Vec<(usize, usize)> = (0..self.r_values.len())
            .flat_map(|ri| (0..na).map(move |ai| (ri, ai)))
            .collect();
        let mc = cells
            .par_iter()
            .map(|&(ri, ai)| {
                let r = self.r_values[ri];
                if r > r_limit {
                    return Ok(f64::NAN);
                }
                let cell_seed = seed.wrapping_add((ri * na + ai) as u64);
                density_monte_carlo(SurfelParams::new(r, self.alpha_values[ai])?, n_sources, m_rays, cell_seed)
            })
            .collect::<Result<Vec<_>>>()?;
        self.monte_carlo = Some(mc);
        Ok(self)
    }

    /// Writes `r,alpha,rho[,rho_mc]` rows with a header.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        match self.monte_carlo {
            Some(_) => writeln!(w, "r,alpha,rho,rho_mc")?,
            None => writeln!(w, "r,alpha,rho")?,
        }
        let na = self.alpha_values.len();
        for (ri, r) in self.r_values.iter().enumerate() {
            for (ai, a) in self.alpha_values.iter().enumerate() {
                let k = ri * na + ai;
                match &self.monte_carlo {
                    Some(mc) => writeln!(w, "{r},{a},{},{}", self.values[k], mc[k])?,
                    None => writeln!(w, "{r},{a},{}", self.values[k])?,
                }
            }
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `r_steps × alpha_steps` grid over `r ∈ [0, r_max]`, `α ∈ [0, π]`.
pub fn density_profile(r_steps: usize, alpha_steps: usize, r_max: f64, res: QuadratureResolution) -> Result<DensityProfile> {
    if r_steps < 2 || alpha_steps < 2 {
        return Err(Error::InvalidParameter("density grid needs at least 2 steps per axis".into()));
    }
    if !(0.0..1.0).contains(&r_max) {
        return Err(Error::SurfelOutsideSphere(r_max));
    }
    let r_values = linspace(0.0, r_max, r_steps);
    let alpha_values = linspace(0.0, PI, alpha_steps);
    let cells: Vec<SurfelParams> = r_values
        .iter()
        .flat_map(|&r| alpha_values.iter().map(move |&alpha| SurfelParams { r, alpha }))
        .collect();
    let values = cells
        .par_iter()
        .map(|&s| density_free(s, res))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityProfile {
        r_values,
        alpha_values,
        values,
        monte_carlo: None,
        nm: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOW: QuadratureResolution = QuadratureResolution { theta: 128, phi: 256 };

    fn surfel(r: f64, alpha: f64) -> SurfelParams {
        SurfelParams::new(r, alpha).unwrap()
    }

    #[test]
    fn centre_value_is_one_over_eight_pi() {
        // At r = 0 the integrand is sinθ cosθ on the lit hemisphere: ∫∫ = π.
        let expected = 1.0 / (8.0 * PI);
        for alpha in [0.0, 0.7, PI / 2.0, PI] {
            let v = density_free(surfel(0.0, alpha), QuadratureResolution::DEFAULT).unwrap();
            assert!((v - expected).abs() < 1e-5, "{v}");
        }
    }

    #[test]
    fn half_phi_domain_matches() {
        // The integrand is even in φ, so [0, π] doubled equals [0, 2π].
        let s = surfel(0.55, 1.2);
        let full = density_free(s, LOW).unwrap();
        let dtheta = PI / LOW.theta as f64;
        let half_n = LOW.phi / 2;
        let dphi = PI / half_n as f64;
        let (sa, ca) = s.alpha.sin_cos();
        let mut half = 0.0;
        for i in 0..LOW.theta {
            let (st, ct) = ((i as f64 + 0.5) * dtheta).sin_cos();
            let num = st * (ct - s.r * ca);
            for j in 0..half_n {
                let cp = ((j as f64 + 0.5) * dphi).cos();
                let d2 = 1.0 + s.r * s.r - 2.0 * s.r * (ca * ct - sa * st * cp);
                half += (num / d2.powf(1.5)).max(0.0);
            }
        }
        let half = 2.0 * PREFACTOR * half * dtheta * dphi;
        assert!((full - half).abs() < 1e-6);
    }

    #[test]
    fn converges_under_doubling() {
        for (r, a) in [(0.0, 0.0), (0.4, 1.0), (0.8, 0.0), (0.8, PI / 2.0), (0.8, PI)] {
            let coarse = density_free(surfel(r, a), QuadratureResolution::DEFAULT).unwrap();
            let fine = density_free(surfel(r, a), QuadratureResolution::DEFAULT.doubled()).unwrap();
            assert!((coarse - fine).abs() < 1e-4, "r={r} a={a}: {coarse} vs {fine}");
        }
    }

    #[test]
    fn free_density_rejects_bad_input() {
        assert!(matches!(
            density_free(SurfelParams { r: 1.0, alpha: 0.0 }, LOW),
            Err(Error::SurfelOutsideSphere(_))
        ));
        assert!(density_free(surfel(0.2, 0.2), QuadratureResolution { theta: 32, phi: 64 }).is_err());
    }

    #[test]
    fn occluded_closed_form() {
        let grazing = density_occluded(surfel(0.5, 0.3), OcclusionParams { beta: PI / 2.0, gamma: 0.0 }).unwrap();
        assert!(grazing.abs() < 1e-17);
        let past = density_occluded(surfel(0.5, 0.3), OcclusionParams { beta: PI / 2.0 + 1e-12, gamma: 0.0 }).unwrap();
        assert_eq!(past, 0.0);
        let behind = density_occluded(surfel(0.5, 0.3), OcclusionParams { beta: 2.5, gamma: 1.0 }).unwrap();
        assert_eq!(behind, 0.0);
        let centre = density_occluded(surfel(0.0, 1.1), OcclusionParams { beta: 0.6, gamma: 2.0 }).unwrap();
        assert!((centre - 0.6f64.cos() * PREFACTOR).abs() < 1e-15);
        for gamma in [0.0, 1.0, 4.0] {
            let v = density_occluded(surfel(0.7, 0.0), OcclusionParams { beta: 0.0, gamma }).unwrap();
            assert!((v - 0.012_665_147_955_292).abs() < 1e-12);
        }
    }

    #[test]
    fn occluded_bounds() {
        let r = 0.8;
        let upper = PREFACTOR / (1.0f64 - r * r).sqrt();
        for i in 0..40 {
            for j in 0..40 {
                let o = OcclusionParams {
                    beta: PI * i as f64 / 40.0,
                    gamma: 2.0 * PI * j as f64 / 40.0,
                };
                let v = density_occluded(surfel(r, 0.9), o).unwrap();
                assert!((0.0..=upper + 1e-15).contains(&v));
            }
        }
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let s = surfel(0.3, 0.4);
        let a = density_monte_carlo(s, 100, 1000, 9).unwrap();
        assert_eq!(a, density_monte_carlo(s, 100, 1000, 9).unwrap());
        assert_ne!(a, density_monte_carlo(s, 100, 1000, 10).unwrap());
    }

    #[test]
    fn monte_carlo_matches_quadrature() {
        let exact = 1.0 / (8.0 * PI);
        let mc = density_monte_carlo(surfel(0.0, 0.0), 2000, 2000, 1).unwrap();
        assert!((mc - exact).abs() / exact < 0.05, "{mc}");
        let q = density_free(surfel(0.5, 0.0), QuadratureResolution::DEFAULT).unwrap();
        let mc = density_monte_carlo(surfel(0.5, 0.0), 2000, 2000, 2).unwrap();
        assert!((mc - q).abs() / q < 0.05, "{mc} vs {q}");
    }

    #[test]
    fn small_profile() {
        let p = density_profile(2, 2, 0.4, LOW).unwrap();
        assert_eq!(p.values.len(), 4);
        assert!(p.values.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!((p.get(0, 0) - p.get(0, 1)).abs() < 1e-6);
        let mut csv = Vec::new();
        p.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("r,alpha,rho\n"));
        assert_eq!(text.lines().count(), 5);
        assert!(density_profile(1, 4, 0.5, LOW).is_err());
        assert!(density_profile(4, 4, 1.0, LOW).is_err());
    }
}
