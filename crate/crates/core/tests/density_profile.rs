use std::f64::consts::PI;

use spotlights_core::density::{
    density_free, density_monte_carlo, density_profile, QuadratureResolution, SurfelParams,
};

#[test]
fn profile_is_smooth_and_isotropic_at_centre() {
    let res = QuadratureResolution { theta: 256, phi: 512 };
    let p = density_profile(21, 21, 0.8, res).unwrap();
    for ai in 1..21 {
        assert!((p.get(0, ai) - p.get(0, 0)).abs() < 1e-6);
    }
    let (nr, na) = (p.r_values.len(), p.alpha_values.len());
    let mut grads = Vec::new();
    for ri in 0..nr - 1 {
        for ai in 0..na - 1 {
            let dr = (p.get(ri + 1, ai) - p.get(ri, ai)) / (p.r_values[ri + 1] - p.r_values[ri]);
            let da = (p.get(ri, ai + 1) - p.get(ri, ai)) / (p.alpha_values[ai + 1] - p.alpha_values[ai]);
            grads.push(dr.hypot(da));
        }
    }
    let mean = grads.iter().sum::<f64>() / grads.len() as f64;
    let max = grads.iter().cloned().fold(0.0, f64::max);
    assert!(max < 10.0 * mean, "max gradient {max} vs mean {mean}");
}

#[test]
fn monte_carlo_cross_check() {
    let res = QuadratureResolution::default();
    for (r, alpha) in [(0.0, 0.0), (0.5, 0.0), (0.6, PI / 3.0)] {
        let s = SurfelParams::new(r, alpha).unwrap();
        let mc = density_monte_carlo(s, 1000, 1000, 17).unwrap();
        let q = density_free(s, res).unwrap();
        assert!((mc - q).abs() / q < 0.05, "r={r} alpha={alpha}: mc {mc} vs quadrature {q}");
    }
}

#[test]
fn csv_export() {
    let p = density_profile(2, 3, 0.4, QuadratureResolution { theta: 64, phi: 64 })
        .unwrap()
        .with_monte_carlo(200, 200, 1, 0.6)
        .unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,alpha,rho,rho_mc"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn rejects_r_at_or_beyond_unit_sphere() {
    assert!(SurfelParams::new(1.0, 0.0).is_err());
    assert!(density_profile(3, 3, 1.0, QuadratureResolution::default()).is_err());
}
