use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::{principal_curvatures, HypersurfaceChart, MIN_SINGULAR_VALUE};
use crate::error::{Error, Result};
use crate::numeric::{gram_schmidt, RealVec, DEFAULT_STEP};

/// Distance kept from the coordinate singularities of spherical charts.
pub const CHART_MARGIN: f64 = 0.1;

pub const CARTAN_DEFAULT_RADIUS: f64 = 0.35;

/// Hyperspherical coordinates on the unit `S^m` in `R^{m+1}`.
pub fn hyperspherical(angles: &[f64]) -> RealVec {
    let m = angles.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut prod = 1.0;
    for &a in angles {
        out.push(prod * a.cos());
        prod *= a.sin();
    }
    out.push(prod);
    RealVec(out)
}

pub(crate) fn hyperspherical_bounds(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let top = if i + 1 == m { TAU } else { PI };
            (CHART_MARGIN, top - CHART_MARGIN)
        })
        .collect()
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > 32 {
        Err(Error::InvalidParameter(format!("dimension must be in 1..=32, got {n}")))
    } else {
        Ok(())
    }
}

/// `S^n(r)` in `S^{n+1}`: `a = (r sigma, sqrt(1-r^2))`, `b = (-sqrt(1-r^2) sigma, r)`,
/// so every principal curvature is `sqrt(1-r^2)/r`.
pub fn round_sphere(n: usize, r: f64) -> Result<HypersurfaceChart> {
    check_dim(n)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sphere radius must lie in (0, 1], got {r}"
        )));
    }
    let c = (1.0 - r * r).max(0.0).sqrt();
    let embed = move |p: &[f64]| {
        let mut v = hyperspherical(p).scaled(r).0;
        v.push(c);
        RealVec(v)
    };
    let normal = move |p: &[f64]| {
        let mut v = hyperspherical(p).scaled(-c).0;
        v.push(r);
        RealVec(v)
    };
    HypersurfaceChart::new("sphere", hyperspherical_bounds(n), Arc::new(embed), Arc::new(normal))
}

/// `S^k(r1) x S^{n-k}(r2)` in `S^{n+1}` with principal curvatures `r2/r1`
/// (multiplicity `k`) and `-r1/r2` (multiplicity `n-k`).
pub fn product_spheres(k: usize, n: usize, r1: f64, r2: f64) -> Result<HypersurfaceChart> {
    check_dim(n)?;
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    if !(r1 > 0.0 && r2 > 0.0) || (r1 * r1 + r2 * r2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "radii must be positive with r1^2 + r2^2 = 1, got r1={r1}, r2={r2}"
        )));
    }
    let split = move |p: &[f64]| (hyperspherical(&p[..k]), hyperspherical(&p[k..]));
    let embed = move |p: &[f64]| {
        let (s1, s2) = split(p);
        let mut v = s1.scaled(r1).0;
        v.extend(s2.scaled(r2).0);
        RealVec(v)
    };
    let normal = move |p: &[f64]| {
        let (s1, s2) = split(p);
        let mut v = s1.scaled(-r2).0;
        v.extend(s2.scaled(r1).0);
        RealVec(v)
    };
    let mut bounds = hyperspherical_bounds(k);
    bounds.extend(hyperspherical_bounds(n - k));
    HypersurfaceChart::new("product", bounds, Arc::new(embed), Arc::new(normal))
}

const S3: f64 = 1.732_050_807_568_877_2;

/// Symmetric bilinear form with `veronese(x) = q(x, x)`.
fn veronese_q(x: &[f64; 3], y: &[f64; 3]) -> [f64; 5] {
    [
        0.5 * S3 * (x[1] * y[2] + x[2] * y[1]),
        0.5 * S3 * (x[2] * y[0] + x[0] * y[2]),
        0.5 * S3 * (x[0] * y[1] + x[1] * y[0]),
        0.5 * S3 * (x[0] * y[0] - x[1] * y[1]),
        0.5 * (x[0] * y[0] + x[1] * y[1] - 2.0 * x[2] * y[2]),
    ]
}

struct VeroneseFrame {
    v: RealVec,
    n1: RealVec,
    n2: RealVec,
}

/// Veronese point at spherical coordinates `(u1, u2)` and an orthonormal
/// frame of its normal plane inside `T S^4`.
fn veronese_frame(u1: f64, u2: f64) -> Result<VeroneseFrame> {
    let (s1, c1) = u1.sin_cos();
    let (s2, c2) = u2.sin_cos();
    let x = [s1 * c2, s1 * s2, c1];
    let x1 = [c1 * c2, c1 * s2, -s1];
    let x2 = [-s1 * s2, s1 * c2, 0.0];
    let x11 = [-s1 * c2, -s1 * s2, -c1];
    let x12 = [-c1 * s2, c1 * c2, 0.0];

    let q = |a: &[f64; 3], b: &[f64; 3]| RealVec(veronese_q(a, b).to_vec());
    let v = q(&x, &x);
    let v1 = q(&x, &x1).scaled(2.0);
    let v2 = q(&x, &x2).scaled(2.0);
    let v11 = q(&x1, &x1).add(&q(&x, &x11)).scaled(2.0);
    let v12 = q(&x1, &x2).add(&q(&x, &x12)).scaled(2.0);

    let basis = gram_schmidt(&[v.clone(), v1, v2, v11, v12])?;
    Ok(VeroneseFrame {
        v,
        n1: basis[3].clone(),
        n2: basis[4].clone(),
    })
}

fn tube_point(p: &[f64], t: f64) -> (RealVec, RealVec) {
    match veronese_frame(p[0], p[1]) {
        Ok(f) => {
            let (sp, cp) = p[2].sin_cos();
            let mut xi = f.n1.scaled(cp);
            xi.axpy(sp, &f.n2);
            let (st, ct) = t.sin_cos();
            let mut point = f.v.scaled(ct);
            point.axpy(st, &xi);
            let mut normal = f.v.scaled(-st);
            normal.axpy(ct, &xi);
            (point, normal)
        }
        Err(_) => (RealVec(vec![f64::NAN; 5]), RealVec(vec![f64::NAN; 5])),
    }
}

/// Tube of radius `t` around the Veronese surface in `S^4`: Cartan's
/// isoparametric hypersurface with three distinct principal curvatures.
/// Coordinates are `(u1, u2, psi)`.
pub fn cartan_tube(t: f64) -> Result<HypersurfaceChart> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("tube radius must be finite, got {t}")));
    }
    let bounds = vec![
        (CHART_MARGIN, PI - CHART_MARGIN),
        (CHART_MARGIN, TAU - CHART_MARGIN),
        (CHART_MARGIN, TAU - CHART_MARGIN),
    ];
    let chart = HypersurfaceChart::new(
        "cartan",
        bounds,
        Arc::new(move |p: &[f64]| tube_point(p, t).0),
        Arc::new(move |p: &[f64]| tube_point(p, t).1),
    )?;

    let centre = chart.center();
    let focal = |detail: String| Error::FocalRadius { t, detail };
    let inv = chart.invariants(&centre, DEFAULT_STEP)?;
    if !(inv.sigma_min > MIN_SINGULAR_VALUE) {
        return Err(focal(format!("differential has singular value {:.3e}", inv.sigma_min)));
    }
    let spec = principal_curvatures(&chart, &centre, DEFAULT_STEP).map_err(|e| focal(e.to_string()))?;
    if spec.lambdas.iter().any(|l| !l.is_finite() || l.abs() > 1e6) {
        return Err(focal(format!("principal curvatures {:?}", spec.lambdas)));
    }
    if spec.lambdas[0] < 0.0 {
        Ok(chart.flipped())
    } else {
        Ok(chart)
    }
}

/// `a_t = cos t a - sin t b`, `b_t = sin t a + cos t b`. Then
/// `a_t + i b_t = e^{it} (a + i b)`, so the Gauss map is unchanged, and a
/// principal curvature `cot theta` becomes `cot(theta + t)`.
pub fn parallel_hypersurface(c: &HypersurfaceChart, t: f64) -> Result<HypersurfaceChart> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "parallel distance must be finite, got {t}"
        )));
    }
    let (st, ct) = t.sin_cos();
    let (ea, na) = (c.embed_map(), c.normal_map());
    let (eb, nb) = (c.embed_map(), c.normal_map());
    let embed = move |p: &[f64]| {
        let mut v = ea(p).scaled(ct);
        v.axpy(-st, &na(p));
        v
    };
    let normal = move |p: &[f64]| {
        let mut v = eb(p).scaled(st);
        v.axpy(ct, &nb(p));
        v
    };
    let key = if t == 0.0 {
        c.key().to_string()
    } else {
        format!("{}+parallel", c.key())
    };
    let out = HypersurfaceChart::new(key, c.bounds().to_vec(), Arc::new(embed), Arc::new(normal))?;
    let centre = out.center();
    let inv = out.invariants(&centre, DEFAULT_STEP)?;
    if !(inv.sigma_min > MIN_SINGULAR_VALUE) {
        return Err(Error::Degenerate {
            point: centre,
            sigma_min: inv.sigma_min,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::principal_curvatures;

    const H: f64 = DEFAULT_STEP;

    fn grid_points(c: &HypersurfaceChart, count: usize) -> Vec<Vec<f64>> {
        // Deterministic scattered points in the box.
        (0..count)
            .map(|i| {
                let s: Vec<f64> = (0..c.dim())
                    .map(|d| ((i as f64 + 1.0) * (0.618_034 + 0.414_214 * d as f64)).fract())
                    .collect();
                c.point_at(&s, 0.01)
            })
            .collect()
    }

    #[test]
    fn hyperspherical_is_unit() {
        for m in 1..5 {
            let p: Vec<f64> = (0..m).map(|i| 0.3 + 0.4 * i as f64).collect();
            assert!((hyperspherical(&p).norm() - 1.0).abs() < 1e-15);
        }
        let c = hyperspherical(&[0.5]);
        assert_eq!(c.0, vec![0.5_f64.cos(), 0.5_f64.sin()]);
    }

    #[test]
    fn catalog_invariants_hold() {
        let charts = [
            round_sphere(3, 0.4).unwrap(),
            product_spheres(1, 3, 0.6, 0.8).unwrap(),
            cartan_tube(CARTAN_DEFAULT_RADIUS).unwrap(),
        ];
        for c in &charts {
            for p in grid_points(c, 3) {
                let inv = c.invariants(&p, H).unwrap();
                assert!(inv.holds(1e-10), "{} {inv:?}", c.key());
            }
        }
    }

    #[test]
    fn sphere_is_isoparametric_with_cot_rho() {
        let r: f64 = 0.45;
        let c = round_sphere(3, r).unwrap();
        let want = (1.0 - r * r).sqrt() / r;
        for p in grid_points(&c, 10) {
            for l in principal_curvatures(&c, &p, H).unwrap().lambdas {
                assert!((l - want).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn product_curvatures_have_the_expected_multiplicities() {
        let (r1, r2) = (0.6, 0.8);
        let c = product_spheres(2, 4, r1, r2).unwrap();
        let sp = principal_curvatures(&c, &c.center(), H).unwrap();
        let want = [r2 / r1, r2 / r1, -r1 / r2, -r1 / r2];
        for (l, w) in sp.lambdas.iter().zip(want) {
            assert!((l - w).abs() < 1e-7, "{:?}", sp.lambdas);
        }
    }

    #[test]
    fn cartan_tube_has_three_constant_curvatures() {
        let c = cartan_tube(CARTAN_DEFAULT_RADIUS).unwrap();
        let samples: Vec<Vec<f64>> = grid_points(&c, 10)
            .iter()
            .map(|p| principal_curvatures(&c, p, H).unwrap().lambdas)
            .collect();
        for j in 0..3 {
            let mean = samples.iter().map(|s| s[j]).sum::<f64>() / 10.0;
            let var = samples.iter().map(|s| (s[j] - mean).powi(2)).sum::<f64>() / 9.0;
            assert!(var < 1e-8, "{j}: {var}");
        }
        let thetas: Vec<f64> = samples[0].iter().map(|l| (1.0 / l).atan()).collect();
        for i in 0..3 {
            for j in 0..i {
                let d = 2.0 * (thetas[i] - thetas[j]);
                // pairwise differences pi/3 mod pi, i.e. doubled angle 2 pi/3
                assert!((d.cos() + 0.5).abs() < 1e-5, "{thetas:?}");
            }
        }
    }

    #[test]
    fn focal_tube_radius_is_rejected() {
        assert!(matches!(cartan_tube(0.0), Err(Error::FocalRadius { .. })));
        assert!(matches!(cartan_tube(PI / 3.0), Err(Error::FocalRadius { .. })));
    }

    #[test]
    fn parallel_family_shifts_angles() {
        let c = product_spheres(1, 2, 0.6, 0.8).unwrap();
        let base = principal_curvatures(&c, &c.center(), H).unwrap().lambdas;
        for t in [0.1, 0.3] {
            let ct = parallel_hypersurface(&c, t).unwrap();
            let got = principal_curvatures(&ct, &ct.center(), H).unwrap().lambdas;
            for (l0, l) in base.iter().zip(&got) {
                let want = 1.0 / ((1.0 / l0).atan() + t).tan();
                assert!((l - want).abs() < 1e-5, "t={t}: {l} vs {want}");
            }
        }
        let same = parallel_hypersurface(&c, 0.0).unwrap();
        let p = c.center();
        assert_eq!(same.embed(&p), c.embed(&p));
    }

    #[test]
    fn invalid_parameters() {
        assert!(round_sphere(3, 2.0).is_err());
        assert!(round_sphere(3, 0.0).is_err());
        assert!(product_spheres(1, 2, 0.6, 0.6).is_err());
        assert!(product_spheres(2, 2, 0.6, 0.8).is_err());
    }
}
