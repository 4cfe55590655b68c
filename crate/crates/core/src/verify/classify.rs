use std::f64::consts::SQRT_2;
use std::sync::Arc;

use crate::catalog::HypersurfaceChart;
use crate::error::{Error, Result};
use crate::gauss::{doubled_angle_distance, gauss_jet_from, gauss_lift, AngleSpectrum, GaussJet};
use crate::numeric::{central_diff_jet, Complex, CplxVec};

/// Largest mean squared angle deviation across samples still read as constant.
pub const ANGLE_VARIANCE_LIMIT: f64 = 1e-6;
/// Angles closer than this mod `pi` count as one.
pub const ANGLE_CLUSTER_TOL: f64 = 1e-4;
/// `|sin(theta_j + c)|` below which the reconstructed map is not an immersion.
const IMMERSION_LIMIT: f64 = 1e-6;

/// Number of distinct constant angles mod `pi`, which must be one of
/// `1, 2, 3, 4, 6`.
pub fn classify_by_angles(samples: &[AngleSpectrum]) -> Result<usize> {
    let Some(first) = samples.first() else {
        return Err(Error::InvalidParameter("no angle samples".into()));
    };
    let n = first.dim();
    if samples.iter().any(|s| s.dim() != n) {
        return Err(Error::InvalidParameter("angle samples of different dimensions".into()));
    }
    // Pair each reference angle with the nearest angle of every sample,
    // relative to the gauge shift of that sample.
    let mut variance = 0.0_f64;
    for j in 0..n {
        let reference = first.thetas[j] + first.gauge.phi / 2.0;
        let mean_sq: f64 = samples
            .iter()
            .map(|s| {
                s.thetas
                    .iter()
                    .map(|t| doubled_angle_distance(t + s.gauge.phi / 2.0, reference))
                    .fold(f64::INFINITY, f64::min)
                    .powi(2)
            })
            .sum::<f64>()
            / samples.len() as f64;
        variance = variance.max(mean_sq);
    }
    if !(variance < ANGLE_VARIANCE_LIMIT) {
        return Err(Error::NotIsoparametric { variance });
    }

    let mut reps: Vec<f64> = Vec::new();
    for t in &first.thetas {
        if !reps.iter().any(|r| doubled_angle_distance(*r, *t) < ANGLE_CLUSTER_TOL) {
            reps.push(*t);
        }
    }
    let g = reps.len();
    if ![1, 2, 3, 4, 6].contains(&g) {
        return Err(Error::Diagnostic(format!(
            "{g} distinct angles is impossible for constant angle functions"
        )));
    }
    Ok(g)
}

type LiftMap = Arc<dyn Fn(&[f64]) -> CplxVec + Send + Sync>;

/// A horizontal lift of a Lagrangian map into `Q^n`, defined on a
/// coordinate box.
#[derive(Clone)]
pub struct GaussField {
    bounds: Vec<(f64, f64)>,
    lift: LiftMap,
}

impl std::fmt::Debug for GaussField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussField").field("bounds", &self.bounds).finish()
    }
}

impl GaussField {
    pub fn new(bounds: Vec<(f64, f64)>, lift: LiftMap) -> Self {
        GaussField { bounds, lift }
    }

    /// The Gauss-map lift `(a + i b)/sqrt 2` of a chart.
    pub fn of_chart(c: &HypersurfaceChart) -> Self {
        let c2 = c.clone();
        GaussField {
            bounds: c.bounds().to_vec(),
            lift: Arc::new(move |p| gauss_lift(&c2, p)),
        }
    }

    pub fn lift(&self, p: &[f64]) -> CplxVec {
        (self.lift)(p)
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn jet(&self, p: &[f64], h: f64) -> Result<GaussJet> {
        let jet = central_diff_jet(|q: &[f64]| self.lift(q), p, h)?;
        gauss_jet_from(p, h, &jet)
    }
}

/// The hypersurface `a_t` with unit normal `b_t` built from a lift `f` and
/// the lifted normal `xi = e^{i phi} conj(f)`:
/// `a_t = (f_t + e^{-i(phi + 2t)} xi_t)/sqrt 2`, `b_t = -i (f_t - e^{-i(phi + 2t)} xi_t)/sqrt 2`
/// with `f_t = e^{it} f`, `xi_t = e^{it} xi`. Its principal curvatures are
/// `cot(theta_j + phi/2 + t)`.
pub fn reconstruct_hypersurface(field: &GaussField, spec: &AngleSpectrum, t: f64) -> Result<HypersurfaceChart> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    let phi = spec.gauge.phi;
    let c = phi / 2.0 + t;
    for (index, th) in spec.thetas.iter().enumerate() {
        let value = (th + c).sin();
        if value.abs() < IMMERSION_LIMIT {
            return Err(Error::DegenerateImmersion { index, value });
        }
    }
    let parts = move |f: &CplxVec| -> (CplxVec, CplxVec) {
        let ft = f.scaled(Complex::cis(t));
        let xit = f.conj().scaled(Complex::cis(phi + t));
        let rot = xit.scaled(Complex::cis(-(phi + 2.0 * t)));
        (ft.add(&rot), ft.sub(&rot))
    };
    let (fa, fb) = (field.lift.clone(), field.lift.clone());
    let embed = move |p: &[f64]| {
        let (plus, _) = parts(&fa(p));
        plus.scaled_re(1.0 / SQRT_2).real_part()
    };
    let normal = move |p: &[f64]| {
        let (_, minus) = parts(&fb(p));
        // -i w has real part Im w.
        minus.scaled(Complex::new(0.0, -1.0 / SQRT_2)).real_part()
    };
    HypersurfaceChart::new("reconstructed", field.bounds.clone(), Arc::new(embed), Arc::new(normal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cartan_tube, principal_curvatures, product_spheres, round_sphere, CARTAN_DEFAULT_RADIUS};
    use crate::gauss::{angle_spectrum, gauge_normalize, gauss_map};
    use crate::numeric::DEFAULT_STEP;
    use crate::quadric::{ProductStructureGauge, StiefelPoint};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const H: f64 = DEFAULT_STEP;

    fn samples(c: &HypersurfaceChart, normalized: bool) -> Vec<AngleSpectrum> {
        (0..4)
            .map(|i| {
                let s = vec![0.2 + 0.15 * i as f64; c.dim()];
                let j = gauss_map(c, &c.point_at(&s, 0.02), H).unwrap();
                let g = if normalized {
                    gauge_normalize(&j).unwrap()
                } else {
                    ProductStructureGauge::CANONICAL
                };
                angle_spectrum(&j, g).unwrap()
            })
            .collect()
    }

    #[test]
    fn counts_distinct_angles() {
        let s = round_sphere(3, 0.6).unwrap();
        let p = product_spheres(1, 3, 0.6, 0.8).unwrap();
        let t = cartan_tube(CARTAN_DEFAULT_RADIUS).unwrap();
        for normalized in [false, true] {
            assert_eq!(classify_by_angles(&samples(&s, normalized)).unwrap(), 1);
            assert_eq!(classify_by_angles(&samples(&p, normalized)).unwrap(), 2);
            assert_eq!(classify_by_angles(&samples(&t, normalized)).unwrap(), 3);
        }
    }

    #[test]
    fn round_trip_from_sphere() {
        let s = round_sphere(3, FRAC_1_SQRT_2).unwrap();
        let field = GaussField::of_chart(&s);
        let p = s.center();
        let spec = angle_spectrum(&field.jet(&p, H).unwrap(), ProductStructureGauge::CANONICAL).unwrap();
        for t in [0.0, 0.3] {
            let r = reconstruct_hypersurface(&field, &spec, t).unwrap();
            let lam = principal_curvatures(&r, &p, H).unwrap().lambdas;
            for l in lam {
                assert!((l - 1.0 / (FRAC_PI_4 + t).tan()).abs() < 1e-6, "{l}");
            }
            let a = StiefelPoint::from_lift(&gauss_lift(&r, &p)).unwrap();
            let b = StiefelPoint::from_lift(&field.lift(&p)).unwrap();
            assert!(a.distance(&b) < 1e-9);
        }
        assert!(matches!(
            reconstruct_hypersurface(&field, &spec, -FRAC_PI_4),
            Err(Error::DegenerateImmersion { .. })
        ));
    }
}
