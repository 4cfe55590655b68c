//! Residual checks of the structure equations of Lagrangian Gauss maps:
//! the angle-function relations, the one-form `s`, Gauss and Codazzi
//! equations, sectional curvatures, the constant-curvature identities,
//! classification by angle count and reconstruction from a Gauss map.

mod classify;
mod connection;
mod curvature;

pub use classify::{classify_by_angles, reconstruct_hypersurface, GaussField, ANGLE_CLUSTER_TOL, ANGLE_VARIANCE_LIMIT};
pub use connection::{check_connection_identities, connection_and_s, ConnectionData, FRAME_OVERLAP_MIN};
pub use curvature::{
    codazzi_residual, codazzi_tensor, csc_residuals, curvature_of_metric, gauss_residual, h123_residuals,
    metric_curvature, metric_sectional, sectional_curvature, CodazziData, MetricCurvature,
};

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::catalog::HypersurfaceChart;
use crate::error::{Error, Result};
use crate::gauss::{
    angle_spectrum, gauge_normalize, gauss_map, mean_curvature, operators_bc, palmer_residual, second_fundamental_form,
    AngleSpectrum, FundamentalForm, GaussJet,
};
use crate::numeric::Matrix;
use crate::quadric::{apply_j, rotate_structure, HorizontalVector, ProductStructureGauge};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckEntry {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        CheckEntry {
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// Named residuals at one chart point of one example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub example: String,
    pub point: Vec<f64>,
    pub entries: BTreeMap<String, CheckEntry>,
    /// Checks that do not apply here, with the reason.
    pub skipped: BTreeMap<String, String>,
}

impl ResidualReport {
    pub fn new(example: &str, point: &[f64]) -> Self {
        ResidualReport {
            example: example.to_string(),
            point: point.to_vec(),
            entries: BTreeMap::new(),
            skipped: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, name: &str, residual: f64, tolerance: f64) {
        // NaN never passes.
        self.entries
            .insert(name.to_string(), CheckEntry::new(residual, tolerance));
    }

    pub fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.skipped.insert(name.to_string(), reason.into());
    }

    pub fn merge(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
        self.skipped.extend(other.skipped);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.values().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.get(name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Tolerance ladder with per-check overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub first_order: f64,
    pub second_order: f64,
    pub overrides: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-8,
            first_order: 1e-4,
            second_order: 1e-3,
            overrides: BTreeMap::new(),
        }
    }
}

/// How a check's default tolerance is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckClass {
    Algebraic,
    FirstOrder,
    SecondOrder,
    Fixed(u32),
}

impl Tolerances {
    pub fn get(&self, name: &str, class: CheckClass) -> f64 {
        if let Some(v) = self.overrides.get(name) {
            return *v;
        }
        match class {
            CheckClass::Algebraic => self.algebraic,
            CheckClass::FirstOrder => self.first_order,
            CheckClass::SecondOrder => self.second_order,
            CheckClass::Fixed(e) => 10f64.powi(-(e as i32)),
        }
    }
}

/// Which almost product structure the angle functions refer to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    Fixed(f64),
    Normalized,
}

impl GaugeChoice {
    pub const CANONICAL: GaugeChoice = GaugeChoice::Fixed(0.0);

    /// Gauge at a jet; a normalized gauge is moved by multiples of `2 pi / n`
    /// to the branch closest to `reference`.
    pub fn resolve(&self, j: &GaussJet, reference: Option<f64>) -> Result<ProductStructureGauge> {
        match *self {
            GaugeChoice::Fixed(phi) => Ok(ProductStructureGauge::new(phi)),
            GaugeChoice::Normalized => {
                let g = gauge_normalize(j)?;
                let Some(r) = reference else { return Ok(g) };
                let period = TAU / j.dim() as f64;
                let k = ((r - g.phi) / period).round();
                Ok(ProductStructureGauge::new(g.phi + k * period))
            }
        }
    }
}

/// Everything computed once at a chart point and shared by the checks.
#[derive(Clone, Debug)]
pub struct PointData {
    pub chart: HypersurfaceChart,
    pub point: Vec<f64>,
    pub step: f64,
    pub choice: GaugeChoice,
    pub gauge: ProductStructureGauge,
    pub jet: GaussJet,
    pub spec: AngleSpectrum,
    pub ff: FundamentalForm,
}

impl PointData {
    pub fn new(chart: &HypersurfaceChart, p: &[f64], h: f64, choice: GaugeChoice) -> Result<Self> {
        // Nested stencils reach 4h from p.
        if !chart.contains(p, 4.0 * h) {
            return Err(Error::InvalidParameter(format!(
                "point {p:?} is closer than 4h to the {} chart boundary",
                chart.key()
            )));
        }
        let jet = gauss_map(chart, p, h)?;
        let gauge = choice.resolve(&jet, None)?;
        let spec = angle_spectrum(&jet, gauge)?;
        let ff = second_fundamental_form(&jet, &spec)?;
        Ok(PointData {
            chart: chart.clone(),
            point: p.to_vec(),
            step: h,
            choice,
            gauge,
            jet,
            spec,
            ff,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Lifts of the angle frame as horizontal vectors.
    pub fn frame(&self) -> Vec<HorizontalVector> {
        self.spec
            .lifts
            .iter()
            .map(|w| HorizontalVector::new_unchecked(self.jet.lift.clone(), w.clone()))
            .collect()
    }
}

/// What an example is known to satisfy beyond the generic identities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expectations {
    /// Isoparametric: constant angles, minimal, `s = 0` in the normalized gauge.
    pub isoparametric: bool,
    /// Constant sectional curvature of the induced metric.
    pub sectional: Option<f64>,
    /// Value of `(h_12^3)^2` together with its three closed forms.
    pub h123_squared: Option<f64>,
}

fn max_abs_matrix(m: &Matrix) -> f64 {
    m.max_abs()
}

/// Pointwise algebra of `A`, `J`, `B`, `C` and `h`.
pub fn algebraic_checks(d: &PointData, tol: &Tolerances) -> Result<ResidualReport> {
    let mut r = ResidualReport::new(d.chart.key(), &d.point);
    let t = |name: &str| tol.get(name, CheckClass::Algebraic);
    let n = d.dim();
    let frame = d.jet.lift.horizontal_frame()?;
    let (mut a2, mut asym, mut anti) = (0.0_f64, 0.0_f64, 0.0_f64);
    for x in &frame {
        let ax = rotate_structure(d.gauge, x);
        let aax = rotate_structure(d.gauge, &ax);
        a2 = a2.max(aax.w().sub(x.w()).norm());
        let ajx = rotate_structure(d.gauge, &apply_j(x));
        let jax = apply_j(&ax);
        anti = anti.max(ajx.w().add(jax.w()).norm());
        for y in &frame {
            let ay = rotate_structure(d.gauge, y);
            asym = asym.max((ax.w().dot_re(y.w()) - x.w().dot_re(ay.w())).abs());
        }
    }
    r.record("a_squared_identity", a2, t("a_squared_identity"));
    r.record("a_symmetric", asym, t("a_symmetric"));
    r.record("aj_anticommute", anti, t("aj_anticommute"));

    let (b, c) = operators_bc(&d.jet, d.gauge)?;
    let (b, c) = (b.into_matrix(), c.into_matrix());
    let sq = b.matmul(&b).add(&c.matmul(&c)).sub(&Matrix::identity(n));
    let comm = b.matmul(&c).sub(&c.matmul(&b));
    r.record("bc_square_identity", max_abs_matrix(&sq), t("bc_square_identity"));
    r.record("bc_commute", max_abs_matrix(&comm), t("bc_commute"));
    r.record("h_total_symmetry", d.ff.symmetry_defect(), t("h_total_symmetry"));
    r.record("lagrangian", d.jet.diagnostics.lagrangian, t("lagrangian"));
    r.record("horizontal", d.jet.diagnostics.horizontality, t("horizontal"));
    Ok(r)
}

/// `lambda_j = cot(theta_j + phi/2)` for matched pairs.
pub fn lambda_cot_residual(d: &PointData) -> f64 {
    let mut cots: Vec<f64> = d
        .spec
        .thetas
        .iter()
        .map(|t| 1.0 / (t + d.gauge.phi / 2.0).tan())
        .collect();
    cots.sort_by(|a, b| b.total_cmp(a));
    d.jet
        .principal
        .lambdas
        .iter()
        .zip(&cots)
        .map(|(l, c)| (l - c).abs())
        .fold(0.0, f64::max)
}

/// Runs every check that applies to `chart` at `p`.
pub fn verify_point(
    chart: &HypersurfaceChart,
    p: &[f64],
    h: f64,
    choice: GaugeChoice,
    expect: &Expectations,
    tol: &Tolerances,
) -> Result<ResidualReport> {
    let d = PointData::new(chart, p, h, choice)?;
    let n = d.dim();
    let mut r = algebraic_checks(&d, tol)?;
    let second = |name: &str| tol.get(name, CheckClass::SecondOrder);
    let fixed5 = |name: &str| tol.get(name, CheckClass::Fixed(5));

    r.record("lambda_cot_theta", lambda_cot_residual(&d), fixed5("lambda_cot_theta"));
    let palmer = palmer_residual(chart, p, h)?;
    r.record("palmer", palmer.residual, fixed5("palmer"));
    if expect.isoparametric {
        let hn = mean_curvature(&d.ff).norm();
        r.record("mean_curvature", hn, fixed5("mean_curvature"));
    } else {
        r.skip("mean_curvature", "not an isoparametric example");
    }

    let conn = connection_and_s(&d)?;
    r.merge(check_connection_identities(&d, &conn, tol));
    if expect.isoparametric && choice == GaugeChoice::Normalized {
        r.record("s_vanishes", conn.s_form.max_abs(), fixed5("s_vanishes"));
    } else {
        r.skip(
            "s_vanishes",
            "requires an isoparametric example in the normalized gauge",
        );
    }

    let mc = metric_curvature(chart, p, h)?;
    r.record("gauss_equation", gauss_residual(&d, &mc), second("gauss_equation"));
    let k_h = sectional_curvature(&d);
    let k_g = metric_sectional(&d, &mc);
    let mut two_routes = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                two_routes = two_routes.max((k_h.matrix()[(i, j)] - k_g[(i, j)]).abs());
            }
        }
    }
    r.record("sectional_two_routes", two_routes, second("sectional_two_routes"));
    if let Some(c) = expect.sectional {
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max((k_g[(i, j)] - c).abs());
                }
            }
        }
        r.record("sectional_constant", worst, second("sectional_constant"));
        if n >= 2 {
            let csc = csc_residuals(&d.spec, &d.ff);
            r.record("constant_curvature_1", csc[0], second("constant_curvature_1"));
            r.record("constant_curvature_2", csc[1], second("constant_curvature_2"));
            if n >= 4 {
                r.record("constant_curvature_3", csc[2], second("constant_curvature_3"));
            } else {
                r.skip("constant_curvature_3", "needs four distinct indices");
            }
        }
    } else {
        r.skip("sectional_constant", "curvature of this example is not constant");
    }

    let cod = codazzi_tensor(&d, &mc)?;
    r.record("codazzi_equation", codazzi_residual(&cod), second("codazzi_equation"));

    if let Some(v) = expect.h123_squared {
        if n == 3 {
            r.record(
                "h123_squared",
                (d.ff.get(0, 1, 2).powi(2) - v).abs(),
                second("h123_squared"),
            );
            let rel = h123_residuals(&d.spec, &d.ff);
            for (k, x) in rel.iter().enumerate() {
                let name = format!("h123_relation_{}", k + 1);
                r.record(&name, *x, second(&name));
            }
        }
    }
    Ok(r)
}
