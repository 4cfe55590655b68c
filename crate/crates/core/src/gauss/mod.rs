//! The Gauss map `p -> [a(p) + i b(p)]` of a sphere hypersurface into `Q^n`,
//! its horizontal lift `(a + i b)/sqrt 2`, angle functions and second
//! fundamental form.

mod angles;
mod fundamental;

pub use angles::{angle_spectrum, doubled_angle_distance, gauge_normalize, operators_bc, AngleSpectrum, CLUSTER_GAP};
pub use fundamental::{
    mean_curvature, palmer_residual, second_fundamental_form, sigma_tensor, FundamentalForm, PalmerResidual,
};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::catalog::{shape_operator_from_derivatives, spectrum_of, HypersurfaceChart, ShapeOperator, ShapeSpectrum};
use crate::error::{Error, Result};
use crate::numeric::{central_diff_jet, gram_schmidt_with_coeffs, Complex, CplxVec, Jet2, Matrix, RealVec};
use crate::quadric::{HorizontalVector, StiefelPoint};

/// Lagrangian residual above which [`gauss_map`] refuses the chart.
pub const LAGRANGIAN_LIMIT: f64 = 1e-6;

/// `(a(p) + i b(p)) / sqrt 2`.
pub fn gauss_lift(c: &HypersurfaceChart, p: &[f64]) -> CplxVec {
    let a = c.embed(p);
    let b = c.normal(p);
    CplxVec::from_parts(&a, &b).scaled_re(FRAC_1_SQRT_2)
}

#[derive(Clone, Debug)]
pub struct GaussDiagnostics {
    /// `max |Re <E_a, i E_b>|` over the orthonormal frame.
    pub lagrangian: f64,
    /// Largest relative component of `d G_hat` along `z, iz, conj z, i conj z`.
    pub horizontality: f64,
    /// `max_j |dG_hat e_j - (1 - i lambda_j) e_j / sqrt 2|` over principal directions.
    pub frame_relation: f64,
}

/// Pointwise data of the Gauss map at a chart point.
#[derive(Clone, Debug)]
pub struct GaussJet {
    pub chart_point: Vec<f64>,
    pub step: f64,
    pub lift: StiefelPoint,
    /// `d G_hat (d/dx_i)`.
    pub partials: Vec<HorizontalVector>,
    /// `second[i][j] = d^2 G_hat / dx_i dx_j`.
    pub second: Vec<Vec<CplxVec>>,
    /// Induced metric `Re <dG_i, dG_j>` in chart coordinates.
    pub metric: Matrix,
    /// Orthonormal frame of `dG(T_pM)` for the induced metric.
    pub frame: Vec<HorizontalVector>,
    /// `frame[a] = sum_j coords[(a, j)] partials[j]`.
    pub coords: Matrix,
    pub shape: ShapeOperator,
    pub principal: ShapeSpectrum,
    pub diagnostics: GaussDiagnostics,
}

impl GaussJet {
    pub fn dim(&self) -> usize {
        self.partials.len()
    }

    /// Lift of the chart-coordinate vector `v`.
    pub fn push_forward(&self, v: &[f64]) -> CplxVec {
        let mut w = CplxVec::zeros(self.lift.u().len());
        for (vi, d) in v.iter().zip(&self.partials) {
            w.axpy_re(*vi, d.w());
        }
        w
    }

    /// Chart-coordinate vector of `sum_a x_a frame[a]`.
    pub fn frame_to_coords(&self, x: &[f64]) -> RealVec {
        let n = self.dim();
        let mut out = RealVec::zeros(n);
        for (a, xa) in x.iter().enumerate() {
            for j in 0..n {
                out[j] += xa * self.coords[(a, j)];
            }
        }
        out
    }
}

/// Gauss-map data built from a second-order jet of the lift.
pub fn gauss_jet_from(p: &[f64], step: f64, jet: &Jet2<CplxVec>) -> Result<GaussJet> {
    let lift = StiefelPoint::from_lift(&jet.value)?;
    let n = jet.first.len();
    let partials: Vec<HorizontalVector> = jet
        .first
        .iter()
        .map(|w| HorizontalVector::new_unchecked(lift.clone(), w.clone()))
        .collect();

    let horizontality = jet
        .first
        .iter()
        .map(|w| lift.horizontality_defect(w) / w.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);

    let metric = Matrix::from_fn(n, n, |i, j| jet.first[i].dot_re(&jet.first[j]));
    let real: Vec<RealVec> = jet.first.iter().map(|w| w.to_real()).collect();
    let (ortho, coords) = gram_schmidt_with_coeffs(&real).map_err(|_| Error::Degenerate {
        point: p.to_vec(),
        sigma_min: 0.0,
    })?;
    let frame: Vec<HorizontalVector> = ortho
        .iter()
        .map(|r| HorizontalVector::new_unchecked(lift.clone(), CplxVec::from_real(r)))
        .collect();

    let mut lagrangian = 0.0_f64;
    for ea in &frame {
        for eb in &frame {
            lagrangian = lagrangian.max(ea.w().dot_re(&eb.w().mul_i()).abs());
        }
    }
    if !(lagrangian <= LAGRANGIAN_LIMIT) {
        return Err(Error::NotLagrangian {
            residual: lagrangian,
            point: p.to_vec(),
        });
    }

    let da: Vec<RealVec> = jet.first.iter().map(|w| w.real_part().scaled(2f64.sqrt())).collect();
    let db: Vec<RealVec> = jet.first.iter().map(|w| w.imag_part().scaled(2f64.sqrt())).collect();
    let shape = shape_operator_from_derivatives(p, &da, &db)?;
    let principal = spectrum_of(&shape)?;

    let mut frame_relation = 0.0_f64;
    for (lam, (d, cd)) in principal
        .lambdas
        .iter()
        .zip(principal.directions.iter().zip(&principal.coord_directions))
    {
        let mut got = CplxVec::zeros(d.len());
        for (ci, w) in cd.iter().zip(&jet.first) {
            got.axpy_re(*ci, w);
        }
        let zero = RealVec::zeros(d.len());
        let want = CplxVec::from_parts(d, &zero).scaled(Complex::new(FRAC_1_SQRT_2, -lam * FRAC_1_SQRT_2));
        frame_relation = frame_relation.max(got.sub(&want).norm());
    }

    Ok(GaussJet {
        chart_point: p.to_vec(),
        step,
        lift,
        partials,
        second: jet.second.clone(),
        metric,
        frame,
        coords,
        shape,
        principal,
        diagnostics: GaussDiagnostics {
            lagrangian,
            horizontality,
            frame_relation,
        },
    })
}

/// Jet of the lift without the chart-box check; used on nested stencils.
pub(crate) fn gauss_map_unchecked(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<GaussJet> {
    let jet = central_diff_jet(|q: &[f64]| gauss_lift(c, q), p, h)?;
    gauss_jet_from(p, h, &jet)
}

pub fn gauss_map(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<GaussJet> {
    c.check_point(p, h)?;
    gauss_map_unchecked(c, p, h)
}
