use super::{angle_spectrum, gauss_map, AngleSpectrum, GaussJet};
use crate::catalog::{shape_operator_from_derivatives, spectrum_of, HypersurfaceChart};
use crate::error::{Error, Result};
use crate::numeric::{central_diff_gradient, RealVec};
use crate::quadric::ProductStructureGauge;

/// Symmetry defect above which the second fundamental form is rejected.
const SYMMETRY_LIMIT: f64 = 1e-4;

/// Components `h_ij^k = g(h(e_i, e_j), J e_k)` in an angle frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalForm {
    n: usize,
    h: Vec<f64>,
}

impl FundamentalForm {
    pub fn zeros(n: usize) -> Self {
        FundamentalForm {
            n,
            h: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.h[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.h[(i * self.n + j) * self.n + k]
    }

    /// Largest difference between components related by an index swap.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = self.get(i, j, k);
                    worst = worst
                        .max((x - self.get(j, i, k)).abs())
                        .max((x - self.get(i, k, j)).abs())
                        .max((x - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.h.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// `sigma[a][b][c] = Re <d_a d_b G_hat, i d_c G_hat>` in chart coordinates.
pub fn sigma_tensor(j: &GaussJet) -> Vec<Vec<Vec<f64>>> {
    let n = j.dim();
    let ig: Vec<_> = j.partials.iter().map(|d| d.w().mul_i()).collect();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| j.second[a][b].dot_re(&ig[c])).collect())
                .collect()
        })
        .collect()
}

/// Contracts a chart-coordinate 3-tensor with the angle frame.
pub(crate) fn contract3(t: &[Vec<Vec<f64>>], e: &[RealVec]) -> FundamentalForm {
    let n = e.len();
    FundamentalForm::from_fn(n, |i, jj, k| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    s += e[i][a] * e[jj][b] * e[k][c] * t[a][b][c];
                }
            }
        }
        s
    })
}

/// The second fundamental form of the Gauss map: the `J e_k` component of
/// the ambient second derivative of the lift. Tangential, vertical and
/// `Q^n`-normal parts of that derivative are real-orthogonal to `i e_k`.
pub fn second_fundamental_form(j: &GaussJet, spec: &AngleSpectrum) -> Result<FundamentalForm> {
    let ff = contract3(&sigma_tensor(j), &spec.coord_vectors);
    let defect = ff.symmetry_defect();
    if !(defect <= SYMMETRY_LIMIT) {
        return Err(Error::Diagnostic(format!(
            "second fundamental form is not totally symmetric at {:?} (defect {defect:.3e}); reduce the step or check the chart",
            j.chart_point
        )));
    }
    Ok(ff)
}

/// `H_i = (1/n) sum_j h_jj^i`, the `J e_i` components of the mean curvature.
pub fn mean_curvature(ff: &FundamentalForm) -> RealVec {
    let n = ff.dim();
    RealVec(
        (0..n)
            .map(|i| (0..n).map(|jj| ff.get(jj, jj, i)).sum::<f64>() / n as f64)
            .collect(),
    )
}

#[derive(Clone, Debug)]
pub struct PalmerResidual {
    /// `g(JH, e_i) = -H_i`.
    pub lhs: Vec<f64>,
    /// `(1/n) e_i(sum_j arctan lambda_j)`, the derivative of
    /// `(1/n) Im log prod (1 + i lambda_j)`.
    pub rhs: Vec<f64>,
    pub residual: f64,
}

fn arctan_sum(c: &HypersurfaceChart, q: &[f64], h: f64) -> f64 {
    let da = central_diff_gradient(|x: &[f64]| c.embed(x), q, h);
    let db = central_diff_gradient(|x: &[f64]| c.normal(x), q, h);
    match (da, db) {
        (Ok(da), Ok(db)) => shape_operator_from_derivatives(q, &da.first, &db.first)
            .and_then(|s| spectrum_of(&s))
            .map(|s| s.lambdas.iter().map(|l| l.atan()).sum())
            .unwrap_or(f64::NAN),
        _ => f64::NAN,
    }
}

/// Compares the mean curvature form of the Gauss map with the derivative
/// of `(1/n) Im log prod (1 + i lambda_j)` in an angle frame.
///
/// With `J` acting as `+i` on lifts the two sides agree as
/// `g(JH, e_i) = (1/n) d Im log prod(1 + i lambda_j) (e_i)`.
pub fn palmer_residual(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<PalmerResidual> {
    let j = gauss_map(c, p, h)?;
    let spec = angle_spectrum(&j, ProductStructureGauge::CANONICAL)?;
    let ff = second_fundamental_form(&j, &spec)?;
    let mean = mean_curvature(&ff);
    let n = j.dim();

    let grad = central_diff_gradient(|q: &[f64]| arctan_sum(c, q, h), p, h)?;
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut residual = 0.0_f64;
    for i in 0..n {
        let e = &spec.coord_vectors[i];
        let d: f64 = e.iter().zip(&grad.first).map(|(a, b)| a * b).sum();
        let l = -mean[i];
        let r = d / n as f64;
        residual = residual.max((l - r).abs());
        lhs.push(l);
        rhs.push(r);
    }
    Ok(PalmerResidual { lhs, rhs, residual })
}
