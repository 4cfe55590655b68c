use super::PointData;
use crate::catalog::HypersurfaceChart;
use crate::error::Result;
use crate::gauss::{gauss_lift, gauss_map_unchecked, sigma_tensor, AngleSpectrum, FundamentalForm};
use crate::numeric::{
    central_diff_gradient, central_diff_jet, five_point_derivative, symmetric_eigen, Matrix, RealVec, SymMatrix,
    FIRST_DERIVATIVE_OFFSETS,
};
use crate::quadric::{quadric_curvature, structure_blocks};

fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

fn idx3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

/// Induced metric of the Gauss map in chart coordinates and its
/// Levi-Civita data, all from finite differences of metric coefficients.
#[derive(Clone, Debug)]
pub struct MetricCurvature {
    n: usize,
    pub metric: Matrix,
    pub inverse: Matrix,
    /// `Gamma^e_{bc}` at `idx3(e, b, c)`.
    christoffel: Vec<f64>,
    /// `R(d_a, d_b, d_c, d_d) = g(R(d_a, d_b) d_c, d_d)` at `idx4(a, b, c, d)`.
    riemann: Vec<f64>,
}

impl MetricCurvature {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn christoffel(&self, e: usize, b: usize, c: usize) -> f64 {
        self.christoffel[idx3(self.n, e, b, c)]
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann[idx4(self.n, a, b, c, d)]
    }

    /// `Ric_bc = g^{ad} R(d_a, d_b, d_c, d_d)` in chart coordinates.
    pub fn ricci(&self) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, n, |b, c| {
            let mut s = 0.0;
            for a in 0..n {
                for d in 0..n {
                    s += self.inverse[(a, d)] * self.riemann(a, b, c, d);
                }
            }
            s
        })
    }

    /// Riemann tensor in the frame given by chart-coordinate vectors.
    pub fn in_frame(&self, e: &[RealVec]) -> Vec<f64> {
        let n = self.n;
        // Contract one slot at a time.
        let mut t = self.riemann.clone();
        for slot in 0..4 {
            let mut out = vec![0.0; n * n * n * n];
            for i0 in 0..n {
                for i1 in 0..n {
                    for i2 in 0..n {
                        for i3 in 0..n {
                            let ix = [i0, i1, i2, i3];
                            let mut s = 0.0;
                            for a in 0..n {
                                let mut jx = ix;
                                jx[slot] = a;
                                s += e[ix[slot]][a] * t[idx4(n, jx[0], jx[1], jx[2], jx[3])];
                            }
                            out[idx4(n, i0, i1, i2, i3)] = s;
                        }
                    }
                }
            }
            t = out;
        }
        t
    }
}

fn spd_inverse(m: &Matrix) -> Result<Matrix> {
    let e = symmetric_eigen(&SymMatrix::symmetrize(m.clone()).0)?;
    let n = m.rows();
    Ok(Matrix::from_fn(n, n, |a, b| {
        (0..n)
            .map(|k| e.vectors[(a, k)] * e.vectors[(b, k)] / e.values[k])
            .sum()
    }))
}

/// Metric coefficients `Re <d_a G_hat, d_b G_hat>` at `q`, flattened.
fn metric_at(c: &HypersurfaceChart, q: &[f64], h: f64) -> RealVec {
    let n = q.len();
    match central_diff_gradient(|x: &[f64]| gauss_lift(c, x), q, h) {
        Ok(j) => RealVec((0..n * n).map(|k| j.first[k / n].dot_re(&j.first[k % n])).collect()),
        Err(_) => RealVec(vec![f64::NAN; n * n]),
    }
}

/// Christoffel symbols and curvature of the induced metric at `p` from a
/// second-order jet of the metric coefficients.
pub fn metric_curvature(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<MetricCurvature> {
    curvature_of_metric(|q: &[f64]| metric_at(c, q, h), p, h)
}

/// Christoffel symbols and curvature at `p` of a metric given by its
/// flattened coefficient map `q -> (g_ab)`.
pub fn curvature_of_metric(metric: impl Fn(&[f64]) -> RealVec, p: &[f64], h: f64) -> Result<MetricCurvature> {
    let n = p.len();
    let jet = central_diff_jet(metric, p, h)?;
    let g = |a: usize, b: usize| jet.value[a * n + b];
    let dg = |d: usize, a: usize, b: usize| jet.first[d][a * n + b];
    let ddg = |d: usize, e: usize, a: usize, b: usize| jet.second[d][e][a * n + b];
    let metric = Matrix::from_fn(n, n, g);
    let inverse = spd_inverse(&metric)?;

    // Gamma_{bc,d} and its derivative along a.
    let first_kind = |b: usize, cc: usize, d: usize| 0.5 * (dg(b, cc, d) + dg(cc, b, d) - dg(d, b, cc));
    let d_first_kind =
        |a: usize, b: usize, cc: usize, d: usize| 0.5 * (ddg(a, b, cc, d) + ddg(a, cc, b, d) - ddg(a, d, b, cc));

    let mut christoffel = vec![0.0; n * n * n];
    for e in 0..n {
        for b in 0..n {
            for cc in 0..n {
                christoffel[idx3(n, e, b, cc)] = (0..n).map(|d| inverse[(e, d)] * first_kind(b, cc, d)).sum();
            }
        }
    }
    let gam = |e: usize, b: usize, cc: usize| christoffel[idx3(n, e, b, cc)];

    let mut riemann = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let mut r = d_first_kind(a, b, cc, d) - d_first_kind(b, a, cc, d);
                    for e in 0..n {
                        r += -gam(e, b, cc) * first_kind(a, d, e) + gam(e, a, cc) * first_kind(b, d, e);
                    }
                    riemann[idx4(n, a, b, cc, d)] = r;
                }
            }
        }
    }
    Ok(MetricCurvature {
        n,
        metric,
        inverse,
        christoffel,
        riemann,
    })
}

/// Largest deviation of the induced curvature from
/// `R_ijkl = d_jk d_il - d_ik d_jl + B_jk B_il - B_ik B_jl + C_jk C_il - C_ik C_jl
///  + sum_m (h_jk^m h_il^m - h_ik^m h_jl^m)`.
pub fn gauss_residual(d: &PointData, mc: &MetricCurvature) -> f64 {
    let n = d.dim();
    let r = mc.in_frame(&d.spec.coord_vectors);
    let Ok((b, c)) = structure_blocks(d.gauge, &d.frame()) else {
        return f64::NAN;
    };
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let h = &d.ff;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut rhs = delta(j, k) * delta(i, l) - delta(i, k) * delta(j, l) + b[(j, k)] * b[(i, l)]
                        - b[(i, k)] * b[(j, l)]
                        + c[(j, k)] * c[(i, l)]
                        - c[(i, k)] * c[(j, l)];
                    for m in 0..n {
                        rhs += h.get(j, k, m) * h.get(i, l, m) - h.get(i, k, m) * h.get(j, l, m);
                    }
                    worst = worst.max((r[idx4(n, i, j, k, l)] - rhs).abs());
                }
            }
        }
    }
    worst
}

/// `K_ij = 2 cos^2(theta_i - theta_j) + sum_k (h_ii^k h_jj^k - (h_ij^k)^2)`.
pub fn sectional_curvature(d: &PointData) -> SymMatrix {
    let n = d.dim();
    let th = &d.spec.thetas;
    let h = &d.ff;
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut k = 2.0 * (th[i] - th[j]).cos().powi(2);
        for m in 0..n {
            k += h.get(i, i, m) * h.get(j, j, m) - h.get(i, j, m).powi(2);
        }
        k
    });
    SymMatrix::symmetrize(m).0
}

/// `K(e_i, e_j) = R(e_i, e_j, e_j, e_i)` of the induced metric.
pub fn metric_sectional(d: &PointData, mc: &MetricCurvature) -> Matrix {
    let n = d.dim();
    let r = mc.in_frame(&d.spec.coord_vectors);
    Matrix::from_fn(n, n, |i, j| r[idx4(n, i, j, j, i)])
}

/// Both sides of the Codazzi equation paired with `J e_l`:
/// `(nabla_i h)(e_j, e_k, e_l) - (nabla_j h)(e_i, e_k, e_l)` against
/// `g(R(e_i, e_j) e_k, J e_l)` of `Q^n`.
#[derive(Clone, Debug)]
pub struct CodazziData {
    n: usize,
    lhs: Vec<f64>,
    rhs: Vec<f64>,
}

impl CodazziData {
    pub fn lhs(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.lhs[idx4(self.n, i, j, k, l)]
    }

    pub fn rhs(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.rhs[idx4(self.n, i, j, k, l)]
    }
}

fn flat_sigma(c: &HypersurfaceChart, q: &[f64], h: f64) -> Result<RealVec> {
    let j = gauss_map_unchecked(c, q, h)?;
    let s = sigma_tensor(&j);
    Ok(RealVec(s.into_iter().flatten().flatten().collect()))
}

pub fn codazzi_tensor(d: &PointData, mc: &MetricCurvature) -> Result<CodazziData> {
    let n = d.dim();
    let h = d.step;
    let sigma = flat_sigma(&d.chart, &d.point, h)?;
    let mut dsigma = Vec::with_capacity(n);
    for a in 0..n {
        let mut samples = Vec::with_capacity(4);
        for k in FIRST_DERIVATIVE_OFFSETS {
            let mut q = d.point.clone();
            q[a] += k * h;
            samples.push(flat_sigma(&d.chart, &q, h)?);
        }
        dsigma.push(five_point_derivative(
            [&samples[0], &samples[1], &samples[2], &samples[3]],
            h,
        ));
    }
    let s = |a: usize, b: usize, c: usize| sigma[idx3(n, a, b, c)];
    // (nabla_d sigma)_abc at idx4(d, a, b, c).
    let mut nabla = vec![0.0; n * n * n * n];
    for dd in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = dsigma[dd][idx3(n, a, b, c)];
                    for e in 0..n {
                        v -= mc.christoffel(e, dd, a) * s(e, b, c)
                            + mc.christoffel(e, dd, b) * s(a, e, c)
                            + mc.christoffel(e, dd, c) * s(a, b, e);
                    }
                    nabla[idx4(n, dd, a, b, c)] = v;
                }
            }
        }
    }
    let ev = &d.spec.coord_vectors;
    let mut framed = nabla;
    for slot in 0..4 {
        let mut out = vec![0.0; framed.len()];
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        let ix = [i0, i1, i2, i3];
                        let mut acc = 0.0;
                        for a in 0..n {
                            let mut jx = ix;
                            jx[slot] = a;
                            acc += ev[ix[slot]][a] * framed[idx4(n, jx[0], jx[1], jx[2], jx[3])];
                        }
                        out[idx4(n, i0, i1, i2, i3)] = acc;
                    }
                }
            }
        }
        framed = out;
    }

    let frame = d.frame();
    let mut lhs = vec![0.0; n * n * n * n];
    let mut rhs = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = quadric_curvature(d.gauge, &frame[i], &frame[j], &frame[k])?;
                for l in 0..n {
                    lhs[idx4(n, i, j, k, l)] = framed[idx4(n, i, j, k, l)] - framed[idx4(n, j, i, k, l)];
                    rhs[idx4(n, i, j, k, l)] = r.w().dot_re(&frame[l].w().mul_i());
                }
            }
        }
    }
    Ok(CodazziData { n, lhs, rhs })
}

pub fn codazzi_residual(c: &CodazziData) -> f64 {
    c.lhs.iter().zip(&c.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Deviations of `(h_12^3)^2` from its three closed forms in the angles.
pub fn h123_residuals(spec: &AngleSpectrum, ff: &FundamentalForm) -> [f64; 3] {
    let t = &spec.thetas;
    let h2 = ff.get(0, 1, 2).powi(2);
    let (a, b, c) = (t[0] - t[1], t[1] - t[2], t[2] - t[0]);
    [
        (h2 + a.cos() * b.sin() * c.sin()).abs(),
        (h2 + a.sin() * b.cos() * c.sin()).abs(),
        (h2 + a.sin() * b.sin() * c.cos()).abs(),
    ]
}

/// Residuals of the three identities satisfied by constant-curvature
/// Lagrangians, each maximized over admissible index tuples (`0` when no
/// tuple exists).
pub fn csc_residuals(spec: &AngleSpectrum, ff: &FundamentalForm) -> [f64; 3] {
    let n = spec.dim();
    let t = &spec.thetas;
    let f = |i: usize, j: usize, k: usize| (t[i] - t[j]).sin() * (t[i] + t[j] - 2.0 * t[k]).sin();
    let mut out = [0.0_f64; 3];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let e1 = ff.get(i, i, k) * f(i, k, j) - ff.get(j, j, k) * f(j, k, i);
                out[0] = out[0].max(e1.abs());
                out[1] = out[1].max((ff.get(i, j, k) * f(i, j, k)).abs());
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    out[2] = out[2].max((ff.get(i, j, k) * f(i, j, l)).abs());
                }
            }
        }
    }
    out
}
