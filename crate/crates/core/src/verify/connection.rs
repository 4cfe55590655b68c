use super::{CheckClass, PointData, ResidualReport, Tolerances};
use crate::error::{Error, Result};
use crate::gauss::{angle_spectrum, doubled_angle_distance, gauss_map_unchecked, GaussJet};
use crate::numeric::{
    five_point_derivative, symmetric_eigen, Complex, CplxVec, Matrix, RealVec, SymMatrix, FIRST_DERIVATIVE_OFFSETS,
};
use crate::quadric::{rotate_structure, HorizontalVector, ProductStructureGauge};

/// Smallest singular value of the overlap between the centre frame and its
/// transport to a neighbouring stencil point.
pub const FRAME_OVERLAP_MIN: f64 = 0.9;

/// Angles of the centre frame closer than this form one eigenspace.
const CLUSTER_TOL: f64 = 1e-6;

/// Connection forms and angle derivatives in the angle frame at a point.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    n: usize,
    /// `omega[(i * n + j) * n + k] = omega_j^k(e_i)`.
    omega: Vec<f64>,
    /// `s(e_i)`.
    pub s_form: RealVec,
    /// `dtheta[(i, j)] = e_i(theta_j)`.
    pub dtheta: Matrix,
    /// Smallest overlap singular value met while transporting the frame.
    pub min_overlap: f64,
}

impl ConnectionData {
    pub fn omega(&self, i: usize, j: usize, k: usize) -> f64 {
        self.omega[(i * self.n + j) * self.n + k]
    }

    pub fn antisymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.omega(i, j, k) + self.omega(i, k, j)).abs());
                }
            }
        }
        worst
    }
}

/// Frame quantities sampled at one point.
struct Sample {
    frame: Vec<CplxVec>,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
    xi: CplxVec,
}

fn clusters(thetas: &[f64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (j, t) in thetas.iter().enumerate() {
        match out
            .iter_mut()
            .find(|c| doubled_angle_distance(thetas[c[0]], *t) < CLUSTER_TOL)
        {
            Some(c) => c.push(j),
            None => out.push(vec![j]),
        }
    }
    out
}

fn structure_pair(g: ProductStructureGauge, jet: &GaussJet, w: &CplxVec) -> (f64, f64) {
    let x = HorizontalVector::new_unchecked(jet.lift.clone(), w.clone());
    let ax = rotate_structure(g, &x);
    (ax.w().dot_re(w), ax.w().mul_i().dot_re(w))
}

fn xi_hat(g: ProductStructureGauge, jet: &GaussJet) -> CplxVec {
    jet.lift.z().conj().scaled(Complex::cis(g.phi))
}

/// Transports the centre frame to the jet at `q` by projecting each centre
/// vector onto the matching eigenspace there and orthonormalizing each
/// eigenspace block symmetrically.
fn transport(d: &PointData, groups: &[Vec<usize>], q: &[f64]) -> Result<(Sample, f64)> {
    let n = d.dim();
    let jq = gauss_map_unchecked(&d.chart, q, d.step)?;
    let gq = d.choice.resolve(&jq, Some(d.gauge.phi))?;
    let sq = angle_spectrum(&jq, gq)?;
    let mut coords = vec![RealVec::zeros(n); n];
    let mut min_overlap = f64::INFINITY;
    for group in groups {
        let theta = d.spec.thetas[group[0]];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            doubled_angle_distance(sq.thetas[a], theta).total_cmp(&doubled_angle_distance(sq.thetas[b], theta))
        });
        let picked = &order[..group.len()];
        let m = group.len();
        // P[a][b] = g_q(c_a, v_b) for centre vectors c_a and eigenvectors v_b at q.
        let p = Matrix::from_fn(m, m, |a, b| {
            let gc = jq.metric.matvec(&d.spec.coord_vectors[group[a]]);
            gc.dot(&sq.coord_vectors[picked[b]])
        });
        let gram = p.matmul(&p.transpose());
        let e = symmetric_eigen(&SymMatrix::symmetrize(gram).0)?;
        let smin = e.values[0].max(0.0).sqrt();
        min_overlap = min_overlap.min(smin);
        if !(smin >= super::FRAME_OVERLAP_MIN) {
            return Err(Error::Diagnostic(format!(
                "frame discontinuity between {:?} and {q:?}: overlap {smin:.3e} below {}",
                d.point,
                super::FRAME_OVERLAP_MIN
            )));
        }
        // Loewdin: (P P^T)^{-1/2} P.
        let inv_sqrt = Matrix::from_fn(m, m, |a, b| {
            (0..m)
                .map(|k| e.vectors[(a, k)] * e.vectors[(b, k)] / e.values[k].sqrt())
                .sum()
        });
        let w = inv_sqrt.matmul(&p);
        for (a, &ja) in group.iter().enumerate() {
            for (b, &kb) in picked.iter().enumerate() {
                coords[ja].axpy(w[(a, b)], &sq.coord_vectors[kb]);
            }
        }
    }
    let frame: Vec<CplxVec> = coords.iter().map(|c| jq.push_forward(c)).collect();
    let (cos2, sin2) = frame.iter().map(|w| structure_pair(gq, &jq, w)).unzip();
    let xi = xi_hat(gq, &jq);
    Ok((Sample { frame, cos2, sin2, xi }, min_overlap))
}

/// `omega_j^k(e_i) = g(nabla_{e_i} e_j, e_k)`, `s(e_i) = g(nabla_{e_i} xi, J xi)`
/// and `e_i(theta_j)` by five-point differences of a transported frame.
pub fn connection_and_s(d: &PointData) -> Result<ConnectionData> {
    let n = d.dim();
    let h = d.step;
    let groups = clusters(&d.spec.thetas);
    let centre_frame = &d.spec.lifts;
    let centre_xi = xi_hat(d.gauge, &d.jet);
    let cos_c: Vec<f64> = d.spec.thetas.iter().map(|t| (2.0 * t).cos()).collect();
    let sin_c: Vec<f64> = d.spec.thetas.iter().map(|t| (2.0 * t).sin()).collect();

    // Coordinate derivatives, indexed by chart direction a.
    let mut d_frame = Vec::with_capacity(n);
    let mut d_theta = Matrix::zeros(n, n);
    let mut d_xi = Vec::with_capacity(n);
    let mut min_overlap = f64::INFINITY;
    for a in 0..n {
        let mut samples = Vec::with_capacity(4);
        for k in FIRST_DERIVATIVE_OFFSETS {
            let mut q = d.point.clone();
            q[a] += k * h;
            let (s, ov) = transport(d, &groups, &q)?;
            min_overlap = min_overlap.min(ov);
            samples.push(s);
        }
        let four = |f: &dyn Fn(&Sample) -> f64| {
            five_point_derivative([&f(&samples[0]), &f(&samples[1]), &f(&samples[2]), &f(&samples[3])], h)
        };
        let frame: Vec<CplxVec> = (0..n)
            .map(|j| {
                five_point_derivative(
                    [
                        &samples[0].frame[j],
                        &samples[1].frame[j],
                        &samples[2].frame[j],
                        &samples[3].frame[j],
                    ],
                    h,
                )
            })
            .collect();
        for j in 0..n {
            let dc = four(&|s: &Sample| s.cos2[j]);
            let ds = four(&|s: &Sample| s.sin2[j]);
            d_theta[(a, j)] = (cos_c[j] * ds - sin_c[j] * dc) / 2.0;
        }
        d_frame.push(frame);
        d_xi.push(five_point_derivative(
            [&samples[0].xi, &samples[1].xi, &samples[2].xi, &samples[3].xi],
            h,
        ));
    }

    let e = &d.spec.coord_vectors;
    let along = |i: usize, f: &dyn Fn(usize) -> f64| (0..n).map(|a| e[i][a] * f(a)).sum::<f64>();
    let mut omega = vec![0.0; n * n * n];
    let mut dtheta = Matrix::zeros(n, n);
    let mut s_form = RealVec::zeros(n);
    let i_xi = centre_xi.mul_i();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                omega[(i * n + j) * n + k] = along(i, &|a| d_frame[a][j].dot_re(&centre_frame[k]));
            }
            dtheta[(i, j)] = along(i, &|a| d_theta[(a, j)]);
        }
        s_form[i] = along(i, &|a| d_xi[a].dot_re(&i_xi));
    }
    Ok(ConnectionData {
        n,
        omega,
        s_form,
        dtheta,
        min_overlap,
    })
}

/// Residuals of `e_i(theta_j) = h_jj^i - s(e_i)/2`, of
/// `sin(theta_j - theta_k) omega_j^k(e_i) = cos(theta_j - theta_k) h_ij^k`
/// and of the antisymmetry of `omega`.
pub fn check_connection_identities(d: &PointData, conn: &ConnectionData, tol: &Tolerances) -> ResidualReport {
    let n = d.dim();
    let th = &d.spec.thetas;
    let mut r1 = 0.0_f64;
    let mut r2 = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let lhs = conn.dtheta[(i, j)];
            let rhs = d.ff.get(j, j, i) - conn.s_form[i] / 2.0;
            r1 = r1.max((lhs - rhs).abs());
            for k in 0..n {
                if j == k {
                    continue;
                }
                let diff = th[j] - th[k];
                let res = diff.sin() * conn.omega(i, j, k) - diff.cos() * d.ff.get(i, j, k);
                r2 = r2.max(res.abs());
            }
        }
    }
    let mut r = ResidualReport::new(d.chart.key(), &d.point);
    r.record(
        "integrability_1",
        r1,
        tol.get("integrability_1", CheckClass::FirstOrder),
    );
    r.record(
        "integrability_2",
        r2,
        tol.get("integrability_2", CheckClass::FirstOrder),
    );
    r.record(
        "omega_antisymmetry",
        conn.antisymmetry(),
        tol.get("omega_antisymmetry", CheckClass::Algebraic),
    );
    r
}
