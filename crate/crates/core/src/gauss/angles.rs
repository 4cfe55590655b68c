use std::f64::consts::{PI, TAU};

use super::GaussJet;
use crate::error::{Error, Result};
use crate::numeric::{symmetric_eigen, CplxVec, Matrix, RealVec, SymMatrix};
use crate::quadric::{structure_blocks, ProductStructureGauge};

/// Eigenvalues of `B` closer than this are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;

/// Residual of `B f = cos 2theta f`, `C f = sin 2theta f` above which the
/// joint diagonalization is reported as inconsistent.
const JOINT_RESIDUAL_LIMIT: f64 = 1e-6;

/// Distance between two angles read mod `pi`, in `[0, pi/2]`.
pub fn doubled_angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// `B` and `C` in the orthonormal frame of the jet: `A X = B X - J C X`.
pub fn operators_bc(j: &GaussJet, g: ProductStructureGauge) -> Result<(SymMatrix, SymMatrix)> {
    let (b, c) = structure_blocks(g, &j.frame)?;
    Ok((SymMatrix::symmetrize(b).0, SymMatrix::symmetrize(c).0))
}

/// The angle functions `theta_j` in `[0, pi)` with a frame diagonalizing
/// `B` and `C`.
#[derive(Clone, Debug)]
pub struct AngleSpectrum {
    /// Ascending in `[0, pi)`.
    pub thetas: Vec<f64>,
    pub gauge: ProductStructureGauge,
    /// `e_j` as coefficient vectors in the jet's orthonormal frame.
    pub frame: Vec<RealVec>,
    /// Horizontal lifts of `e_j`.
    pub lifts: Vec<CplxVec>,
    /// `e_j` as chart-coordinate vectors.
    pub coord_vectors: Vec<RealVec>,
    /// Largest joint-eigenvector residual.
    pub residual: f64,
}

impl AngleSpectrum {
    pub fn dim(&self) -> usize {
        self.thetas.len()
    }
}

fn quadratic_form(m: &Matrix, x: &[f64]) -> f64 {
    let mx = m.matvec(x);
    mx.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Columns of `v` restricted to `cols`, rotated so that `C` is diagonal on
/// their span.
fn refine_cluster(c: &Matrix, v: &Matrix, cols: &[usize]) -> Result<Vec<RealVec>> {
    let basis: Vec<RealVec> = cols.iter().map(|&k| v.column(k)).collect();
    if basis.len() == 1 {
        return Ok(basis);
    }
    let m = basis.len();
    let proj = Matrix::from_fn(m, m, |a, b| quadratic_pair(c, &basis[a], &basis[b]));
    let e = symmetric_eigen(&SymMatrix::symmetrize(proj).0)?;
    Ok((0..m)
        .map(|k| {
            let mut out = RealVec::zeros(basis[0].len());
            for (a, ba) in basis.iter().enumerate() {
                out.axpy(e.vectors[(a, k)], ba);
            }
            out
        })
        .collect())
}

fn quadratic_pair(m: &Matrix, x: &[f64], y: &[f64]) -> f64 {
    let mx = m.matvec(x);
    mx.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn angle_spectrum(j: &GaussJet, g: ProductStructureGauge) -> Result<AngleSpectrum> {
    let (b, c) = operators_bc(j, g)?;
    let (b, c) = (b.into_matrix(), c.into_matrix());
    let eb = symmetric_eigen(&SymMatrix::symmetrize(b.clone()).0)?;
    let n = eb.values.len();

    let mut vectors = Vec::with_capacity(n);
    let mut start = 0;
    for k in 1..=n {
        if k == n || eb.values[k] - eb.values[k - 1] > CLUSTER_GAP {
            let cols: Vec<usize> = (start..k).collect();
            vectors.extend(refine_cluster(&c, &eb.vectors, &cols)?);
            start = k;
        }
    }

    let mut entries: Vec<(f64, RealVec)> = Vec::with_capacity(n);
    let mut residual = 0.0_f64;
    for f in vectors {
        let cb = quadratic_form(&b, &f);
        let sc = quadratic_form(&c, &f);
        let bf = b.matvec(&f);
        let cf = c.matvec(&f);
        for k in 0..n {
            residual = residual.max((bf[k] - cb * f[k]).abs()).max((cf[k] - sc * f[k]).abs());
        }
        entries.push(((sc.atan2(cb) / 2.0).rem_euclid(PI), f));
    }
    if !(residual <= JOINT_RESIDUAL_LIMIT) {
        return Err(Error::Diagnostic(format!(
            "B and C are not jointly diagonalized at {:?} (residual {residual:.3e}); eigenvalue clusters of B are ambiguous",
            j.chart_point
        )));
    }
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut thetas = Vec::with_capacity(n);
    let mut frame = Vec::with_capacity(n);
    let mut lifts = Vec::with_capacity(n);
    let mut coord_vectors = Vec::with_capacity(n);
    for (t, f) in entries {
        let mut lift = CplxVec::zeros(j.lift.u().len());
        for (fa, ea) in f.iter().zip(&j.frame) {
            lift.axpy_re(*fa, ea.w());
        }
        coord_vectors.push(j.frame_to_coords(&f));
        lifts.push(lift);
        thetas.push(t);
        frame.push(f);
    }
    Ok(AngleSpectrum {
        thetas,
        gauge: g,
        frame,
        lifts,
        coord_vectors,
        residual,
    })
}

/// Gauge `phi = 2 (sum theta^0_j) / n`, reduced to `[0, 2 pi / n)`, under
/// which the angle functions sum to `0 mod pi`.
pub fn gauge_normalize(j: &GaussJet) -> Result<ProductStructureGauge> {
    let spec = angle_spectrum(j, ProductStructureGauge::CANONICAL)?;
    let n = spec.dim() as f64;
    let sum: f64 = spec.thetas.iter().sum();
    let period = TAU / n;
    let mut phi = (2.0 * sum / n).rem_euclid(period);
    if period - phi < 1e-12 {
        phi = 0.0;
    }
    let gauge = ProductStructureGauge::new(phi);
    let check = angle_spectrum(j, gauge)?;
    let total: f64 = check.thetas.iter().sum();
    if total.sin().abs() > 1e-8 {
        return Err(Error::Diagnostic(format!(
            "normalized angles sum to {total} which is not 0 mod pi"
        )));
    }
    Ok(gauge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cartan_tube, product_spheres, round_sphere, CARTAN_DEFAULT_RADIUS};
    use crate::gauss::gauss_map;
    use crate::numeric::DEFAULT_STEP;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const H: f64 = DEFAULT_STEP;

    #[test]
    fn sphere_has_b_zero_c_identity_in_canonical_gauge() {
        let c = round_sphere(3, FRAC_1_SQRT_2).unwrap();
        let j = gauss_map(&c, &c.center(), H).unwrap();
        let (b, cm) = operators_bc(&j, ProductStructureGauge::CANONICAL).unwrap();
        assert!(b.matrix().max_abs() < 1e-9);
        assert!(cm.matrix().sub(&Matrix::identity(3)).max_abs() < 1e-9);
        let s = angle_spectrum(&j, ProductStructureGauge::CANONICAL).unwrap();
        for t in s.thetas {
            assert!((t - FRAC_PI_4).abs() < 1e-9);
        }
    }

    #[test]
    fn bc_algebra_holds_in_every_gauge() {
        let c = product_spheres(1, 3, 0.6, 0.8).unwrap();
        let j = gauss_map(&c, &c.point_at(&[0.2, 0.7, 0.4], 0.01), H).unwrap();
        for phi in [0.0, 0.5, 2.0] {
            let (b, cm) = operators_bc(&j, ProductStructureGauge::new(phi)).unwrap();
            let (b, cm) = (b.matrix(), cm.matrix());
            let sq = b.matmul(b).add(&cm.matmul(cm)).sub(&Matrix::identity(3));
            assert!(sq.max_abs() < 1e-8);
            assert!(b.matmul(cm).sub(&cm.matmul(b)).max_abs() < 1e-8);
        }
    }

    #[test]
    fn canonical_angles_match_principal_curvatures() {
        let c = product_spheres(2, 3, 0.6, 0.8).unwrap();
        let j = gauss_map(&c, &c.center(), H).unwrap();
        let s = angle_spectrum(&j, ProductStructureGauge::CANONICAL).unwrap();
        let mut cots: Vec<f64> = s.thetas.iter().map(|t| 1.0 / t.tan()).collect();
        cots.sort_by(|a, b| b.total_cmp(a));
        for (l, ct) in j.principal.lambdas.iter().zip(&cots) {
            assert!((l - ct).abs() < 1e-5);
        }
    }

    #[test]
    fn gauge_shift_lowers_angles_by_half_phi() {
        let c = cartan_tube(CARTAN_DEFAULT_RADIUS).unwrap();
        let j = gauss_map(&c, &c.center(), H).unwrap();
        let s0 = angle_spectrum(&j, ProductStructureGauge::CANONICAL).unwrap();
        let phi = 0.9;
        let s1 = angle_spectrum(&j, ProductStructureGauge::new(phi)).unwrap();
        for t in &s0.thetas {
            let shifted = t - phi / 2.0;
            assert!(s1.thetas.iter().any(|u| doubled_angle_distance(*u, shifted) < 1e-8));
        }
    }

    #[test]
    fn normalization_examples() {
        let c = round_sphere(2, FRAC_1_SQRT_2).unwrap();
        let j = gauss_map(&c, &c.center(), H).unwrap();
        let g = gauge_normalize(&j).unwrap();
        assert!((g.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        for t in angle_spectrum(&j, g).unwrap().thetas {
            assert!(doubled_angle_distance(t, 0.0) < 1e-9);
        }

        let c = cartan_tube(CARTAN_DEFAULT_RADIUS).unwrap();
        let j = gauss_map(&c, &c.center(), H).unwrap();
        let g = gauge_normalize(&j).unwrap();
        assert!(g.phi >= 0.0 && g.phi < TAU / 3.0);
        let t = angle_spectrum(&j, g).unwrap().thetas;
        for want in [0.0, PI / 3.0, 2.0 * PI / 3.0] {
            assert!(t.iter().any(|x| doubled_angle_distance(*x, want) < 1e-5), "{t:?}");
        }
    }

    #[test]
    fn angle_distance_wraps() {
        assert!(doubled_angle_distance(0.01, PI - 0.01) < 0.02 + 1e-15);
        assert!((doubled_angle_distance(0.0, PI / 2.0) - PI / 2.0).abs() < 1e-15);
    }
}
