//! Parametrized hypersurfaces of the unit sphere `S^{n+1}` with unit normal,
//! their shape operators and principal curvatures.

mod examples;

pub(crate) use examples::hyperspherical_bounds;

pub use examples::{
    cartan_tube, hyperspherical, parallel_hypersurface, product_spheres, round_sphere, CARTAN_DEFAULT_RADIUS,
    CHART_MARGIN,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{central_diff_gradient, gram_schmidt_with_coeffs, symmetric_eigen, Matrix, RealVec, SymMatrix};

/// Smallest singular value of the differential accepted as an immersion.
pub const MIN_SINGULAR_VALUE: f64 = 1e-6;

pub type ChartMap = Arc<dyn Fn(&[f64]) -> RealVec + Send + Sync>;

/// An immersion of a coordinate box into `S^{n+1}` together with a unit
/// normal field tangent to the sphere.
#[derive(Clone)]
pub struct HypersurfaceChart {
    key: String,
    dim: usize,
    embed: ChartMap,
    normal: ChartMap,
    bounds: Vec<(f64, f64)>,
}

impl fmt::Debug for HypersurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HypersurfaceChart")
            .field("key", &self.key)
            .field("dim", &self.dim)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl HypersurfaceChart {
    pub fn new(key: impl Into<String>, bounds: Vec<(f64, f64)>, embed: ChartMap, normal: ChartMap) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidParameter(format!("bad chart box {bounds:?}")));
        }
        Ok(HypersurfaceChart {
            key: key.into(),
            dim: bounds.len(),
            embed,
            normal,
            bounds,
        })
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim + 2
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn embed(&self, p: &[f64]) -> RealVec {
        (self.embed)(p)
    }

    pub fn normal(&self, p: &[f64]) -> RealVec {
        (self.normal)(p)
    }

    pub fn embed_map(&self) -> ChartMap {
        self.embed.clone()
    }

    pub fn normal_map(&self) -> ChartMap {
        self.normal.clone()
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Whether `p` lies in the box shrunk by `margin` on every side.
    pub fn contains(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim
            && p.iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x >= lo + margin && x <= hi - margin)
    }

    /// Maps `s in [0,1]^n` affinely onto the box shrunk by `margin`.
    pub fn point_at(&self, s: &[f64], margin: f64) -> Vec<f64> {
        s.iter()
            .zip(&self.bounds)
            .map(|(&t, &(lo, hi))| lo + margin + t * (hi - lo - 2.0 * margin))
            .collect()
    }

    pub fn check_point(&self, p: &[f64], h: f64) -> Result<()> {
        if self.contains(p, 2.0 * h) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "point {p:?} is not inside the {} chart box with stencil margin {}",
                self.key,
                2.0 * h
            )))
        }
    }

    /// Same chart with the normal replaced by its negative.
    pub fn flipped(&self) -> Self {
        let normal = self.normal.clone();
        HypersurfaceChart {
            normal: Arc::new(move |p| normal(p).scaled(-1.0)),
            ..self.clone()
        }
    }

    pub fn invariants(&self, p: &[f64], h: f64) -> Result<ChartInvariants> {
        let a = self.embed(p);
        let b = self.normal(p);
        let jet = central_diff_gradient(|q: &[f64]| self.embed(q), p, h)?;
        Ok(ChartInvariants {
            embed_norm_defect: (a.norm() - 1.0).abs(),
            normal_norm_defect: (b.norm() - 1.0).abs(),
            orthogonality: a.dot(&b).abs(),
            sigma_min: smallest_singular_value(&jet.first)?,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChartInvariants {
    pub embed_norm_defect: f64,
    pub normal_norm_defect: f64,
    pub orthogonality: f64,
    pub sigma_min: f64,
}

impl ChartInvariants {
    pub fn holds(&self, tol: f64) -> bool {
        self.embed_norm_defect < tol
            && self.normal_norm_defect < tol
            && self.orthogonality < tol
            && self.sigma_min > MIN_SINGULAR_VALUE
    }
}

fn smallest_singular_value(columns: &[RealVec]) -> Result<f64> {
    let n = columns.len();
    let gram = Matrix::from_fn(n, n, |i, j| columns[i].dot(&columns[j]));
    let e = symmetric_eigen(&SymMatrix::symmetrize(gram).0)?;
    Ok(e.values[0].max(0.0).sqrt())
}

/// Matrix of the shape operator `S X = -(db X)^T` in an orthonormal tangent
/// frame.
#[derive(Clone, Debug)]
pub struct ShapeOperator {
    pub matrix: SymMatrix,
    /// `|S_ab - S_ba|` before symmetrization.
    pub asymmetry: f64,
    /// Orthonormal tangent frame `E_a` in ambient coordinates.
    pub frame: Vec<RealVec>,
    /// `E_a = sum_j coords[(a, j)] d/dx_j`.
    pub coords: Matrix,
    pub sigma_min: f64,
}

#[derive(Clone, Debug)]
pub struct ShapeSpectrum {
    /// Descending.
    pub lambdas: Vec<f64>,
    /// Unit principal directions in ambient coordinates.
    pub directions: Vec<RealVec>,
    /// The same directions as chart-coordinate vectors.
    pub coord_directions: Vec<RealVec>,
}

impl ShapeSpectrum {
    /// Largest `|S d_j - lambda_j d_j|` over the directions.
    pub fn residual(&self, s: &ShapeOperator) -> f64 {
        let mut worst = 0.0_f64;
        for (lam, d) in self.lambdas.iter().zip(&self.directions) {
            let coeffs: Vec<f64> = s.frame.iter().map(|e| e.dot(d)).collect();
            let sd = s.matrix.matrix().matvec(&coeffs);
            for (x, c) in sd.iter().zip(&coeffs) {
                worst = worst.max((x - lam * c).abs());
            }
        }
        worst
    }
}

/// Shape operator from the coordinate derivatives of `a` and `b` at `p`.
pub fn shape_operator_from_derivatives(p: &[f64], da: &[RealVec], db: &[RealVec]) -> Result<ShapeOperator> {
    let sigma_min = smallest_singular_value(da)?;
    if !(sigma_min > MIN_SINGULAR_VALUE) {
        return Err(Error::Degenerate {
            point: p.to_vec(),
            sigma_min,
        });
    }
    let (frame, coords) = gram_schmidt_with_coeffs(da)?;
    let n = da.len();
    let dbe: Vec<RealVec> = (0..n)
        .map(|a| {
            let mut v = RealVec::zeros(db[0].len());
            for (j, bj) in db.iter().enumerate() {
                v.axpy(coords[(a, j)], bj);
            }
            v
        })
        .collect();
    let raw = Matrix::from_fn(n, n, |a, b| -dbe[a].dot(&frame[b]));
    let (matrix, asymmetry) = SymMatrix::symmetrize(raw);
    Ok(ShapeOperator {
        matrix,
        asymmetry,
        frame,
        coords,
        sigma_min,
    })
}

pub fn shape_operator(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<ShapeOperator> {
    c.check_point(p, h)?;
    let da = central_diff_gradient(|q: &[f64]| c.embed(q), p, h)?;
    let db = central_diff_gradient(|q: &[f64]| c.normal(q), p, h)?;
    shape_operator_from_derivatives(p, &da.first, &db.first)
}

pub fn spectrum_of(s: &ShapeOperator) -> Result<ShapeSpectrum> {
    let e = symmetric_eigen(&s.matrix)?;
    let n = e.values.len();
    let mut lambdas = Vec::with_capacity(n);
    let mut directions = Vec::with_capacity(n);
    let mut coord_directions = Vec::with_capacity(n);
    for k in (0..n).rev() {
        lambdas.push(e.values[k]);
        let mut d = RealVec::zeros(s.frame[0].len());
        let mut c = RealVec::zeros(n);
        for a in 0..n {
            let w = e.vectors[(a, k)];
            d.axpy(w, &s.frame[a]);
            for j in 0..n {
                c[j] += w * s.coords[(a, j)];
            }
        }
        directions.push(d);
        coord_directions.push(c);
    }
    Ok(ShapeSpectrum {
        lambdas,
        directions,
        coord_directions,
    })
}

pub fn principal_curvatures(c: &HypersurfaceChart, p: &[f64], h: f64) -> Result<ShapeSpectrum> {
    spectrum_of(&shape_operator(c, p, h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_STEP;

    #[test]
    fn sphere_of_radius_one_over_root_two_has_identity_shape_operator() {
        let c = round_sphere(3, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let s = shape_operator(&c, &c.center(), DEFAULT_STEP).unwrap();
        assert!(s.matrix.matrix().sub(&Matrix::identity(3)).max_abs() < 1e-8);
        assert!(s.asymmetry < 1e-5);
    }

    #[test]
    fn equator_is_totally_geodesic() {
        let c = round_sphere(2, 1.0).unwrap();
        let s = shape_operator(&c, &c.center(), DEFAULT_STEP).unwrap();
        assert!(s.matrix.matrix().max_abs() < 1e-9);
    }

    #[test]
    fn clifford_torus_curvatures() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = product_spheres(1, 2, r, r).unwrap();
        let sp = principal_curvatures(&c, &c.center(), DEFAULT_STEP).unwrap();
        assert!((sp.lambdas[0] - 1.0).abs() < 1e-8);
        assert!((sp.lambdas[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn spectrum_directions_are_eigenvectors() {
        let c = product_spheres(2, 3, 0.6, 0.8).unwrap();
        let p = c.point_at(&[0.3, 0.6, 0.2], 0.0);
        let s = shape_operator(&c, &p, DEFAULT_STEP).unwrap();
        let sp = spectrum_of(&s).unwrap();
        assert!(sp.residual(&s) < 1e-6);
        assert!(sp.lambdas.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn points_outside_the_margin_are_rejected() {
        let c = round_sphere(2, 0.5).unwrap();
        let p: Vec<f64> = c.bounds().iter().map(|b| b.0).collect();
        assert!(shape_operator(&c, &p, DEFAULT_STEP).is_err());
    }
}
