//! The complex hyperquadric `Q^n` in `CP^{n+1}`, handled through Stiefel lifts.
//!
//! A point of `Q^n` is represented by `z = u + i v` with `|u|^2 = |v|^2 = 1/2`
//! and `u . v = 0`. Tangent vectors are horizontal lifts `w` at `z`: vectors
//! of `C^{n+2}` real-orthogonal to `z, iz, conj(z), i conj(z)`. The metric is
//! `Re <w1, w2>` and `J` is multiplication by `+i`.

use crate::error::{Error, Result};
use crate::numeric::{orthogonal_complement, Complex, CplxVec, Matrix, RealVec};

/// Tolerance on the Stiefel invariants.
pub const STIEFEL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    u: RealVec,
    v: RealVec,
}

impl StiefelPoint {
    pub fn new(u: RealVec, v: RealVec) -> Result<Self> {
        if u.len() != v.len() || u.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "Stiefel pair needs equal lengths >= 3, got {} and {}",
                u.len(),
                v.len()
            )));
        }
        let p = StiefelPoint { u, v };
        let defect = p.invariant_defect();
        if !(defect < STIEFEL_TOL) {
            return Err(Error::InvalidParameter(format!(
                "not a Stiefel point: invariant defect {defect:.3e}"
            )));
        }
        Ok(p)
    }

    /// Builds a point without checking the invariants.
    pub fn new_unchecked(u: RealVec, v: RealVec) -> Self {
        StiefelPoint { u, v }
    }

    /// `(e1 + i e2) / sqrt 2` for an orthonormal pair.
    pub fn from_orthonormal_pair(e1: &RealVec, e2: &RealVec) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(e1.scaled(s), e2.scaled(s))
    }

    pub fn from_lift(z: &CplxVec) -> Result<Self> {
        Self::new(z.real_part(), z.imag_part())
    }

    pub fn u(&self) -> &RealVec {
        &self.u
    }

    pub fn v(&self) -> &RealVec {
        &self.v
    }

    pub fn z(&self) -> CplxVec {
        CplxVec::from_parts(&self.u, &self.v)
    }

    /// Complex dimension `n` of the quadric.
    pub fn quadric_dim(&self) -> usize {
        self.u.len() - 2
    }

    pub fn invariant_defect(&self) -> f64 {
        let a = (self.u.dot(&self.u) - 0.5).abs();
        let b = (self.v.dot(&self.v) - 0.5).abs();
        let c = self.u.dot(&self.v).abs();
        a.max(b).max(c)
    }

    /// `z, iz, conj z, i conj z`: a real-orthonormal basis of the vertical
    /// and normal directions at `z`.
    fn non_horizontal_basis(&self) -> [CplxVec; 4] {
        let z = self.z();
        let zb = z.conj();
        [z.mul_i(), zb.mul_i(), z, zb]
    }

    /// Real-orthogonal projection of `w` onto the horizontal space at `z`.
    pub fn project_horizontal(&self, w: &CplxVec) -> CplxVec {
        let mut out = w.clone();
        for e in self.non_horizontal_basis() {
            let c = out.dot_re(&e);
            out.axpy_re(-c, &e);
        }
        out
    }

    /// Largest component of `w` along `z, iz, conj z, i conj z`.
    pub fn horizontality_defect(&self, w: &CplxVec) -> f64 {
        self.non_horizontal_basis()
            .iter()
            .map(|e| w.dot_re(e).abs())
            .fold(0.0, f64::max)
    }

    /// Real-orthonormal basis `{f_k, i f_k}` of the horizontal space, with
    /// `f_1..f_n` an orthonormal basis of `span(u, v)^perp` in `R^{n+2}`.
    pub fn horizontal_frame(&self) -> Result<Vec<HorizontalVector>> {
        let m = self.u.len();
        let f = orthogonal_complement(&[self.u.clone(), self.v.clone()], m)?;
        let zero = RealVec::zeros(m);
        let mut out = Vec::with_capacity(2 * f.len());
        for fk in &f {
            out.push(HorizontalVector::new_unchecked(
                self.clone(),
                CplxVec::from_parts(fk, &zero),
            ));
        }
        for fk in &f {
            out.push(HorizontalVector::new_unchecked(
                self.clone(),
                CplxVec::from_parts(&zero, fk),
            ));
        }
        Ok(out)
    }

    /// Distance in `Q^n` (Fubini-Study, holomorphic curvature 4) between the
    /// points represented by two lifts.
    pub fn distance(&self, other: &StiefelPoint) -> f64 {
        let z = self.z();
        let w = other.z();
        let c = w.herm(&z);
        let mut perp = w.clone();
        perp.axpy(-c, &z);
        perp.norm().atan2(c.abs())
    }
}

/// `|sum z_k^2|`; vanishes on valid Stiefel points.
pub fn quadric_residual(p: &StiefelPoint) -> f64 {
    let z = p.z();
    z.bilinear(&z).abs()
}

#[derive(Clone, Debug)]
pub struct HorizontalVector {
    base: StiefelPoint,
    w: CplxVec,
}

impl HorizontalVector {
    /// Tolerance used by [`HorizontalVector::new`].
    pub const HORIZONTAL_TOL: f64 = 1e-10;

    pub fn new(base: StiefelPoint, w: CplxVec) -> Result<Self> {
        let scale = 1.0 + w.norm();
        let defect = base.horizontality_defect(&w);
        if !(defect <= Self::HORIZONTAL_TOL * scale) {
            return Err(Error::InvalidParameter(format!(
                "vector is not horizontal (defect {defect:.3e})"
            )));
        }
        Ok(HorizontalVector { base, w })
    }

    pub fn new_unchecked(base: StiefelPoint, w: CplxVec) -> Self {
        HorizontalVector { base, w }
    }

    /// Projects an arbitrary `w` onto the horizontal space at `base`.
    pub fn project(base: StiefelPoint, w: &CplxVec) -> Self {
        let w = base.project_horizontal(w);
        HorizontalVector { base, w }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn w(&self) -> &CplxVec {
        &self.w
    }

    pub fn into_w(self) -> CplxVec {
        self.w
    }

    pub fn norm(&self) -> f64 {
        self.w.norm()
    }

    fn with(&self, w: CplxVec) -> Self {
        HorizontalVector {
            base: self.base.clone(),
            w,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.with(self.w.scaled_re(s))
    }

    /// `self + s * other`; bases must agree.
    pub fn add_scaled(&self, s: f64, other: &HorizontalVector) -> Result<Self> {
        same_base(self, other)?;
        let mut w = self.w.clone();
        w.axpy_re(s, &other.w);
        Ok(self.with(w))
    }
}

const BASE_TOL: f64 = 1e-12;

fn same_base(a: &HorizontalVector, b: &HorizontalVector) -> Result<()> {
    let za = &a.base;
    let zb = &b.base;
    let d = za.u.sub(&zb.u).max_abs().max(za.v.sub(&zb.v).max_abs());
    if za.u.len() != zb.u.len() || !(d <= BASE_TOL) {
        Err(Error::BaseMismatch)
    } else {
        Ok(())
    }
}

/// `g(x, y) = Re <x, y>`.
pub fn metric(x: &HorizontalVector, y: &HorizontalVector) -> Result<f64> {
    same_base(x, y)?;
    Ok(x.w.dot_re(&y.w))
}

/// Multiplication by `i`.
pub fn apply_j(x: &HorizontalVector) -> HorizontalVector {
    x.with(x.w.mul_i())
}

/// `A_0 x = -conj(x)`, re-projected to the horizontal space.
pub fn apply_a0(x: &HorizontalVector) -> HorizontalVector {
    let w = x.w.conj().scaled_re(-1.0);
    x.with(x.base.project_horizontal(&w))
}

/// Angle `phi` selecting `A = cos(phi) A_0 + sin(phi) J A_0`; read mod `2 pi`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProductStructureGauge {
    pub phi: f64,
}

impl ProductStructureGauge {
    pub const CANONICAL: ProductStructureGauge = ProductStructureGauge { phi: 0.0 };

    pub fn new(phi: f64) -> Self {
        ProductStructureGauge { phi }
    }

    /// Representative of `phi` in `[0, 2 pi)`.
    pub fn reduced(&self) -> f64 {
        self.phi.rem_euclid(std::f64::consts::TAU)
    }

    /// Shift of every angle function relative to the canonical gauge.
    pub fn angle_shift(&self) -> f64 {
        -self.phi / 2.0
    }
}

/// `cos(phi) A_0 x + sin(phi) J A_0 x`, which on lifts is `-e^{i phi} conj(x)`.
pub fn rotate_structure(g: ProductStructureGauge, x: &HorizontalVector) -> HorizontalVector {
    let a0 = apply_a0(x);
    let w = a0.w.scaled(Complex::cis(g.phi));
    x.with(w)
}

/// Riemann tensor `R(x, y) z` of `Q^n`, written with the structure `A` of
/// gauge `g`; the result does not depend on `g`.
pub fn quadric_curvature(
    g: ProductStructureGauge,
    x: &HorizontalVector,
    y: &HorizontalVector,
    z: &HorizontalVector,
) -> Result<HorizontalVector> {
    same_base(x, y)?;
    same_base(x, z)?;
    let ip = |a: &HorizontalVector, b: &HorizontalVector| a.w.dot_re(&b.w);
    let (jx, jy, jz) = (apply_j(x), apply_j(y), apply_j(z));
    let (ax, ay) = (rotate_structure(g, x), rotate_structure(g, y));
    let (jax, jay) = (apply_j(&ax), apply_j(&ay));

    let terms: [(f64, &HorizontalVector); 9] = [
        (ip(y, z), x),
        (-ip(x, z), y),
        (ip(x, &jz), &jy),
        (-ip(y, &jz), &jx),
        (2.0 * ip(x, &jy), &jz),
        (ip(&ay, z), &ax),
        (-ip(&ax, z), &ay),
        (ip(&jay, z), &jax),
        (-ip(&jax, z), &jay),
    ];
    let mut w = CplxVec::zeros(x.w.len());
    for (c, v) in terms {
        w.axpy_re(c, &v.w);
    }
    Ok(x.with(w))
}

/// Ricci form `Ric(y, z) = sum_k g(R(e_k, y) z, e_k)` over the horizontal
/// frame at `base`, as a matrix in that same frame.
pub fn ricci_matrix(g: ProductStructureGauge, base: &StiefelPoint) -> Result<Matrix> {
    let frame = base.horizontal_frame()?;
    let d = frame.len();
    let mut ric = Matrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for e in &frame {
                let r = quadric_curvature(g, e, &frame[a], &frame[b])?;
                s += metric(&r, e)?;
            }
            ric[(a, b)] = s;
        }
    }
    Ok(ric)
}

/// Matrices `B_ab = g(A E_a, E_b)` and `C_ab = g(J A E_a, E_b)` of a
/// structure restricted to an orthonormal Lagrangian frame, so that
/// `A X = B X - J C X` on the span of the frame.
pub fn structure_blocks(g: ProductStructureGauge, frame: &[HorizontalVector]) -> Result<(Matrix, Matrix)> {
    let n = frame.len();
    let mut b = Matrix::zeros(n, n);
    let mut c = Matrix::zeros(n, n);
    for (a, ea) in frame.iter().enumerate() {
        let aa = rotate_structure(g, ea);
        let jaa = apply_j(&aa);
        for (k, ek) in frame.iter().enumerate() {
            b[(a, k)] = metric(&aa, ek)?;
            c[(a, k)] = metric(&jaa, ek)?;
        }
    }
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::gram_schmidt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> StiefelPoint {
        let m = n + 2;
        let raw: Vec<RealVec> = (0..2)
            .map(|_| RealVec((0..m).map(|_| rng.random_range(-1.0..1.0)).collect()))
            .collect();
        let q = gram_schmidt(&raw).unwrap();
        StiefelPoint::from_orthonormal_pair(&q[0], &q[1]).unwrap()
    }

    fn random_horizontal(rng: &mut ChaCha8Rng, p: &StiefelPoint) -> HorizontalVector {
        let m = p.u().len();
        let re: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let im: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        HorizontalVector::project(p.clone(), &CplxVec::from_parts(&re, &im))
    }

    fn dist(a: &HorizontalVector, b: &HorizontalVector) -> f64 {
        a.w().sub(b.w()).norm()
    }

    #[test]
    fn quadric_residual_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e1 = RealVec::basis(4, 0);
        let e2 = RealVec::basis(4, 1);
        let p = StiefelPoint::from_orthonormal_pair(&e1, &e2).unwrap();
        assert!(quadric_residual(&p) < 1e-15);
        let bad = StiefelPoint::new_unchecked(e1.scaled(s), e1.scaled(s));
        assert!((quadric_residual(&bad) - 1.0).abs() < 1e-15);
        assert!(StiefelPoint::new(e1.scaled(s), e1.scaled(s)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            assert!(quadric_residual(&random_point(&mut rng, n)) < 1e-12);
        }
    }

    #[test]
    fn horizontal_frame_is_orthonormal_and_horizontal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_point(&mut rng, 4);
        let f = p.horizontal_frame().unwrap();
        assert_eq!(f.len(), 8);
        for (a, x) in f.iter().enumerate() {
            assert!(p.horizontality_defect(x.w()) < 1e-14);
            for (b, y) in f.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((metric(x, y).unwrap() - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn a0_is_an_involutive_symmetric_anti_j_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..6 {
            let p = random_point(&mut rng, n);
            let x = random_horizontal(&mut rng, &p);
            let y = random_horizontal(&mut rng, &p);
            assert!(dist(&apply_a0(&apply_a0(&x)), &x) < 1e-12);
            let sym = metric(&apply_a0(&x), &y).unwrap() - metric(&x, &apply_a0(&y)).unwrap();
            assert!(sym.abs() < 1e-12);
            let anti = apply_a0(&apply_j(&x)).add_scaled(1.0, &apply_j(&apply_a0(&x))).unwrap();
            assert!(anti.norm() < 1e-12);
            assert!(p.horizontality_defect(apply_a0(&x).w()) < 1e-12);
        }
    }

    #[test]
    fn rotated_structure_special_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_point(&mut rng, 3);
        let x = random_horizontal(&mut rng, &p);
        let r0 = rotate_structure(ProductStructureGauge::new(0.0), &x);
        assert!(dist(&r0, &apply_a0(&x)) < 1e-15);
        let rpi = rotate_structure(ProductStructureGauge::new(std::f64::consts::PI), &x);
        assert!(dist(&rpi, &apply_a0(&x).scaled(-1.0)) < 1e-14);
        let g = ProductStructureGauge::new(0.9);
        assert!(dist(&rotate_structure(g, &rotate_structure(g, &x)), &x) < 1e-12);
    }

    #[test]
    fn rotation_shifts_angles_by_half_the_gauge() {
        // E_j = e^{i psi_j} f_j spans a Lagrangian plane with A_0 angles
        // psi_j + pi/2.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_point(&mut rng, 3);
        let f = p.horizontal_frame().unwrap();
        let psi = [0.2, 0.9, 2.1];
        let frame: Vec<HorizontalVector> = psi
            .iter()
            .enumerate()
            .map(|(j, &s)| HorizontalVector::new(p.clone(), f[j].w().scaled(Complex::cis(s))).unwrap())
            .collect();
        for phi in [0.0, 0.7, -1.3] {
            let (b, c) = structure_blocks(ProductStructureGauge::new(phi), &frame).unwrap();
            for j in 0..3 {
                let theta = c[(j, j)].atan2(b[(j, j)]) / 2.0;
                let want = psi[j] + std::f64::consts::FRAC_PI_2 - phi / 2.0;
                let diff = 2.0 * (theta - want);
                assert!(diff.sin().abs() < 1e-12 && diff.cos() > 0.0, "phi={phi} j={j}");
                for k in 0..3 {
                    if k != j {
                        assert!(b[(j, k)].abs() < 1e-12 && c[(j, k)].abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_is_antisymmetric_and_satisfies_bianchi() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = ProductStructureGauge::new(0.4);
        let p = random_point(&mut rng, 4);
        let x = random_horizontal(&mut rng, &p);
        let y = random_horizontal(&mut rng, &p);
        let z = random_horizontal(&mut rng, &p);
        let w = random_horizontal(&mut rng, &p);
        assert!(quadric_curvature(g, &x, &x, &z).unwrap().norm() < 1e-13);
        let r1 = quadric_curvature(g, &x, &y, &z).unwrap();
        let r2 = quadric_curvature(g, &y, &z, &x).unwrap();
        let r3 = quadric_curvature(g, &z, &x, &y).unwrap();
        let sum = r1.add_scaled(1.0, &r2).unwrap().add_scaled(1.0, &r3).unwrap();
        assert!(sum.norm() < 1e-9);
        let lhs = metric(&r1, &w).unwrap();
        let rhs = metric(&quadric_curvature(g, &z, &w, &x).unwrap(), &y).unwrap();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn curvature_does_not_depend_on_the_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_point(&mut rng, 3);
        let x = random_horizontal(&mut rng, &p);
        let y = random_horizontal(&mut rng, &p);
        let z = random_horizontal(&mut rng, &p);
        let a = quadric_curvature(ProductStructureGauge::new(0.0), &x, &y, &z).unwrap();
        let b = quadric_curvature(ProductStructureGauge::new(0.7), &x, &y, &z).unwrap();
        assert!(dist(&a, &b) < 1e-10);
    }

    #[test]
    fn einstein_constant_is_2n() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=5 {
            let p = random_point(&mut rng, n);
            let ric = ricci_matrix(ProductStructureGauge::new(0.3), &p).unwrap();
            let want = Matrix::identity(2 * n);
            let err = ric.sub(&Matrix::from_fn(2 * n, 2 * n, |a, b| 2.0 * n as f64 * want[(a, b)]));
            assert!(err.max_abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn holomorphic_sectional_curvature_lies_in_two_to_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = ProductStructureGauge::CANONICAL;
        let p = random_point(&mut rng, 3);
        for _ in 0..20 {
            let x = random_horizontal(&mut rng, &p);
            let x = x.scaled(1.0 / x.norm());
            let jx = apply_j(&x);
            let k = metric(&quadric_curvature(g, &x, &jx, &jx).unwrap(), &x).unwrap();
            assert!((2.0 - 1e-12..=4.0 + 1e-12).contains(&k), "{k}");
        }
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_point(&mut rng, 3);
        let q = random_point(&mut rng, 3);
        let x = random_horizontal(&mut rng, &p);
        let y = random_horizontal(&mut rng, &q);
        assert!(matches!(
            quadric_curvature(ProductStructureGauge::CANONICAL, &x, &y, &x),
            Err(Error::BaseMismatch)
        ));
    }

    #[test]
    fn distance_ignores_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_point(&mut rng, 3);
        let rotated = StiefelPoint::from_lift(&p.z().scaled(Complex::cis(1.1))).unwrap();
        assert!(p.distance(&rotated) < 1e-7);
        let q = random_point(&mut rng, 3);
        assert!(p.distance(&q) > 1e-3);
    }
}
