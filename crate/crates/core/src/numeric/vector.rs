//! Real and complex vectors. Complex numbers are plain `(re, im)` pairs.

use std::ops::{Add, Deref, DerefMut, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    /// `e^{i phi}`
    pub fn cis(phi: f64) -> Self {
        Complex::new(phi.cos(), phi.sin())
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, s: f64) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealVec(pub Vec<f64>);

impl RealVec {
    pub fn zeros(len: usize) -> Self {
        RealVec(vec![0.0; len])
    }

    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = 1.0;
        v
    }

    pub fn dot(&self, other: &RealVec) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> RealVec {
        RealVec(self.iter().map(|x| x * s).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &RealVec) {
        for (a, b) in self.0.iter_mut().zip(other.iter()) {
            *a += s * b;
        }
    }

    pub fn add(&self, other: &RealVec) -> RealVec {
        RealVec(self.iter().zip(other.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RealVec) -> RealVec {
        RealVec(self.iter().zip(other.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Deref for RealVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for RealVec {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for RealVec {
    fn from(v: Vec<f64>) -> Self {
        RealVec(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CplxVec(pub Vec<Complex>);

impl CplxVec {
    pub fn zeros(len: usize) -> Self {
        CplxVec(vec![Complex::ZERO; len])
    }

    /// `re + i im`
    pub fn from_parts(re: &[f64], im: &[f64]) -> Self {
        debug_assert_eq!(re.len(), im.len());
        CplxVec(re.iter().zip(im.iter()).map(|(&a, &b)| Complex::new(a, b)).collect())
    }

    pub fn real_part(&self) -> RealVec {
        RealVec(self.iter().map(|z| z.re).collect())
    }

    pub fn imag_part(&self) -> RealVec {
        RealVec(self.iter().map(|z| z.im).collect())
    }

    /// Hermitian product `sum a_k conj(b_k)`.
    pub fn herm(&self, other: &CplxVec) -> Complex {
        debug_assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .fold(Complex::ZERO, |acc, (&a, &b)| acc + a * b.conj())
    }

    /// Real inner product `Re <a, b>`; this is the metric on lifts.
    pub fn dot_re(&self, other: &CplxVec) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Bilinear sum `sum a_k b_k` (no conjugation).
    pub fn bilinear(&self, other: &CplxVec) -> Complex {
        self.iter()
            .zip(other.iter())
            .fold(Complex::ZERO, |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> f64 {
        self.dot_re(self).sqrt()
    }

    pub fn conj(&self) -> CplxVec {
        CplxVec(self.iter().map(|z| z.conj()).collect())
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> CplxVec {
        CplxVec(self.iter().map(|z| Complex::new(-z.im, z.re)).collect())
    }

    pub fn scaled(&self, s: Complex) -> CplxVec {
        CplxVec(self.iter().map(|&z| z * s).collect())
    }

    pub fn scaled_re(&self, s: f64) -> CplxVec {
        CplxVec(self.iter().map(|&z| z.scale(s)).collect())
    }

    pub fn add(&self, other: &CplxVec) -> CplxVec {
        CplxVec(self.iter().zip(other.iter()).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, other: &CplxVec) -> CplxVec {
        CplxVec(self.iter().zip(other.iter()).map(|(&a, &b)| a - b).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Complex, other: &CplxVec) {
        for (a, &b) in self.0.iter_mut().zip(other.iter()) {
            *a = *a + s * b;
        }
    }

    pub fn axpy_re(&mut self, s: f64, other: &CplxVec) {
        for (a, &b) in self.0.iter_mut().zip(other.iter()) {
            a.re += s * b.re;
            a.im += s * b.im;
        }
    }

    /// Real coordinates `(re_0.., im_0..)`; the Euclidean dot of two such
    /// vectors equals `dot_re`.
    pub fn to_real(&self) -> RealVec {
        let mut out = Vec::with_capacity(2 * self.len());
        out.extend(self.iter().map(|z| z.re));
        out.extend(self.iter().map(|z| z.im));
        RealVec(out)
    }

    pub fn from_real(v: &RealVec) -> CplxVec {
        let m = v.len() / 2;
        CplxVec::from_parts(&v[..m], &v[m..])
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Deref for CplxVec {
    type Target = [Complex];
    fn deref(&self) -> &[Complex] {
        &self.0
    }
}

impl DerefMut for CplxVec {
    fn deref_mut(&mut self) -> &mut [Complex] {
        &mut self.0
    }
}

/// Values that can be combined linearly, so they can be finite-differenced.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    /// `self += s * other`
    fn add_scaled(&mut self, s: f64, other: &Self);
    fn all_finite(&self) -> bool;
    fn magnitude(&self) -> f64;
}

impl Linear for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, s: f64, other: &Self) {
        *self += s * other;
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Linear for RealVec {
    fn zero_like(&self) -> Self {
        RealVec::zeros(self.len())
    }
    fn add_scaled(&mut self, s: f64, other: &Self) {
        self.axpy(s, other);
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Linear for CplxVec {
    fn zero_like(&self) -> Self {
        CplxVec::zeros(self.len())
    }
    fn add_scaled(&mut self, s: f64, other: &Self) {
        self.axpy_re(s, other);
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
