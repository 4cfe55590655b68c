//! Small dense real matrices, cyclic Jacobi eigendecomposition and
//! Gram-Schmidt orthonormalization.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::vector::RealVec;
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RealVec {
        RealVec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> RealVec {
        assert_eq!(self.cols, v.len());
        RealVec(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Symmetric matrix. Construction either checks symmetry tightly
/// ([`SymMatrix::new`]) or symmetrizes and reports the defect
/// ([`SymMatrix::symmetrize`]).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidParameter(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.asymmetry();
        if defect >= Self::SYMMETRY_TOL * (1.0 + m.max_abs()) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not symmetric (defect {defect:.3e})"
            )));
        }
        Ok(Self::symmetrize(m).0)
    }

    /// Returns `(m + m^T)/2` together with the asymmetry defect of `m`.
    pub fn symmetrize(m: Matrix) -> (Self, f64) {
        assert_eq!(m.rows(), m.cols());
        let defect = m.asymmetry();
        let n = m.rows();
        let s = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        (SymMatrix(s), defect)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(values: &[f64]) -> Self {
        SymMatrix(Matrix::diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> RealVec {
        self.vectors.column(k)
    }

    /// `V diag(values) V^T`
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.vectors;
        v.matmul(&Matrix::diag(&self.values)).matmul(&v.transpose())
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn symmetric_eigen(m: &SymMatrix) -> Result<Eigen> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut v = Matrix::identity(n);
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite entries in {a:?}")));
    }
    let scale = a.frobenius();
    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Rotation angle annihilating a_pq.
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&a) <= 1e-15 * scale;
    }
    if !converged {
        return Err(Error::NotConverged {
            what: format!("{:?}", m.matrix()),
            sweeps,
            off_norm: off(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// Smallest Gram eigenvalue accepted by [`gram_schmidt`].
pub const GRAM_RANK_TOL: f64 = 1e-10;

/// Orthonormalizes `vectors` and also returns the coefficient matrix `K`
/// with `out[a] = sum_j K[(a, j)] * vectors[j]` (lower triangular).
pub fn gram_schmidt_with_coeffs(vectors: &[RealVec]) -> Result<(Vec<RealVec>, Matrix)> {
    let m = vectors.len();
    let gram = Matrix::from_fn(m, m, |i, j| vectors[i].dot(&vectors[j]));
    let spectrum = symmetric_eigen(&SymMatrix::symmetrize(gram).0)?.values;
    if spectrum.first().is_some_and(|&s| s <= GRAM_RANK_TOL) {
        return Err(Error::RankDeficient {
            gram_spectrum: spectrum,
        });
    }

    let mut out: Vec<RealVec> = Vec::with_capacity(m);
    let mut coeffs = Matrix::zeros(m, m);
    for (a, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        let mut k = RealVec::basis(m, a);
        // Two passes keep the result orthogonal to rounding level.
        for _ in 0..2 {
            for (b, e) in out.iter().enumerate() {
                let proj = w.dot(e);
                w.axpy(-proj, e);
                for j in 0..m {
                    k[j] -= proj * coeffs[(b, j)];
                }
            }
        }
        let norm = w.norm();
        for j in 0..m {
            coeffs[(a, j)] = k[j] / norm;
        }
        out.push(w.scaled(1.0 / norm));
    }
    Ok((out, coeffs))
}

pub fn gram_schmidt(vectors: &[RealVec]) -> Result<Vec<RealVec>> {
    gram_schmidt_with_coeffs(vectors).map(|(q, _)| q)
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in
/// `R^dim`, completed from the standard basis.
pub fn orthogonal_complement(vectors: &[RealVec], dim: usize) -> Result<Vec<RealVec>> {
    let mut basis = gram_schmidt(vectors)?;
    let start = basis.len();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = RealVec::basis(dim, k);
        for _ in 0..2 {
            for e in &basis {
                let proj = w.dot(e);
                w.axpy(-proj, e);
            }
        }
        let norm = w.norm();
        // A standard basis vector always keeps at least 1/sqrt(dim) here
        // for some k; smaller residues are skipped to avoid cancellation.
        if norm > 0.5 / (dim as f64).sqrt() {
            basis.push(w.scaled(1.0 / norm));
        }
    }
    if basis.len() != dim {
        return Err(Error::Diagnostic(format!(
            "could not complete a basis of R^{dim} from {start} vectors"
        )));
    }
    Ok(basis.split_off(start))
}
