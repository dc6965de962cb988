//! Small dense matrices on the symmetric-matrix space.
//!
//! [`SymmetricMatrix`] stores only the upper triangle, so symmetry holds by
//! construction. [`SpdMatrix`] is a symmetric matrix certified positive
//! definite, and [`StiefelFrame`] an `n x m` matrix with orthonormal columns.
//! General rectangular matrices are plain `nalgebra::DMatrix<f64>` ([`Mat`]).
//!
//! The eigensolver is a cyclic Jacobi iteration; it is meant for the desk-scale
//! dimensions used throughout the crate (ℓ ≤ 8).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Off-diagonal Frobenius norm (relative) at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative pivot tolerance for the Cholesky-based definiteness test.
pub const PIVOT_TOL: f64 = 1e-12;

/// Eigenvalue slack for membership in the closed cone.
pub const PSD_SLACK: f64 = 1e-10;

/// Tolerance on `‖v'v − I‖_max` for a valid frame.
pub const FRAME_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl SymmetricMatrix {
    /// Builds a matrix from its upper triangle in row-major order.
    pub fn new(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dim("symmetric matrix needs dim >= 1".into()));
        }
        if upper.len() != packed_len(dim) {
            return Err(Error::DimMismatch {
                expected: packed_len(dim),
                found: upper.len(),
            });
        }
        Ok(Self { dim, upper })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "symmetric matrix needs dim >= 1");
        Self {
            dim,
            upper: vec![0.0; packed_len(dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.set(i, i, c);
        }
        out
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut out = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            out.set(i, i, v);
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(packed_len(dim));
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        Self { dim, upper }
    }

    /// Symmetric part `(a + a')/2` of a square dense matrix.
    pub fn from_dense(a: &Mat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        Ok(Self::from_fn(a.nrows(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)])))
    }

    /// `x'x` for a rectangular `x`.
    pub fn gram(x: &Mat) -> Self {
        let cols = x.ncols();
        Self::from_fn(cols, |i, j| x.column(i).dot(&x.column(j)))
    }

    /// `x x'` for a rectangular `x`.
    pub fn outer_gram(x: &Mat) -> Self {
        let rows = x.nrows();
        Self::from_fn(rows, |i, j| x.row(i).dot(&x.row(j)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.packed_index(i, j);
        self.upper[k] = v;
    }

    #[inline]
    fn packed_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows 0..i hold dim + (dim-1) + ... + (dim-i+1) entries
        i * (2 * self.dim + 1 - i) / 2 + (j - i)
    }

    pub fn to_dense(&self) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm counting both copies of each off-diagonal entry.
    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.get(i, j);
                acc += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        acc.sqrt()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// Panics on dimension mismatch; use [`Self::try_add`] for checked input.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("dimension mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("dimension mismatch")
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(|v| v * c).collect(),
        }
    }

    /// `I − self`.
    pub fn complement(&self) -> Self {
        Self::identity(self.dim).sub(self)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `b a b'` for a square `b`, re-symmetrized.
    pub fn congruence(&self, b: &Mat) -> Self {
        let prod = b * self.to_dense() * b.transpose();
        Self::from_dense(&prod).expect("square product")
    }

    pub fn det(&self) -> f64 {
        det_dense(&self.to_dense())
    }

    /// Lower Cholesky factor, or `None` if some pivot falls below
    /// `PIVOT_TOL · ‖a‖_max`.
    pub fn cholesky(&self) -> Option<Mat> {
        let n = self.dim;
        let tol = PIVOT_TOL * self.max_abs();
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > tol) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }

    /// Determinant when the matrix is positive definite, by an in-place
    /// Cholesky sweep; `None` otherwise. Avoids heap traffic for dim <= 8.
    pub fn pd_det(&self) -> Option<f64> {
        let n = self.dim;
        if n > 8 {
            return self.cholesky().map(|l| (0..n).map(|i| l[(i, i)] * l[(i, i)]).product());
        }
        let tol = PIVOT_TOL * self.max_abs();
        let mut l = [0.0f64; 64];
        let mut det = 1.0;
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * 8 + k] * l[j * 8 + k];
            }
            if !(d > tol) {
                return None;
            }
            det *= d;
            let djj = d.sqrt();
            l[j * 8 + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * 8 + k] * l[j * 8 + k];
                }
                l[i * 8 + j] = s / djj;
            }
        }
        Some(det)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_some()
    }

    /// Membership in the closed cone, with eigenvalue slack [`PSD_SLACK`].
    pub fn is_positive_semidefinite(&self) -> bool {
        self.min_eigenvalue() >= -PSD_SLACK
    }

    /// Eigenvalues (ascending) and the matching orthonormal eigenvectors as
    /// columns.
    pub fn eigen(&self) -> (Vec<f64>, Mat) {
        jacobi_eigen(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("dim >= 1")
    }

    /// `q diag(g(λ)) q'` through the eigendecomposition.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.eigen();
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            (0..n)
                .map(|k| vecs[(i, k)] * g(vals[k]) * vecs[(j, k)])
                .sum()
        })
    }

    /// Projects the spectrum into `[lo, hi]`.
    pub fn clamp_spectrum(&self, lo: f64, hi: f64) -> Self {
        self.map_spectrum(|l| l.clamp(lo, hi))
    }
}

/// Determinant by LU with partial pivoting.
pub fn det_dense(a: &Mat) -> f64 {
    let n = a.nrows();
    match n {
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        3 => {
            a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
        }
        _ => a.clone().lu().determinant(),
    }
}

fn jacobi_eigen(a: &SymmetricMatrix) -> (Vec<f64>, Mat) {
    let n = a.dim();
    let mut m = a.to_dense();
    let mut v = Mat::identity(n, n);
    if n > 1 {
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * m[(p, q)] * m[(p, q)];
                }
            }
            if off.sqrt() <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// A symmetric matrix certified positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix(SymmetricMatrix);

impl SpdMatrix {
    /// Wraps a matrix the caller has already shown to be positive definite.
    pub(crate) fn new_unchecked(a: SymmetricMatrix) -> Self {
        Self(a)
    }

    pub fn new(a: SymmetricMatrix) -> Result<Self> {
        if a.is_positive_definite() {
            Ok(Self(a))
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self(SymmetricMatrix::identity(dim))
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Result<Self> {
        Self::new(SymmetricMatrix::scaled_identity(dim, c))
    }

    pub fn as_sym(&self) -> &SymmetricMatrix {
        &self.0
    }

    pub fn into_sym(self) -> SymmetricMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }

    pub fn sqrt(&self) -> SpdMatrix {
        sqrt_spd(self)
    }

    pub fn inv_sqrt(&self) -> SpdMatrix {
        SpdMatrix(self.0.map_spectrum(|l| 1.0 / l.sqrt()))
    }

    pub fn inverse(&self) -> SpdMatrix {
        SpdMatrix(self.0.map_spectrum(|l| 1.0 / l))
    }

    /// True when `0 < self < I`.
    pub fn in_unit_interval(&self) -> bool {
        self.0.complement().is_positive_definite()
    }
}

impl std::ops::Deref for SpdMatrix {
    type Target = SymmetricMatrix;
    fn deref(&self) -> &SymmetricMatrix {
        &self.0
    }
}

/// Symmetric positive definite square root via the eigendecomposition.
pub fn sqrt_spd(a: &SpdMatrix) -> SpdMatrix {
    SpdMatrix(a.0.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Checked square root for a matrix not yet known to be positive definite.
pub fn try_sqrt(a: &SymmetricMatrix) -> Result<SpdMatrix> {
    let (vals, _) = a.eigen();
    if vals[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(SpdMatrix(a.map_spectrum(f64::sqrt)))
}

/// Strict Loewner order: `a < b` iff `b − a` is positive definite.
pub fn loewner_lt(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<bool> {
    Ok(b.try_sub(a)?.is_positive_definite())
}

pub fn det(a: &SymmetricMatrix) -> f64 {
    a.det()
}

/// An `n x m` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelFrame(Mat);

impl StiefelFrame {
    pub fn new(v: Mat) -> Result<Self> {
        if v.ncols() == 0 || v.ncols() > v.nrows() {
            return Err(Error::Dim(format!(
                "frame must satisfy 1 <= m <= n, got {}x{}",
                v.nrows(),
                v.ncols()
            )));
        }
        let residual = gram_residual(&v);
        if residual > FRAME_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self(v))
    }

    /// Orthonormalizes the columns of `x` by QR with a positive `R` diagonal.
    pub fn orthonormalize(x: &Mat) -> Result<Self> {
        let m = x.ncols();
        if m == 0 || m > x.nrows() {
            return Err(Error::Dim(format!(
                "frame must satisfy 1 <= m <= n, got {}x{}",
                x.nrows(),
                m
            )));
        }
        let qr = x.clone().qr();
        let r = qr.r();
        let mut q = qr.q();
        let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
        for j in 0..m {
            let d = r[(j, j)];
            if d.abs() <= 1e-12 * scale {
                return Err(Error::RankDeficient);
            }
            if d < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        Ok(Self(q))
    }

    /// The canonical bottom-block frame `[0; I_m]`.
    pub fn bottom_block(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Dim(format!("need 1 <= m <= n, got n={n}, m={m}")));
        }
        Ok(Self(Mat::from_fn(n, m, |i, j| {
            if i >= n - m && i - (n - m) == j {
                1.0
            } else {
                0.0
            }
        })))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn m(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    /// The last `rows` rows, i.e. `σ' v` for the bottom-block frame `σ`.
    pub fn bottom_rows(&self, rows: usize) -> Mat {
        let n = self.n();
        self.0.rows(n - rows, rows).into_owned()
    }

    pub fn gram_residual(&self) -> f64 {
        gram_residual(&self.0)
    }

    /// Right multiplication by an orthogonal matrix, which preserves the
    /// frame property.
    pub fn rotate_right(&self, rho: &Mat) -> Result<Self> {
        Self::new(&self.0 * rho)
    }

    pub fn rotate_left(&self, g: &Mat) -> Result<Self> {
        Self::new(g * &self.0)
    }
}

/// `‖x'x − I‖_max`.
pub fn gram_residual(x: &Mat) -> f64 {
    let g = x.transpose() * x;
    let mut worst = 0.0_f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
