//! Dense complex matrix substrate.
//!
//! Everything downstream (Choi matrices, peel-off, splitting, states) is built on
//! [`ComplexMatrix`], a finite-entry wrapper around `nalgebra::DMatrix<Complex64>`,
//! and on the Hermitian tools here: spectral decomposition, PSD checks with an
//! eigenvalue certificate, the Moore-Penrose pseudoinverse, Schur complements,
//! range inclusion, Kronecker products and the partial transpose.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Singular values at or below `rank_tol * sigma_max` are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Relative PSD tolerance: `lambda_min >= -tol * max(1, ||H||)`.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Relative asymmetry above which a matrix is rejected as non-Hermitian.
pub const ASYMMETRY_TOL: f64 = 1e-6;

const EIG_MAX_ITERS: usize = 10_000;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Matrix unit `E_ij` of shape `rows x cols`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.0[(i, j)] = real(1.0);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::default() })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { real(diag[i]) } else { C64::default() })
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_iterator(rows, cols, entries))
    }

    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, entries.iter().map(|&x| real(x)).collect())
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Column vector from a slice.
    pub fn column(entries: &[C64]) -> Self {
        Self(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Entrywise map.
    pub fn map(&self, f: impl FnMut(C64) -> C64) -> Self {
        Self(self.0.map(f))
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }

    /// Rectangular sub-matrix starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    /// Square `size x size` block at block coordinates `(bi, bj)`.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        self.submatrix(bi * size, bj * size, size, size)
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, src: &ComplexMatrix) {
        self.0
            .view_mut((r0, c0), (src.rows(), src.cols()))
            .copy_from(&src.0);
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, src: &ComplexMatrix) {
        let size = src.rows();
        self.set_submatrix(bi * size, bj * size, src);
    }

    /// Frobenius norm of `self - self^*`.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] - self.0[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Sum over all entries of `self[r, c] * other[r, c]` (no conjugation).
    pub fn entrywise_dot(&self, other: &ComplexMatrix) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Entries as a flat row-major vector.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, " ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if z.im == 0.0 {
                    write!(f, " {:>10.4}", z.re)?;
                } else {
                    write!(f, " {:>10.4}{:+.4}i", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// A Hermitian matrix. The stored data is exactly Hermitian; the asymmetry of
/// the input it was built from is kept as a diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    data: ComplexMatrix,
    asymmetry: f64,
}

impl HermitianMatrix {
    /// Strict constructor: symmetrizes, but rejects inputs whose relative
    /// asymmetry exceeds [`ASYMMETRY_TOL`].
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let h = hermitize(m)?;
        if h.asymmetry > ASYMMETRY_TOL * m.norm().max(1.0) {
            return Err(Error::NotHermitian {
                asymmetry: h.asymmetry / m.norm().max(1.0),
            });
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.data
    }

    /// `||M - M^*||_F` of the matrix this was built from.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }
}

/// Returns `(M + M^*) / 2`, recording `||M - M^*||` as a diagnostic.
pub fn hermitize(m: &ComplexMatrix) -> Result<HermitianMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.asymmetry();
    let n = m.rows();
    let data = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            real(m[(i, i)].re)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    Ok(HermitianMatrix { data, asymmetry })
}

/// Spectral decomposition with ascending eigenvalues; eigenvectors are the columns.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue (the spectral norm).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, l| a.max(l.abs()))
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        let v = &self.eigenvectors;
        (0..v.rows()).map(|r| v[(r, i)]).collect()
    }

    /// `V diag(f(lambda)) V^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let s = f(l);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * &v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Rotates `v` so that its first non-negligible entry is real and positive.
fn normalize_phase(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Full spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector is phase-normalized (first
/// nonzero entry real positive) and eigenvalues that agree to within
/// `1e-12 * max(1, ||H||)` are ordered lexicographically by eigenvector entries.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenResult> {
    let n = h.dim();
    if n == 0 {
        return Ok(EigenResult {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(h.matrix().as_dmatrix().clone(), f64::EPSILON, EIG_MAX_ITERS)
        .ok_or(Error::EigenFailed)?;
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|j| {
            let mut v: Vec<C64> = eig.eigenvectors.column(j).iter().copied().collect();
            normalize_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    if pairs.iter().any(|(l, _)| !l.is_finite()) {
        return Err(Error::EigenFailed);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = pairs.iter().fold(1.0_f64, |a, (l, _)| a.max(l.abs()));
    let band = 1e-12 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= band {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|(l, _)| *l).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Outcome of a PSD test: the flag and the smallest eigenvalue as certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// `lambda_min >= -tol * max(1, ||H||)`, with `||H||` the spectral norm.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<PsdCheck> {
    let eig = eig_hermitian(h)?;
    let min = eig.min();
    Ok(PsdCheck {
        is_psd: min >= -tol * eig.spectral_norm().max(1.0),
        min_eigenvalue: min,
    })
}

/// Smallest eigenvalue of a matrix that is Hermitian up to rounding.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(&hermitize(m)?)?.min())
}

/// Thin singular value decomposition `A = U diag(s) V^*` with `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: ComplexMatrix,
}

fn to_faer(a: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let (r, c) = (a.rows(), a.cols());
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(r, 0),
            singular_values: Vec::new(),
            v_adjoint: ComplexMatrix::zeros(0, c),
        };
    }
    let dec = to_faer(a).thin_svd().expect("finite entries");
    let (u, s, v) = (dec.U(), dec.S().column_vector(), dec.V());
    Svd {
        u: ComplexMatrix::from_fn(r, k, |i, j| u[(i, j)]),
        singular_values: (0..k).map(|j| s[j].re).collect(),
        v_adjoint: ComplexMatrix::from_fn(k, c, |i, j| v[(j, i)].conj()),
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows().min(a.cols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_faer(a)
        .singular_values()
        .expect("finite entries");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
        _ => 0,
    }
}

/// Moore-Penrose pseudoinverse through the SVD; singular values
/// `<= rank_tol * sigma_max` are dropped.
pub fn pinv(a: &ComplexMatrix, rank_tol: f64) -> ComplexMatrix {
    let d = svd(a);
    let mut out = ComplexMatrix::zeros(a.cols(), a.rows());
    let Some(&smax) = d.singular_values.first() else {
        return out;
    };
    if smax == 0.0 {
        return out;
    }
    let cut = rank_tol * smax;
    let v = d.v_adjoint.adjoint();
    let uh = d.u.adjoint();
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s <= cut {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..out.rows() {
            let vik = v[(i, k)] * inv;
            for j in 0..out.cols() {
                out[(i, j)] += vik * uh[(k, j)];
            }
        }
    }
    out
}

/// Which diagonal block of `[[A, B], [B^*, C]]` is inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    /// `M/A = C - B^* A^+ B`
    UpperLeft,
    /// `M/C = A - B C^+ B^*`
    LowerRight,
}

/// Generalized Schur complement of `M = [[A, B], [B^*, C]]` partitioned at `split`.
pub fn schur_complement(m: &HermitianMatrix, split: usize, corner: Corner) -> Result<ComplexMatrix> {
    let dim = m.dim();
    if split == 0 || split >= dim {
        return Err(Error::SplitOutOfRange { split, dim });
    }
    let mat = m.matrix();
    let rest = dim - split;
    let a = mat.submatrix(0, 0, split, split);
    let b = mat.submatrix(0, split, split, rest);
    let c = mat.submatrix(split, split, rest, rest);
    Ok(match corner {
        Corner::UpperLeft => &c - &(&(&b.adjoint() * &pinv(&a, DEFAULT_RANK_TOL)) * &b),
        Corner::LowerRight => &a - &(&(&b * &pinv(&c, DEFAULT_RANK_TOL)) * &b.adjoint()),
    })
}

/// `range(B) ⊆ range(A)`, decided by `||(I - A A^+) B|| <= tol * max(1, ||B||)`.
pub fn range_included(b: &ComplexMatrix, a: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "range inclusion needs equal row counts, got {} and {}",
            b.rows(),
            a.rows()
        )));
    }
    let projected = &(a * &pinv(a, DEFAULT_RANK_TOL)) * b;
    Ok((b - &projected).norm() <= tol * b.norm().max(1.0))
}

/// Partial transpose on the first tensor factor: block `(i, j)` of the result
/// is block `(j, i)` of `t`, blocks being `n x n`.
pub fn partial_transpose(t: &ComplexMatrix, m: usize, n: usize) -> Result<ComplexMatrix> {
    if t.rows() != m * n || t.cols() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose over ({m}, {n}) needs a {0}x{0} matrix, got {1}x{2}",
            m * n,
            t.rows(),
            t.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        t[(j * n + k, i * n + l)]
    }))
}

/// Kronecker product; block `(i, j)` of the result is `a_ij * B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}
