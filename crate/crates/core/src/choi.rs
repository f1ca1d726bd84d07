//! Choi matrices of linear maps `M_m -> M_n`, map application, the bilinear
//! pairing between block matrices and maps, and trivial lifting.
//!
//! Blocks are row-major: block `(i, j)` of a Choi matrix occupies rows
//! `i*n..(i+1)*n` and columns `j*n..(j+1)*n` and equals `phi(E_ij)`.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitize, partial_transpose, ComplexMatrix, HermitianMatrix, ASYMMETRY_TOL, C64,
};

/// Default relative tolerance for detecting zero block rows in [`unlift`].
pub const DEFAULT_UNLIFT_TOL: f64 = 1e-8;

/// Choi matrix `C_phi = sum_ij E_ij ⊗ phi(E_ij)` of a map `M_m -> M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    m: usize,
    n: usize,
    data: ComplexMatrix,
    hermitian: bool,
}

impl ChoiMatrix {
    /// Wraps an `mn x mn` matrix. Inputs within the asymmetry tolerance are
    /// symmetrized exactly and flagged Hermitian; anything else is kept as is.
    pub fn new(m: usize, n: usize, data: ComplexMatrix) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix needs positive block dimensions, got ({m}, {n})"
            )));
        }
        if data.rows() != m * n || data.cols() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of a map M_{m} -> M_{n} must be {0}x{0}, got {1}x{2}",
                m * n,
                data.rows(),
                data.cols()
            )));
        }
        let asym = data.asymmetry();
        if asym == 0.0 {
            return Ok(Self { m, n, data, hermitian: true });
        }
        if asym <= ASYMMETRY_TOL * data.norm().max(1.0) {
            let data = hermitize(&data)?.into_matrix();
            return Ok(Self { m, n, data, hermitian: true });
        }
        Ok(Self { m, n, data, hermitian: false })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            data: ComplexMatrix::zeros(m * n, m * n),
            hermitian: true,
        }
    }

    /// Input dimension (number of blocks per side).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Output dimension (block size).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.data
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn require_hermitian(&self) -> Result<HermitianMatrix> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                asymmetry: self.data.asymmetry() / self.data.norm().max(1.0),
            });
        }
        HermitianMatrix::new(&self.data)
    }

    /// `A_ij = phi(E_ij)`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.data.block(i, j, self.n)
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Choi matrix of the map composed with the transpose on the input side.
    pub fn partial_transpose(&self) -> ChoiMatrix {
        let data = partial_transpose(&self.data, self.m, self.n).expect("dimensions checked");
        ChoiMatrix {
            m: self.m,
            n: self.n,
            data,
            hermitian: self.hermitian,
        }
    }

    pub fn add(&self, other: &ChoiMatrix) -> Result<ChoiMatrix> {
        self.check_same_shape(other)?;
        ChoiMatrix::new(self.m, self.n, &self.data + &other.data)
    }

    pub fn sub(&self, other: &ChoiMatrix) -> Result<ChoiMatrix> {
        self.check_same_shape(other)?;
        ChoiMatrix::new(self.m, self.n, &self.data - &other.data)
    }

    pub fn scale(&self, s: f64) -> ChoiMatrix {
        ChoiMatrix {
            m: self.m,
            n: self.n,
            data: self.data.scale(s),
            hermitian: self.hermitian,
        }
    }

    fn check_same_shape(&self, other: &ChoiMatrix) -> Result<()> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi shapes ({}, {}) and ({}, {})",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    /// Removes block row and column `p`.
    pub fn remove_block(&self, p: usize) -> Result<ChoiMatrix> {
        if p >= self.m || self.m == 1 {
            return Err(Error::IndexOutOfRange { index: p, limit: self.m });
        }
        let keep: Vec<usize> = (0..self.m).filter(|&q| q != p).collect();
        Ok(self.select_blocks(&keep))
    }

    fn select_blocks(&self, keep: &[usize]) -> ChoiMatrix {
        let n = self.n;
        let mut data = ComplexMatrix::zeros(keep.len() * n, keep.len() * n);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                data.set_block(a, b, &self.block(i, j));
            }
        }
        ChoiMatrix {
            m: keep.len(),
            n,
            data,
            hermitian: self.hermitian,
        }
    }
}

/// Builds the Choi matrix by evaluating `apply` on every matrix unit `E_ij`.
pub fn choi_of_map<F>(apply: F, m: usize, n: usize) -> Result<ChoiMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut data = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            let out = apply(&ComplexMatrix::unit(m, m, i, j));
            if out.rows() != n || out.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "map returned {}x{} on E_{}{}, expected {n}x{n}",
                    out.rows(),
                    out.cols(),
                    i + 1,
                    j + 1
                )));
            }
            data.set_block(i, j, &out);
        }
    }
    ChoiMatrix::new(m, n, data)
}

/// `phi(X) = sum_ij x_ij A_ij`.
pub fn apply_map(c: &ChoiMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != c.m || x.cols() != c.m {
        return Err(Error::DimensionMismatch(format!(
            "map on M_{} applied to a {}x{} matrix",
            c.m,
            x.rows(),
            x.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(c.n, c.n);
    for i in 0..c.m {
        for j in 0..c.m {
            let xij = x[(i, j)];
            if xij != C64::default() {
                out = out + c.block(i, j).scale_c(xij);
            }
        }
    }
    Ok(out)
}

/// Value of the bilinear pairing `<A, phi> = sum_ij Tr(phi(E_ij) A_ij^t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    pub value: f64,
    /// Imaginary part, zero up to rounding for Hermitian `A` and
    /// Hermiticity-preserving maps.
    pub imag: f64,
}

/// `<A, phi>`; for `A = z z^*` this equals `w^* C w` with `w = conj(z)`.
pub fn pair(a: &ComplexMatrix, c: &ChoiMatrix) -> Result<Pairing> {
    if a.rows() != c.data.rows() || a.cols() != c.data.cols() {
        return Err(Error::DimensionMismatch(format!(
            "pairing a {}x{} matrix with a {}x{} Choi matrix",
            a.rows(),
            a.cols(),
            c.data.rows(),
            c.data.cols()
        )));
    }
    let z = a.entrywise_dot(&c.data);
    Ok(Pairing { value: z.re, imag: z.im })
}

/// Strictly increasing set of block positions where zero block rows and
/// columns are inserted (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftIndexSet {
    target_dim: usize,
    indices: Vec<usize>,
}

impl LiftIndexSet {
    pub fn new(target_dim: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= target_dim {
                return Err(Error::IndexOutOfRange { index: last, limit: target_dim });
            }
        }
        if indices.len() >= target_dim {
            return Err(Error::InvalidIndexSet(format!(
                "{} inserted positions leave no source blocks in dimension {target_dim}",
                indices.len()
            )));
        }
        Ok(Self { target_dim, indices })
    }

    pub fn empty(dim: usize) -> Self {
        Self { target_dim: dim, indices: Vec::new() }
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn source_dim(&self) -> usize {
        self.target_dim - self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Target positions of the source blocks, in order.
    pub fn kept_positions(&self) -> Vec<usize> {
        (0..self.target_dim)
            .filter(|q| self.indices.binary_search(q).is_err())
            .collect()
    }
}

/// Trivial lifting: inserts a zero block row and column at every index of `set`.
pub fn lift(c: &ChoiMatrix, set: &LiftIndexSet) -> Result<ChoiMatrix> {
    if c.m != set.source_dim() {
        return Err(Error::DimensionMismatch(format!(
            "lifting a map on M_{} into M_{} needs {} inserted positions, got {}",
            c.m,
            set.target_dim,
            set.target_dim.saturating_sub(c.m),
            set.indices.len()
        )));
    }
    let n = c.n;
    let kept = set.kept_positions();
    let mut data = ComplexMatrix::zeros(set.target_dim * n, set.target_dim * n);
    for (a, &i) in kept.iter().enumerate() {
        for (b, &j) in kept.iter().enumerate() {
            data.set_block(i, j, &c.block(a, b));
        }
    }
    Ok(ChoiMatrix {
        m: set.target_dim,
        n,
        data,
        hermitian: c.hermitian,
    })
}

/// Removes every block row/column whose row and column norms are at most
/// `tol * ||C||`, returning the reduced matrix and the removed positions.
/// A matrix whose blocks are all zero is returned unchanged with an empty set.
pub fn unlift(c: &ChoiMatrix, tol: f64) -> (ChoiMatrix, LiftIndexSet) {
    let threshold = tol * c.norm();
    let n = c.n;
    let zero: Vec<usize> = (0..c.m)
        .filter(|&q| {
            let row = c.data.submatrix(q * n, 0, n, c.m * n).norm();
            let col = c.data.submatrix(0, q * n, c.m * n, n).norm();
            row <= threshold && col <= threshold
        })
        .collect();
    if zero.is_empty() || zero.len() == c.m {
        return (c.clone(), LiftIndexSet::empty(c.m));
    }
    let set = LiftIndexSet { target_dim: c.m, indices: zero };
    (c.select_blocks(&set.kept_positions()), set)
}

/// Choi matrix of the identity map on `M_n`.
pub fn identity_choi(n: usize) -> ChoiMatrix {
    choi_of_map(|x| x.clone(), n, n).expect("identity map is well formed")
}

/// Choi matrix of the transpose map on `M_n` (the swap operator).
pub fn transpose_choi(n: usize) -> ChoiMatrix {
    choi_of_map(|x| x.transpose(), n, n).expect("transpose map is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, is_psd, real, DEFAULT_PSD_TOL};
    use crate::random::{gaussian_matrix, gaussian_vector, random_hermitian, random_psd, seeded};

    fn random_choi(seed: u64, m: usize, n: usize) -> ChoiMatrix {
        let mut rng = seeded(seed);
        ChoiMatrix::new(m, n, random_hermitian(&mut rng, m * n).into_matrix()).unwrap()
    }

    #[test]
    fn identity_map_choi() {
        let c = identity_choi(2);
        let mut want = ComplexMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(r, col)] = real(1.0);
        }
        assert_eq!(c.matrix(), &want);
    }

    #[test]
    fn transpose_map_choi_is_swap() {
        let c = transpose_choi(2);
        // swap: |ij> -> |ji>
        let want = ComplexMatrix::from_fn(4, 4, |r, col| {
            let (i, j) = (r / 2, r % 2);
            if col == j * 2 + i {
                real(1.0)
            } else {
                real(0.0)
            }
        });
        assert_eq!(c.matrix(), &want);
    }

    #[test]
    fn choi_of_map_rejects_wrong_output_dim() {
        let err = choi_of_map(|_| ComplexMatrix::zeros(3, 3), 2, 2).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn apply_identity() {
        let mut rng = seeded(1);
        let x = gaussian_matrix(&mut rng, 3, 3);
        assert_eq!(apply_map(&identity_choi(3), &x).unwrap(), x);
        assert!(apply_map(&identity_choi(3), &ComplexMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn choi_roundtrip_is_exact() {
        let mut rng = seeded(2);
        for (m, n) in [(2, 3), (3, 2), (3, 3)] {
            let c = ChoiMatrix::new(m, n, gaussian_matrix(&mut rng, m * n, m * n)).unwrap();
            assert!(!c.is_hermitian());
            let back = choi_of_map(|x| apply_map(&c, x).unwrap(), m, n).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn pairing_with_unit_reads_entry() {
        let c = random_choi(3, 2, 3);
        let a = ComplexMatrix::unit(6, 6, 0, 0);
        assert_eq!(pair(&a, &c).unwrap().value, c.matrix()[(0, 0)].re);
    }

    #[test]
    fn pairing_computational_identity() {
        let mut rng = seeded(4);
        for _ in 0..50 {
            let c = ChoiMatrix::new(3, 2, random_hermitian(&mut rng, 6).into_matrix()).unwrap();
            let z = gaussian_vector(&mut rng, 6);
            let zc = ComplexMatrix::column(&z);
            let p = pair(&(&zc * &zc.adjoint()), &c).unwrap();
            let w = zc.conj();
            let quad = (&(&w.adjoint() * c.matrix()) * &w)[(0, 0)];
            assert!((p.value - quad.re).abs() < 1e-12 * (1.0 + quad.norm()));
            assert!(p.imag.abs() < 1e-10);
        }
    }

    #[test]
    fn pairing_nonnegative_on_cp_maps() {
        let mut rng = seeded(5);
        let c = ChoiMatrix::new(2, 3, random_psd(&mut rng, 6, 6)).unwrap();
        for _ in 0..100 {
            let z = ComplexMatrix::column(&gaussian_vector(&mut rng, 6));
            assert!(pair(&(&z * &z.adjoint()), &c).unwrap().value >= -1e-12);
        }
    }

    #[test]
    fn pairing_dimension_mismatch() {
        assert!(pair(&ComplexMatrix::zeros(4, 4), &identity_choi(3)).is_err());
    }

    #[test]
    fn lift_inserts_zero_block() {
        let c = random_choi(6, 2, 2);
        let l = lift(&c, &LiftIndexSet::new(3, vec![1]).unwrap()).unwrap();
        assert_eq!(l.m(), 3);
        for q in 0..3 {
            assert_eq!(l.block(1, q).norm(), 0.0);
            assert_eq!(l.block(q, 1).norm(), 0.0);
        }
        assert_eq!(l.block(0, 2), c.block(0, 1));
        assert_eq!(l.block(2, 2), c.block(1, 1));

        let same = lift(&c, &LiftIndexSet::empty(2)).unwrap();
        assert_eq!(same, c);

        let one = random_choi(7, 1, 2);
        let l = lift(&one, &LiftIndexSet::new(3, vec![0, 2]).unwrap()).unwrap();
        assert_eq!(l.block(1, 1), one.block(0, 0));
        let mut rest = l.matrix().clone();
        rest.set_block(1, 1, &ComplexMatrix::zeros(2, 2));
        assert_eq!(rest.norm(), 0.0);
    }

    #[test]
    fn lift_index_validation() {
        assert!(LiftIndexSet::new(3, vec![2, 1]).is_err());
        assert!(LiftIndexSet::new(3, vec![1, 1]).is_err());
        assert!(matches!(
            LiftIndexSet::new(3, vec![3]),
            Err(Error::IndexOutOfRange { index: 3, limit: 3 })
        ));
        let c = random_choi(8, 2, 2);
        assert!(lift(&c, &LiftIndexSet::new(4, vec![1]).unwrap()).is_err());
    }

    #[test]
    fn unlift_roundtrip() {
        let c = random_choi(9, 2, 3);
        let set = LiftIndexSet::new(3, vec![1]).unwrap();
        let (back, found) = unlift(&lift(&c, &set).unwrap(), DEFAULT_UNLIFT_TOL);
        assert_eq!(back, c);
        assert_eq!(found, set);

        let (same, none) = unlift(&c, DEFAULT_UNLIFT_TOL);
        assert_eq!(same, c);
        assert!(none.is_empty());
    }

    #[test]
    fn lift_is_linear() {
        let c1 = random_choi(10, 2, 2);
        let c2 = random_choi(11, 2, 2);
        let set = LiftIndexSet::new(4, vec![0, 3]).unwrap();
        let combo = c1.scale(2.5).add(&c2.scale(-0.5)).unwrap();
        let lhs = lift(&combo, &set).unwrap();
        let rhs = lift(&c1, &set)
            .unwrap()
            .scale(2.5)
            .add(&lift(&c2, &set).unwrap().scale(-0.5))
            .unwrap();
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-15);
    }

    #[test]
    fn lift_transports_cp_and_cocp() {
        let mut rng = seeded(12);
        for trial in 0..40 {
            let data = if trial % 2 == 0 {
                random_psd(&mut rng, 6, 3)
            } else {
                random_hermitian(&mut rng, 6).into_matrix()
            };
            let c = ChoiMatrix::new(2, 3, data).unwrap();
            let set = LiftIndexSet::new(4, vec![trial % 4, 3.min(trial % 4 + 1 + trial % 2)])
                .or_else(|_| LiftIndexSet::new(4, vec![0, 2]))
                .unwrap();
            let l = lift(&c, &set).unwrap();
            let psd = |x: &ChoiMatrix| {
                is_psd(&x.require_hermitian().unwrap(), DEFAULT_PSD_TOL).unwrap().is_psd
            };
            assert_eq!(psd(&c), psd(&l));
            assert_eq!(psd(&c.partial_transpose()), psd(&l.partial_transpose()));
        }
    }

    #[test]
    fn near_hermitian_input_is_symmetrized() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = c64(1e-10, 0.0);
        let c = ChoiMatrix::new(2, 2, m).unwrap();
        assert!(c.is_hermitian());
        assert_eq!(c.matrix().asymmetry(), 0.0);
    }
}
