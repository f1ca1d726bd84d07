//! k-positivity and k-copositivity from the Choi matrix.
//!
//! A map is k-positive iff `w^* C w >= 0` for every `w` of Schmidt rank at most
//! `k`. At `k = min(m, n)` this is PSD-ness of `C` and is decided exactly by an
//! eigendecomposition. Below that, a see-saw (alternating minimal-eigenvector)
//! search over `w = sum_s x_s ⊗ y_s` looks for a negative value; a negative
//! value is a certificate, its absence is only heuristic evidence.

use rayon::prelude::*;

use crate::choi::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, hermitize, svd, ComplexMatrix, HermitianMatrix, C64};
use crate::random::{haar_coisometry, stream};
use crate::states::BipartiteVector;

/// Default relative refutation tolerance.
pub const DEFAULT_REFUTE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub rng_seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 500,
            conv_tol: 1e-9,
            rng_seed: 0,
        }
    }
}

impl SeesawOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.conv_tol > 0.0) {
            return Err(Error::InvalidParameter("conv_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    /// Decided by an eigenvalue test; the property holds.
    CertifiedExact,
    /// The search found no violating vector. Not a proof.
    HeuristicUnrefuted,
    /// A violating vector of Schmidt rank at most `k` is attached.
    Refuted,
}

/// Verdict of a k-positivity (or k-copositivity) check.
///
/// For a refutation, `witness` is the state-side vector `z`: the pairing of
/// `z z^*` with the map (or of `(z z^*)^Γ` for copositivity) equals
/// `min_value_found`, i.e. `conj(z)^* C conj(z) = min_value_found` with `C`
/// the matrix that was tested.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityVerdict {
    pub kind: VerdictKind,
    pub k: usize,
    pub min_value_found: f64,
    pub witness: Option<BipartiteVector>,
    pub restarts_used: usize,
}

impl PositivityVerdict {
    pub fn is_refuted(&self) -> bool {
        self.kind == VerdictKind::Refuted
    }

    /// Certified or unrefuted.
    pub fn holds(&self) -> bool {
        !self.is_refuted()
    }
}

/// Best point found by [`min_schmidt_quadratic`].
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtMinimum {
    /// `w^* C w` recomputed on the returned unit vector.
    pub value: f64,
    /// The minimizer `w`, Schmidt rank at most `k`.
    pub vector: BipartiteVector,
    pub restarts_used: usize,
}

fn quadratic_form(h: &ComplexMatrix, w: &[C64]) -> f64 {
    let col = ComplexMatrix::column(w);
    (&(&col.adjoint() * h) * &col)[(0, 0)].re
}

/// `conj(z)^* C conj(z)`, the pairing of `z z^*` with the map of `C`.
pub fn state_quadratic_value(c: &ChoiMatrix, z: &BipartiteVector) -> Result<f64> {
    if z.len() != c.matrix().rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a {}x{} Choi matrix",
            z.len(),
            c.matrix().rows(),
            c.matrix().rows()
        )));
    }
    let w: Vec<C64> = z.amplitudes().iter().map(|x| x.conj()).collect();
    Ok(quadratic_form(c.matrix(), &w))
}

fn check_k(c: &ChoiMatrix, k: usize) -> Result<()> {
    let max = c.m().min(c.n());
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    Ok(())
}

/// `W[i, j] = w[i n + j]`.
fn coefficient_matrix(w: &[C64], m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, n, |i, j| w[i * n + j])
}

/// Minimal eigenpair of `L^* H L`, lifted back through `L`.
fn compressed_min(h: &ComplexMatrix, l: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let reduced = &(&l.adjoint() * h) * l;
    let eig = eig_hermitian(&hermitize(&reduced)?)?;
    let x = ComplexMatrix::column(&eig.vector(0));
    let w = l * &x;
    Ok((eig.eigenvalues[0], (0..w.rows()).map(|r| w[(r, 0)]).collect()))
}

/// `w = sum_s x_s ⊗ y_s` as a linear function of the stacked `x` for fixed
/// orthonormal columns `y_s` of `y` (n x k).
fn x_embedding(y: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let (n, k) = (y.rows(), y.cols());
    let mut l = ComplexMatrix::zeros(m * n, m * k);
    for s in 0..k {
        for i in 0..m {
            for j in 0..n {
                l[(i * n + j, s * m + i)] = y[(j, s)];
            }
        }
    }
    l
}

/// Same with the roles swapped: fixed orthonormal columns `x_s` of `x` (m x k).
fn y_embedding(x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let (m, k) = (x.rows(), x.cols());
    let mut l = ComplexMatrix::zeros(m * n, n * k);
    for s in 0..k {
        for i in 0..m {
            for j in 0..n {
                l[(i * n + j, s * n + j)] = x[(i, s)];
            }
        }
    }
    l
}

fn seesaw_restart(
    h: &ComplexMatrix,
    m: usize,
    n: usize,
    k: usize,
    opts: &SeesawOptions,
    restart: usize,
) -> Result<(f64, Vec<C64>)> {
    let mut rng = stream(opts.rng_seed, restart as u64);
    // orthonormal columns y_1..y_k
    let mut y = haar_coisometry(&mut rng, k, n).transpose();
    let mut best = f64::INFINITY;
    let mut w = Vec::new();
    for _ in 0..opts.max_iters.max(1) {
        let (_, wx) = compressed_min(h, &x_embedding(&y, m))?;
        let x = svd(&coefficient_matrix(&wx, m, n)).u.submatrix(0, 0, m, k);

        let (value, wy) = compressed_min(h, &y_embedding(&x, n))?;
        let d = svd(&coefficient_matrix(&wy, m, n));
        y = d.v_adjoint.submatrix(0, 0, k, n).transpose();
        w = wy;

        let improved = best - value;
        best = best.min(value);
        if improved.is_finite() && improved < opts.conv_tol * value.abs().max(1.0) {
            break;
        }
    }
    Ok((best, w))
}

fn normalized(mut w: Vec<C64>) -> Vec<C64> {
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in w.iter_mut() {
            *z /= norm;
        }
    }
    w
}

/// Approximately minimizes `w^* C w` over unit vectors of Schmidt rank at most `k`.
///
/// Restarts run in parallel, each on its own seeded stream; the best value wins
/// with ties going to the lowest restart index. At `k = min(m, n)` the
/// constraint is vacuous and the minimal eigenvector is returned directly.
pub fn min_schmidt_quadratic(c: &ChoiMatrix, k: usize, opts: &SeesawOptions) -> Result<SchmidtMinimum> {
    let h = c.require_hermitian()?;
    check_k(c, k)?;
    opts.validate()?;
    let (m, n) = (c.m(), c.n());
    if k == m.min(n) {
        let eig = eig_hermitian(&h)?;
        let w = eig.vector(0);
        let value = quadratic_form(h.matrix(), &w);
        return Ok(SchmidtMinimum {
            value,
            vector: BipartiteVector::new(m, n, w)?,
            restarts_used: 1,
        });
    }
    let runs: Vec<Result<(f64, Vec<C64>)>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| seesaw_restart(h.matrix(), m, n, k, opts, r))
        .collect();
    let mut best: Option<(f64, Vec<C64>)> = None;
    for run in runs {
        let (_, w) = run?;
        let w = normalized(w);
        let value = quadratic_form(h.matrix(), &w);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, w));
        }
    }
    let (value, w) = best.expect("at least one restart");
    Ok(SchmidtMinimum {
        value,
        vector: BipartiteVector::new(m, n, w)?,
        restarts_used: opts.restarts,
    })
}

fn refutation_threshold(h: &HermitianMatrix, tol: f64) -> Result<f64> {
    let scale = eig_hermitian(h)?.spectral_norm().max(1.0);
    Ok(-tol * scale)
}

fn exact_verdict(c: &ChoiMatrix, k: usize, tol: f64) -> Result<PositivityVerdict> {
    let h = c.require_hermitian()?;
    let eig = eig_hermitian(&h)?;
    let threshold = -tol * eig.spectral_norm().max(1.0);
    let w = eig.vector(0);
    let value = quadratic_form(h.matrix(), &w);
    if eig.min() >= threshold {
        return Ok(PositivityVerdict {
            kind: VerdictKind::CertifiedExact,
            k,
            min_value_found: eig.min(),
            witness: None,
            restarts_used: 0,
        });
    }
    let z = w.iter().map(|x| x.conj()).collect();
    Ok(PositivityVerdict {
        kind: VerdictKind::Refuted,
        k,
        min_value_found: value,
        witness: Some(BipartiteVector::new(c.m(), c.n(), z)?),
        restarts_used: 0,
    })
}

/// k-positivity check. Exact at `k = min(m, n)`; otherwise a see-saw search that
/// refutes when it finds a value below `-tol * max(1, ||C||)`.
pub fn check_k_positive(
    c: &ChoiMatrix,
    k: usize,
    opts: &SeesawOptions,
    tol: f64,
) -> Result<PositivityVerdict> {
    let h = c.require_hermitian()?;
    check_k(c, k)?;
    if k == c.m().min(c.n()) {
        return exact_verdict(c, k, tol);
    }
    let best = min_schmidt_quadratic(c, k, opts)?;
    let refuted = best.value < refutation_threshold(&h, tol)?;
    Ok(PositivityVerdict {
        kind: if refuted {
            VerdictKind::Refuted
        } else {
            VerdictKind::HeuristicUnrefuted
        },
        k,
        min_value_found: best.value,
        witness: refuted.then(|| best.vector.conj()),
        restarts_used: best.restarts_used,
    })
}

/// k-copositivity: the k-positivity check applied to `C^Γ`.
pub fn check_k_copositive(
    c: &ChoiMatrix,
    k: usize,
    opts: &SeesawOptions,
    tol: f64,
) -> Result<PositivityVerdict> {
    check_k_positive(&c.partial_transpose(), k, opts, tol)
}

/// Complete positivity: `C ⪰ 0`.
pub fn check_completely_positive(c: &ChoiMatrix, tol: f64) -> Result<PositivityVerdict> {
    exact_verdict(c, c.m().min(c.n()), tol)
}

/// Complete copositivity: `C^Γ ⪰ 0`.
pub fn check_completely_copositive(c: &ChoiMatrix, tol: f64) -> Result<PositivityVerdict> {
    check_completely_positive(&c.partial_transpose(), tol)
}
