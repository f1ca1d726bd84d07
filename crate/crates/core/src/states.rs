//! State-side tools: Schmidt rank of bipartite vectors, the PPT test, a
//! constructive upper bound on the Schmidt number by ensemble search, and
//! witness-based lower bounds through the map/state pairing.

use crate::choi::{pair, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, hermitize, is_psd, partial_transpose, singular_values, svd, ComplexMatrix,
    HermitianMatrix, C64,
};
use crate::positivity::{PositivityVerdict, SeesawOptions};
use crate::random::{haar_coisometry, stream};

/// Vector in `C^m ⊗ C^n`; amplitude `i n + j` is the coefficient of `e_i ⊗ e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteVector {
    m: usize,
    n: usize,
    amplitudes: Vec<C64>,
}

impl BipartiteVector {
    pub fn new(m: usize, n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in C^{m} ⊗ C^{n}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { m, n, amplitudes })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            m: self.m,
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|z| z / norm).collect(),
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            m: self.m,
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    /// The `m x n` coefficient matrix; row `i` is `z_i` in `z = sum_i e_i ⊗ z_i`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.m, self.n, |i, j| self.amplitudes[i * self.n + j])
    }

    pub fn from_coefficient_matrix(w: &ComplexMatrix) -> Self {
        Self {
            m: w.rows(),
            n: w.cols(),
            amplitudes: w.to_row_major(),
        }
    }

    /// `z z^*`.
    pub fn projector(&self) -> ComplexMatrix {
        let col = ComplexMatrix::column(&self.amplitudes);
        &col * &col.adjoint()
    }
}

/// Numerical rank of the coefficient matrix (singular values above `tol * sigma_max`).
pub fn schmidt_rank(z: &BipartiteVector, tol: f64) -> Result<usize> {
    let s = singular_values(&z.coefficient_matrix());
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(s.iter().filter(|&&x| x > tol * smax).count())
}

/// Trace-one PSD matrix on `C^m ⊗ C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: usize,
    n: usize,
    data: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(m: usize, n: usize, data: ComplexMatrix) -> Result<Self> {
        if data.rows() != m * n || data.cols() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "density matrix on C^{m} ⊗ C^{n} must be {0}x{0}, got {1}x{2}",
                m * n,
                data.rows(),
                data.cols()
            )));
        }
        let h = HermitianMatrix::new(&data)
            .map_err(|_| Error::InvalidDensity("not hermitian".into()))?;
        let trace = h.matrix().trace().re;
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = eig_hermitian(&h)?.min();
        if min < -1e-10 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { m, n, data: h })
    }

    /// `z z^* / ||z||^2`.
    pub fn pure(z: &BipartiteVector) -> Result<Self> {
        let z = z.normalized()?;
        Self::new(z.m(), z.n(), z.projector())
    }

    pub fn maximally_mixed(m: usize, n: usize) -> Self {
        let d = m * n;
        Self::new(m, n, ComplexMatrix::identity(d).scale(1.0 / d as f64)).expect("valid state")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.data.matrix()
    }
}

/// `rho^Γ ⪰ 0`, with the same partial transpose as the Choi side.
pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    let t = partial_transpose(rho.matrix(), rho.m, rho.n)?;
    Ok(is_psd(&hermitize(&t)?, tol)?.is_psd)
}

/// `rho = sum_k p_k z_k z_k^*` with every `z_k` of Schmidt rank at most `max_schmidt_rank`.
#[derive(Clone, Debug)]
pub struct EnsembleDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<BipartiteVector>,
    pub max_schmidt_rank: usize,
    /// Frobenius norm of `rho - sum_k p_k z_k z_k^*`.
    pub residual: f64,
}

impl EnsembleDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors.first().map_or(0, |v| v.len());
        self.weights
            .iter()
            .zip(&self.vectors)
            .fold(ComplexMatrix::zeros(d, d), |acc, (p, z)| acc + z.projector().scale(*p))
    }
}

/// Default ensemble size: twice the rank of `rho`.
pub fn default_ensemble_size(rho: &DensityMatrix) -> usize {
    let eig = eig_hermitian(&HermitianMatrix::new(rho.matrix()).expect("hermitian"))
        .expect("eigendecomposition");
    let cut = 1e-10 * eig.spectral_norm().max(f64::MIN_POSITIVE);
    2 * eig.eigenvalues.iter().filter(|&&l| l > cut).count().max(1)
}

/// Truncates `f` (a vector of `C^m ⊗ C^n`) to its best Schmidt-rank-`k` approximation.
fn truncate_schmidt(f: &[C64], m: usize, n: usize, k: usize) -> Vec<C64> {
    let w = ComplexMatrix::from_fn(m, n, |i, j| f[i * n + j]);
    let d = svd(&w);
    let mut out = ComplexMatrix::zeros(m, n);
    for s in 0..k.min(d.singular_values.len()) {
        let sigma = d.singular_values[s];
        for i in 0..m {
            for j in 0..n {
                out[(i, j)] += d.u[(i, s)] * d.v_adjoint[(s, j)] * sigma;
            }
        }
    }
    out.to_row_major()
}

struct EnsembleRun {
    residual: f64,
    columns: Vec<Vec<C64>>,
}

fn ensemble_restart(
    rho: &DensityMatrix,
    k: usize,
    ensemble_size: usize,
    opts: &SeesawOptions,
    tol: f64,
    restart: usize,
) -> Result<EnsembleRun> {
    let (m, n) = (rho.m, rho.n);
    let d = m * n;
    let eig = eig_hermitian(&rho.data)?;
    let cut = 1e-12 * eig.spectral_norm().max(f64::MIN_POSITIVE);
    let support: Vec<usize> = (0..d).filter(|&j| eig.eigenvalues[j] > cut).collect();
    let r = support.len();
    // rho = V V^*
    let v = ComplexMatrix::from_fn(d, r, |i, j| {
        eig.eigenvectors[(i, support[j])] * eig.eigenvalues[support[j]].sqrt()
    });

    // F = V W with W a co-isometry (r x N)
    let mut w = if restart == 0 {
        ComplexMatrix::from_fn(r, ensemble_size, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            }
        })
    } else {
        let mut rng = stream(opts.rng_seed, restart as u64);
        haar_coisometry(&mut rng, r, ensemble_size)
    };

    let mut best = EnsembleRun {
        residual: f64::INFINITY,
        columns: Vec::new(),
    };
    let mut prev = f64::INFINITY;
    for _ in 0..opts.max_iters.max(1) {
        let f = &v * &w;
        let columns: Vec<Vec<C64>> = (0..ensemble_size)
            .map(|j| {
                let col: Vec<C64> = (0..d).map(|i| f[(i, j)]).collect();
                truncate_schmidt(&col, m, n, k)
            })
            .collect();
        let truncated = ComplexMatrix::from_fn(d, ensemble_size, |i, j| columns[j][i]);
        let approx = &truncated * &truncated.adjoint();
        let residual = (rho.matrix() - &approx).norm();
        if residual < best.residual {
            best = EnsembleRun { residual, columns };
        }
        if residual <= tol || prev - residual < opts.conv_tol * residual {
            break;
        }
        prev = residual;
        // nearest co-isometry to V^* F_truncated (up to the fixed Gram factor)
        let target = &v.adjoint() * &truncated;
        let p = svd(&target);
        w = &p.u * &p.v_adjoint;
    }
    Ok(best)
}

/// Searches for an ensemble of Schmidt-rank-`k` vectors reproducing `rho`.
///
/// Alternates between clipping each ensemble vector to Schmidt rank `k` and
/// projecting back onto the ensembles of `rho` (`F = V W`, `rho = V V^*`,
/// `W W^* = I`). The first restart starts from the eigen-ensemble, later ones
/// from Haar-random rotations. Returns `None` when no run reaches `tol`; that is
/// not a claim that the Schmidt number exceeds `k`.
pub fn schmidt_number_upper(
    rho: &DensityMatrix,
    k: usize,
    ensemble_size: usize,
    opts: &SeesawOptions,
    tol: f64,
) -> Result<Option<EnsembleDecomposition>> {
    opts.validate()?;
    let max = rho.m.min(rho.n);
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let rank = default_ensemble_size(rho) / 2;
    if ensemble_size < rank {
        return Err(Error::InvalidParameter(format!(
            "ensemble size {ensemble_size} below rank {rank}"
        )));
    }
    for restart in 0..opts.restarts {
        let run = ensemble_restart(rho, k, ensemble_size, opts, tol, restart)?;
        if run.residual > tol {
            continue;
        }
        let decomposition = assemble(rho, k, run.columns)?;
        if decomposition.residual <= tol {
            return Ok(Some(decomposition));
        }
    }
    Ok(None)
}

fn assemble(rho: &DensityMatrix, k: usize, columns: Vec<Vec<C64>>) -> Result<EnsembleDecomposition> {
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for col in columns {
        let w: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if w <= 1e-300 {
            continue;
        }
        weights.push(w);
        vectors.push(BipartiteVector::new(rho.m, rho.n, col)?.normalized()?);
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut out = EnsembleDecomposition {
        weights,
        vectors,
        max_schmidt_rank: k,
        residual: 0.0,
    };
    out.residual = (rho.matrix() - &out.reconstruct()).norm();
    Ok(out)
}

/// A map offered as an entanglement witness, with the verdict backing its
/// claimed positivity order.
#[derive(Clone, Debug)]
pub struct Witness {
    pub choi: ChoiMatrix,
    pub verdict: PositivityVerdict,
}

/// Lower bound on the Schmidt number: `1 + max k` over k-positive witnesses with
/// `<rho, phi> < -tol`, or 1 when no witness detects the state.
pub fn schmidt_number_lower(rho: &DensityMatrix, witnesses: &[Witness], tol: f64) -> Result<usize> {
    let mut bound = 1;
    for (index, w) in witnesses.iter().enumerate() {
        if w.verdict.is_refuted() {
            return Err(Error::RejectedWitness {
                index,
                k: w.verdict.k,
            });
        }
        if pair(rho.matrix(), &w.choi)?.value < -tol {
            bound = bound.max(w.verdict.k + 1);
        }
    }
    Ok(bound)
}
