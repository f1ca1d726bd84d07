//! Seeded random instances: complex Gaussian matrices, PSD matrices, Haar
//! co-isometries and product states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, hermitize, svd, ComplexMatrix, HermitianMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn gaussian_vector(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

pub fn random_unit_vector(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    let mut v = gaussian_vector(rng, len);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    hermitize(&gaussian_matrix(rng, n, n)).expect("square")
}

/// `G G^*` with `G` an `n x rank` complex Gaussian matrix.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank);
    hermitize(&(&g * &g.adjoint())).expect("square").into_matrix()
}

/// Haar-distributed `rows x cols` matrix with orthonormal rows (`rows <= cols`),
/// the polar factor of a Gaussian matrix.
pub fn haar_coisometry(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows <= cols, "co-isometry needs rows <= cols");
    let d = svd(&gaussian_matrix(rng, rows, cols));
    &d.u * &d.v_adjoint
}

pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    haar_coisometry(rng, n, n)
}

/// Random product vector `x ⊗ y` with unit norm.
pub fn random_product_vector(rng: &mut impl Rng, m: usize, n: usize) -> Vec<C64> {
    let x = random_unit_vector(rng, m);
    let y = random_unit_vector(rng, n);
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

/// Random separable density matrix: a convex mixture of `terms` product states.
pub fn random_separable_density(rng: &mut impl Rng, m: usize, n: usize, terms: usize) -> ComplexMatrix {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = ComplexMatrix::zeros(m * n, m * n);
    for w in weights {
        let z = ComplexMatrix::column(&random_product_vector(rng, m, n));
        rho = rho + (&z * &z.adjoint()).scale(w / total);
    }
    hermitize(&rho).expect("square").into_matrix()
}
