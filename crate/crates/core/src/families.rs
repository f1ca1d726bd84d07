//! Closed-form maps used as ground truth: the generalized Choi maps
//! `Phi[a, b, c]` on `M_3` and the one-parameter `omega(eps)` map on `M_2`.
//!
//! All constructors are direct entry assignments, with no iterative numerics.

use crate::choi::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::{real, ComplexMatrix};

/// Non-negative parameters of the generalized Choi map `Phi[a, b, c]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GChoiParams {
    a: f64,
    b: f64,
    c: f64,
}

impl GChoiParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
}

// 0-based positions in the 9x9 Choi matrix
const A_DIAG: [usize; 3] = [0, 4, 8];
const C_DIAG: [usize; 3] = [1, 5, 6];
const B_DIAG: [usize; 3] = [2, 3, 7];

fn gchoi_matrix(a: f64, b: f64, c: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(9, 9);
    for i in A_DIAG {
        m[(i, i)] = real(a);
    }
    for i in B_DIAG {
        m[(i, i)] = real(b);
    }
    for i in C_DIAG {
        m[(i, i)] = real(c);
    }
    for (i, j) in [(0, 4), (0, 8), (4, 8)] {
        m[(i, j)] = real(-1.0);
        m[(j, i)] = real(-1.0);
    }
    m
}

fn choi9(data: ComplexMatrix) -> ChoiMatrix {
    ChoiMatrix::new(3, 3, data).expect("9x9 Hermitian")
}

/// The 9x9 Choi matrix of `Phi[a, b, c]`.
pub fn gchoi_choi(p: &GChoiParams) -> ChoiMatrix {
    choi9(gchoi_matrix(p.a, p.b, p.c))
}

/// `Phi[a, b, c](X)` evaluated from the defining formula.
pub fn gchoi_apply(p: &GChoiParams, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 3 || x.cols() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "Phi[a,b,c] acts on 3x3 matrices, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let (a, b, c) = (p.a, p.b, p.c);
    let d = |i: usize| x[(i, i)];
    Ok(ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => d(0) * a + d(1) * b + d(2) * c,
        (1, 1) => d(0) * c + d(1) * a + d(2) * b,
        (2, 2) => d(0) * b + d(1) * c + d(2) * a,
        _ => -x[(i, j)],
    }))
}

/// `Phi[a, b, c]` is completely positive exactly when `a >= 2`.
pub fn gchoi_is_cp(p: &GChoiParams) -> bool {
    p.a >= 2.0
}

/// 2-positivity: `a >= 2`, or `1 <= a < 2` with `bc >= (2 - a)(b + c)` and `b + c > 0`.
///
/// When `b = c = 0` the inequality degenerates to `0 >= 0`, but `Phi[a, 0, 0]`
/// with `a < 2` is not even positive (the uniform vector gives eigenvalue
/// `(a - 2) / 3`), so that case is excluded.
pub fn gchoi_is_2positive(p: &GChoiParams) -> bool {
    let (a, b, c) = (p.a, p.b, p.c);
    a >= 2.0 || ((1.0..2.0).contains(&a) && b + c > 0.0 && b * c >= (2.0 - a) * (b + c))
}

/// Result of evaluating the coupling condition `bc >= (a - 1 - 2/a)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionStar {
    pub holds: bool,
    /// Whether the map is in the non-trivial regime (2-positive, not CP) where
    /// the condition is guaranteed.
    pub precondition_met: bool,
}

pub fn gchoi_condition_star(p: &GChoiParams) -> ConditionStar {
    let holds = p.a > 0.0 && p.b * p.c >= star_coupling(p.a).powi(2);
    ConditionStar {
        holds,
        precondition_met: gchoi_is_2positive(p) && !gchoi_is_cp(p),
    }
}

fn star_coupling(a: f64) -> f64 {
    a - 1.0 - 2.0 / a
}

/// Splits `Phi[a, b, c] = Phi_1 + Phi_2` with `Phi_1` the completely positive
/// part and `Phi_2` the completely copositive part. Both certificates hold
/// when the coupling condition does.
pub fn gchoi_explicit_decomposition(p: &GChoiParams) -> Result<(ChoiMatrix, ChoiMatrix)> {
    let (a, b, c) = (p.a, p.b, p.c);
    if a == 0.0 {
        return Err(Error::InvalidParameter("explicit decomposition needs a > 0".into()));
    }
    let mut phi1 = ComplexMatrix::zeros(9, 9);
    for (i, v) in [(0, a), (1, c), (2, b), (3, b), (4, a), (6, c), (8, a)] {
        phi1[(i, i)] = real(v);
    }
    for (i, j, v) in [(0, 4, -1.0), (0, 8, -1.0), (4, 8, 2.0 / a - a)] {
        phi1[(i, j)] = real(v);
        phi1[(j, i)] = real(v);
    }

    let mut phi2 = ComplexMatrix::zeros(9, 9);
    phi2[(5, 5)] = real(c);
    phi2[(7, 7)] = real(b);
    let t = star_coupling(a);
    phi2[(4, 8)] = real(t);
    phi2[(8, 4)] = real(t);

    Ok((choi9(phi1), choi9(phi2)))
}

/// `Phi[a,b,c] = (1 - s) Phi[(a - s)/(1 - s), 0, 0] + s Phi[1, sqrt(b/c), sqrt(c/b)]`
/// with `s = sqrt(bc)`. Returns the two weighted Choi matrices.
pub fn gchoi_alternative_decomposition(p: &GChoiParams) -> Result<(ChoiMatrix, ChoiMatrix)> {
    let (a, b, c) = (p.a, p.b, p.c);
    if b == 0.0 || c == 0.0 {
        return Err(Error::InvalidParameter(
            "alternative decomposition needs b > 0 and c > 0".into(),
        ));
    }
    let s = (b * c).sqrt();
    if (1.0 - s).abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "alternative decomposition is undefined at bc = 1".into(),
        ));
    }
    let first = gchoi_matrix((a - s) / (1.0 - s), 0.0, 0.0).scale(1.0 - s);
    let second = gchoi_matrix(1.0, (b / c).sqrt(), (c / b).sqrt()).scale(s);
    Ok((choi9(first), choi9(second)))
}

/// Real parameter of the `omega` map on `M_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaParams {
    eps: f64,
}

impl OmegaParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("eps = {eps} must be finite")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

fn choi4(entries: [[f64; 4]; 4]) -> ChoiMatrix {
    let flat: Vec<f64> = entries.iter().flatten().copied().collect();
    ChoiMatrix::new(
        2,
        2,
        ComplexMatrix::from_real_row_major(4, 4, &flat).expect("finite"),
    )
    .expect("4x4 Hermitian")
}

pub fn omega_choi(p: &OmegaParams) -> ChoiMatrix {
    let e = p.eps;
    choi4([
        [1.0, 0.0, 0.0, e],
        [0.0, 0.0, e, 0.0],
        [0.0, e, 0.0, 0.0],
        [e, 0.0, 0.0, 1.0],
    ])
}

/// `omega([[a, b], [c, d]]) = [[a, eps(b + c)], [eps(b + c), d]]`.
pub fn omega_apply(p: &OmegaParams, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 2 || x.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "omega acts on 2x2 matrices, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let off = (x[(0, 1)] + x[(1, 0)]) * p.eps;
    ComplexMatrix::from_row_major(2, 2, vec![x[(0, 0)], off, off, x[(1, 1)]])
}

/// `omega` is positive iff `|eps| <= 1/2`.
pub fn omega_is_positive(p: &OmegaParams) -> bool {
    p.eps.abs() <= 0.5
}

/// The CP + coCP split `(C_psi1, C_psi2)` with the diagonal halved between the
/// two parts. `C_psi1` is PSD and `C_psi2` has PSD partial transpose.
pub fn omega_split(p: &OmegaParams) -> Result<(ChoiMatrix, ChoiMatrix)> {
    if !omega_is_positive(p) {
        return Err(Error::InvalidParameter(format!(
            "omega split needs |eps| <= 1/2, got {}",
            p.eps
        )));
    }
    let e = p.eps;
    let cp = choi4([
        [0.5, 0.0, 0.0, e],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [e, 0.0, 0.0, 0.5],
    ]);
    let ccp = choi4([
        [0.5, 0.0, 0.0, 0.0],
        [0.0, 0.0, e, 0.0],
        [0.0, e, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.5],
    ]);
    Ok((cp, ccp))
}
