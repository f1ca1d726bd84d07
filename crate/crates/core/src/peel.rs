//! Choi peel-off: `C = U + R` with `U_ij = A_ip A_pp^+ A_pj` completely
//! positive and, for 2-positive input, `R` vanishing on block row and column
//! `p`, so that `R` is the trivial lifting at `{p}` of a smaller map `K`.

use crate::choi::{lift, ChoiMatrix, LiftIndexSet};
use crate::error::{Error, Result};
use crate::linalg::{hermitize, pinv, trace_norm, DEFAULT_RANK_TOL};

/// Default relative tolerance for the pivot row check.
pub const DEFAULT_PEEL_TOL: f64 = 1e-8;

/// Relative band within which diagonal blocks count as tied for the pivot.
const PIVOT_TIE_BAND: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PeelResult {
    pub pivot: usize,
    /// `U`, positive semidefinite and nonzero.
    pub cp_part: ChoiMatrix,
    /// `R = C - U`.
    pub remainder: ChoiMatrix,
    /// `R` with block row and column `pivot` removed.
    pub unlifted: ChoiMatrix,
    pub lift_set: LiftIndexSet,
    /// Largest Frobenius norm of a block in row `pivot` of `R`.
    pub row_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IteratedPeelResult {
    /// CP parts, lifted back to the input space.
    pub cp_parts: Vec<ChoiMatrix>,
    /// Pivots in original block indices, one per part.
    pub pivots: Vec<usize>,
    /// Final unlifted remainder.
    pub remainder: ChoiMatrix,
    /// Positions of the removed blocks in the input space.
    pub lift_set: LiftIndexSet,
}

impl IteratedPeelResult {
    /// `sum cp_parts + lift(remainder, lift_set)`.
    pub fn reconstruct(&self) -> Result<ChoiMatrix> {
        let mut acc = lift(&self.remainder, &self.lift_set)?;
        for part in &self.cp_parts {
            acc = acc.add(part)?;
        }
        Ok(acc)
    }
}

fn select_pivot_scaled(c: &ChoiMatrix, tol: f64, scale: f64) -> Result<usize> {
    let traces: Vec<f64> = (0..c.m()).map(|j| trace_norm(&c.block(j, j))).collect();
    let max = traces.iter().copied().fold(0.0, f64::max);
    if max <= tol * scale || max == 0.0 {
        return Err(Error::ZeroMap);
    }
    Ok(traces
        .iter()
        .position(|&t| t >= max * (1.0 - PIVOT_TIE_BAND))
        .expect("maximum attained"))
}

/// Index of the diagonal block with the largest trace norm, lowest index
/// among ties. Fails with [`Error::ZeroMap`] when every diagonal block is at
/// most `tol * ||C||`.
pub fn select_pivot(c: &ChoiMatrix, tol: f64) -> Result<usize> {
    c.require_hermitian()?;
    select_pivot_scaled(c, tol, c.norm())
}

/// The factorized split `(U, R)` at pivot `p`, without any check on `R`.
pub fn choi_split(c: &ChoiMatrix, p: usize) -> Result<(ChoiMatrix, ChoiMatrix)> {
    let (m, n) = (c.m(), c.n());
    if p >= m {
        return Err(Error::IndexOutOfRange { index: p, limit: m });
    }
    // B = block column p, so U = B A_pp^+ B^*
    let b = c.matrix().submatrix(0, p * n, m * n, n);
    let a_pinv = hermitize(&pinv(&c.block(p, p), DEFAULT_RANK_TOL))?;
    let u = hermitize(&(&(&b * a_pinv.matrix()) * &b.adjoint()))?.into_matrix();
    let r = c.matrix() - &u;
    Ok((ChoiMatrix::new(m, n, u)?, ChoiMatrix::new(m, n, r)?))
}

/// Largest block norm in row `p` of `r`, with its column index.
fn pivot_row_residual(r: &ChoiMatrix, p: usize) -> (f64, usize) {
    let mut worst = (0.0, p);
    for j in 0..r.m() {
        let norm = r.block(p, j).norm().max(r.block(j, p).norm());
        if norm > worst.0 {
            worst = (norm, j);
        }
    }
    worst
}

fn peel_scaled(c: &ChoiMatrix, p: usize, tol: f64, scale: f64, round: usize) -> Result<PeelResult> {
    c.require_hermitian()?;
    let m = c.m();
    if m < 2 {
        return Err(Error::InvalidParameter("peeling needs at least two blocks".into()));
    }
    if p >= m {
        return Err(Error::IndexOutOfRange { index: p, limit: m });
    }
    if c.block(p, p).max_abs() == 0.0 {
        return Err(Error::InvalidParameter(format!("pivot block {p} is zero")));
    }
    let (cp_part, remainder) = choi_split(c, p)?;
    let (row_residual, j) = pivot_row_residual(&remainder, p);
    if row_residual > tol * scale {
        return Err(Error::NotTwoPositive {
            round,
            block: (p.min(j), p.max(j)),
            residual: row_residual,
        });
    }
    let unlifted = remainder.remove_block(p)?;
    Ok(PeelResult {
        pivot: p,
        cp_part,
        remainder,
        unlifted,
        lift_set: LiftIndexSet::new(m, vec![p])?,
        row_residual,
    })
}

/// One peel at pivot `p`. Fails with [`Error::NotTwoPositive`] (round 1) when a
/// block in the pivot row of `R` exceeds `tol * ||C||`.
pub fn peel_once(c: &ChoiMatrix, p: usize, tol: f64) -> Result<PeelResult> {
    peel_scaled(c, p, tol, c.norm(), 1)
}

/// Copositive variant: peels `C^Γ` and transposes every part back, so
/// `cp_part` is completely copositive.
pub fn peel_copositive(c: &ChoiMatrix, p: usize, tol: f64) -> Result<PeelResult> {
    let r = peel_once(&c.partial_transpose(), p, tol)?;
    Ok(PeelResult {
        cp_part: r.cp_part.partial_transpose(),
        remainder: r.remainder.partial_transpose(),
        unlifted: r.unlifted.partial_transpose(),
        ..r
    })
}

/// Peels `k - 1` times, each round at the largest remaining diagonal block.
///
/// All tolerances are relative to the norm of the input. Running out of
/// nonzero diagonal blocks after the first round stops producing parts; the
/// zero remainder is still cut down to input dimension `m - k + 1`.
pub fn peel_iterate(c: &ChoiMatrix, k: usize, tol: f64) -> Result<IteratedPeelResult> {
    c.require_hermitian()?;
    let max = c.m().min(c.n());
    if k < 2 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let scale = c.norm();
    let mut positions: Vec<usize> = (0..c.m()).collect();
    let mut current = c.clone();
    let mut removed = Vec::new();
    let mut cp_parts = Vec::new();
    let mut pivots = Vec::new();
    for round in 1..k {
        let p = match select_pivot_scaled(&current, tol, scale) {
            Ok(p) => p,
            Err(Error::ZeroMap) if round > 1 => {
                // Nothing left to peel; shrink the zero remainder to its final size.
                removed.push(positions.remove(0));
                current = current.remove_block(0)?;
                continue;
            }
            Err(e) => return Err(e),
        };
        let step = peel_scaled(&current, p, tol, scale, round)?;
        let mut outside = removed.clone();
        outside.sort_unstable();
        cp_parts.push(lift(&step.cp_part, &LiftIndexSet::new(c.m(), outside)?)?);
        pivots.push(positions[p]);
        removed.push(positions.remove(p));
        current = step.unlifted;
    }
    removed.sort_unstable();
    Ok(IteratedPeelResult {
        cp_parts,
        pivots,
        remainder: current,
        lift_set: LiftIndexSet::new(c.m(), removed)?,
    })
}
