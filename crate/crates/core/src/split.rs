//! CP + coCP splitting `C = P + Q^Γ` with `P, Q ⪰ 0`, and the peel-then-split
//! pipeline for 2-positive maps on `M_3`.
//!
//! The split is found by Dykstra's alternating projections between the affine
//! set `{(P, Q) : P + Q^Γ = C}` and the cone `PSD × PSD`.

use crate::choi::{lift, ChoiMatrix, LiftIndexSet};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, hermitize, min_eigenvalue, ComplexMatrix};
use crate::peel::{peel_once, select_pivot, DEFAULT_PEEL_TOL};
use crate::positivity::{check_k_positive, SeesawOptions, DEFAULT_REFUTE_TOL};
use crate::random::{random_hermitian, seeded};

/// Gap improvement below which a stall window counts as stalled.
const STALL_IMPROVEMENT: f64 = 1e-14;

/// Relative size of the perturbation used for the single retry.
const RETRY_PERTURBATION: f64 = 1e-3;

/// Eigenvalue margins tried in turn, relative to `||C|| / (mn)`. A positive
/// margin aims at an interior point, which the iteration reaches quickly;
/// the final zero margin handles splits that only exist on the boundary.
const MARGINS: [f64; 3] = [1e-3, 1e-6, 0.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitOptions {
    pub max_iters: usize,
    pub feas_tol: f64,
    pub stall_window: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            feas_tol: 1e-8,
            stall_window: 200,
        }
    }
}

impl SplitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.stall_window == 0 || !(self.feas_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "split options must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `C = P + Q^Γ` with `P` the CP Choi matrix and `Q` the (PSD) partial
/// transpose of the coCP Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub cp: ChoiMatrix,
    pub ccp: ChoiMatrix,
    /// `||C - P - Q^Γ||_F`.
    pub residual: f64,
    pub min_eig_cp: f64,
    pub min_eig_ccp: f64,
    pub iterations: usize,
    /// Distance between the cone iterate and the affine set, per iteration of
    /// the run that produced the result.
    pub gap_history: Vec<f64>,
    /// Whether the first attempt stalled and the solver restarted.
    pub restarted: bool,
}

impl Decomposition {
    /// Builds a decomposition from a CP Choi matrix and a coCP Choi matrix
    /// (whose partial transpose is PSD).
    pub fn from_maps(c: &ChoiMatrix, cp_choi: &ChoiMatrix, ccp_choi: &ChoiMatrix) -> Result<Self> {
        let q = ccp_choi.partial_transpose();
        Self::from_parts(c, cp_choi.clone(), q, 0, Vec::new())
    }

    fn from_parts(
        c: &ChoiMatrix,
        cp: ChoiMatrix,
        ccp: ChoiMatrix,
        iterations: usize,
        gap_history: Vec<f64>,
    ) -> Result<Self> {
        let report = certificates(c, &cp, &ccp)?;
        Ok(Self {
            cp,
            ccp,
            residual: report.0,
            min_eig_cp: report.1,
            min_eig_ccp: report.2,
            iterations,
            gap_history,
            restarted: false,
        })
    }

    /// The coCP part as a Choi matrix, `Q^Γ`.
    pub fn ccp_choi(&self) -> ChoiMatrix {
        self.ccp.partial_transpose()
    }
}

fn certificates(c: &ChoiMatrix, cp: &ChoiMatrix, ccp: &ChoiMatrix) -> Result<(f64, f64, f64)> {
    if (cp.m(), cp.n()) != (c.m(), c.n()) || (ccp.m(), ccp.n()) != (c.m(), c.n()) {
        return Err(Error::DimensionMismatch("decomposition parts differ in shape from the input".into()));
    }
    let back = cp.matrix() + ccp.partial_transpose().matrix();
    let residual = (c.matrix() - &back).norm();
    let min_cp = min_eigenvalue(&hermitize(cp.matrix())?.into_matrix())?;
    let min_ccp = min_eigenvalue(&hermitize(ccp.matrix())?.into_matrix())?;
    Ok((residual, min_cp, min_ccp))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerificationReport {
    pub residual: f64,
    pub min_eig_cp: f64,
    pub min_eig_ccp: f64,
    pub residual_ok: bool,
    pub cp_ok: bool,
    pub ccp_ok: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.residual_ok && self.cp_ok && self.ccp_ok
    }
}

/// Recomputes the reconstruction residual and both minimal eigenvalues from
/// scratch: residual within `tol * max(1, ||C||)`, eigenvalues at least `-tol`.
pub fn verify_decomposition(c: &ChoiMatrix, d: &Decomposition, tol: f64) -> Result<VerificationReport> {
    let (residual, min_eig_cp, min_eig_ccp) = certificates(c, &d.cp, &d.ccp)?;
    Ok(VerificationReport {
        residual,
        min_eig_cp,
        min_eig_ccp,
        residual_ok: residual <= tol * c.norm().max(1.0),
        cp_ok: min_eig_cp >= -tol,
        ccp_ok: min_eig_ccp >= -tol,
    })
}

/// Projection onto `{X : X ⪰ margin I}`.
fn psd_projection(x: &ComplexMatrix, margin: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(&hermitize(x)?)?;
    Ok(hermitize(&eig.reconstruct_with(|l| l.max(margin)))?.into_matrix())
}

struct Run {
    cp: ComplexMatrix,
    ccp: ComplexMatrix,
    iterations: usize,
    gaps: Vec<f64>,
    converged: bool,
}

fn dykstra(
    c: &ComplexMatrix,
    m: usize,
    n: usize,
    start: (ComplexMatrix, ComplexMatrix),
    margin: f64,
    opts: &SplitOptions,
) -> Result<Run> {
    let pt = |x: &ComplexMatrix| crate::linalg::partial_transpose(x, m, n).expect("square blocks");
    let d = c.rows();
    let (mut p, mut q) = start;
    // Dykstra increments for the cone step
    let mut ep = ComplexMatrix::zeros(d, d);
    let mut eq = ComplexMatrix::zeros(d, d);
    let mut gaps = Vec::new();
    for it in 1..=opts.max_iters {
        let yp = &p + &ep;
        let yq = &q + &eq;
        let cp = psd_projection(&yp, margin)?;
        let cq = psd_projection(&yq, margin)?;
        ep = &yp - &cp;
        eq = &yq - &cq;

        let delta = c - &(&cp + &pt(&cq));
        let gap = delta.norm() / std::f64::consts::SQRT_2;
        p = &cp + &delta.scale(0.5);
        q = &cq + &pt(&delta).scale(0.5);
        gaps.push(gap);

        // the affine iterate reconstructs C exactly; accept it once it is PSD to tolerance
        if min_eigenvalue(&p)? >= -opts.feas_tol && min_eigenvalue(&q)? >= -opts.feas_tol {
            return Ok(Run { cp: p, ccp: q, iterations: it, gaps, converged: true });
        }
        let w = opts.stall_window;
        if gaps.len() > w && gaps[gaps.len() - 1 - w] - gap < STALL_IMPROVEMENT * c.norm().max(1.0) {
            break;
        }
    }
    let iterations = gaps.len();
    Ok(Run { cp: p, ccp: q, iterations, gaps, converged: false })
}

/// Seeks `C = P + Q^Γ` with `P, Q ⪰ 0`.
///
/// Inputs that are already CP or coCP are returned as `(C, 0)` or `(0, C^Γ)`.
/// Otherwise the iteration starts from `P = C/2`, `Q = (C/2)^Γ` and returns
/// the first affine iterate whose parts have eigenvalues at least `-feas_tol`,
/// so the reconstruction is exact up to rounding. The cone is first shrunk to
/// `P, Q ⪰ δ I` for a short schedule of margins `δ` ending at zero.
///
/// If every margin stalls or exhausts `max_iters`, one more run starts from a
/// perturbed point; if that fails too the result is [`Error::Infeasible`]
/// with the final gap. Feasible inputs whose only splits sit on the cone
/// boundary can converge too slowly and end up here as well.
pub fn split_cp_ccp(c: &ChoiMatrix, opts: &SplitOptions) -> Result<Decomposition> {
    let h = c.require_hermitian()?;
    opts.validate()?;
    let (m, n) = (c.m(), c.n());
    let zero = ChoiMatrix::zeros(m, n);
    if min_eigenvalue(h.matrix())? >= -opts.feas_tol {
        return Decomposition::from_parts(c, c.clone(), zero, 0, Vec::new());
    }
    let ct = c.partial_transpose();
    if min_eigenvalue(ct.matrix())? >= -opts.feas_tol {
        return Decomposition::from_parts(c, zero, ct, 0, Vec::new());
    }
    let half = h.matrix().scale(0.5);
    let start = (half.clone(), crate::linalg::partial_transpose(&half, m, n)?);
    let unit = c.norm().max(1.0) / (m * n) as f64;
    let mut total = 0;
    let mut run = None;
    for margin in MARGINS {
        let attempt = dykstra(h.matrix(), m, n, start.clone(), margin * unit, opts)?;
        total += attempt.iterations;
        let done = attempt.converged;
        run = Some(attempt);
        if done {
            break;
        }
    }
    let mut run = run.expect("at least one margin");
    let mut restarted = false;
    if !run.converged {
        log::warn!(
            "CP + coCP split stalled after {} iterations at gap {:e}; retrying from a perturbed start",
            total,
            run.gaps.last().copied().unwrap_or(f64::NAN)
        );
        let mut rng = seeded(0);
        let noise = random_hermitian(&mut rng, m * n).into_matrix();
        let noise = noise.scale(RETRY_PERTURBATION * c.norm().max(1.0) / noise.norm().max(1e-300));
        let p0 = &half + &noise;
        let q0 = crate::linalg::partial_transpose(&(h.matrix() - &p0), m, n)?;
        run = dykstra(h.matrix(), m, n, (p0, q0), 0.0, opts)?;
        total += run.iterations;
        restarted = true;
    }
    run.iterations = total;
    if !run.converged {
        return Err(Error::Infeasible {
            gap: run.gaps.last().copied().unwrap_or(f64::NAN),
            iterations: run.iterations,
        });
    }
    let mut d = Decomposition::from_parts(
        c,
        ChoiMatrix::new(m, n, run.cp)?,
        ChoiMatrix::new(m, n, run.ccp)?,
        run.iterations,
        run.gaps,
    )?;
    d.restarted = restarted;
    Ok(d)
}

/// Options for the `M_3` pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub split: SplitOptions,
    pub seesaw: SeesawOptions,
    pub refute_tol: f64,
    pub peel_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            split: SplitOptions::default(),
            seesaw: SeesawOptions::default(),
            refute_tol: DEFAULT_REFUTE_TOL,
            peel_tol: DEFAULT_PEEL_TOL,
        }
    }
}

/// CP + coCP decomposition of a 2-positive map `M_3 -> M_3`.
///
/// Screens the input with a k = 2 see-saw search, peels off a CP part at the
/// largest diagonal block, splits the `M_2 -> M_3` remainder and lifts that
/// split back. The result is verified before it is returned.
pub fn decompose_2positive_3x3(c: &ChoiMatrix, opts: &PipelineOptions) -> Result<Decomposition> {
    if (c.m(), c.n()) != (3, 3) {
        return Err(Error::DimensionMismatch(format!(
            "pipeline needs a map M_3 -> M_3, got M_{} -> M_{}",
            c.m(),
            c.n()
        )));
    }
    let verdict = check_k_positive(c, 2, &opts.seesaw, opts.refute_tol)?;
    if verdict.is_refuted() {
        return Err(Error::RefutedInput { value: verdict.min_value_found });
    }
    let p = select_pivot(c, opts.peel_tol)?;
    let peeled = peel_once(c, p, opts.peel_tol)?;
    let inner = split_cp_ccp(&peeled.unlifted, &opts.split)?;
    let set = LiftIndexSet::new(3, vec![p])?;
    let cp = peeled.cp_part.add(&lift(&inner.cp, &set)?)?;
    let ccp = lift(&inner.ccp, &set)?;
    let mut d = Decomposition::from_parts(c, cp, ccp, inner.iterations, inner.gap_history)?;
    d.restarted = inner.restarted;
    let report = verify_decomposition(c, &d, opts.split.feas_tol)?;
    if !report.passed() {
        return Err(Error::VerificationFailed(format!(
            "residual {:e}, min eigenvalues {:e} / {:e}",
            report.residual, report.min_eig_cp, report.min_eig_ccp
        )));
    }
    Ok(d)
}

/// Mirror of [`decompose_2positive_3x3`] for 2-copositive maps: decomposes
/// `C^Γ` and exchanges the roles of the two parts.
pub fn decompose_2copositive_3x3(c: &ChoiMatrix, opts: &PipelineOptions) -> Result<Decomposition> {
    let d = decompose_2positive_3x3(&c.partial_transpose(), opts)?;
    Decomposition::from_parts(c, d.ccp, d.cp, d.iterations, d.gap_history).map(|mut out| {
        out.restarted = d.restarted;
        out
    })
}
