//! Command-line front end for the `posmap` library.
//!
//! Exit codes: 0 success (certified or unrefuted), 1 negative outcome
//! (refuted, not 2-positive, infeasible), 2 usage or input error. Reports go to
//! stdout as JSON, diagnostics to stderr. Block indices in reports are 1-based.

pub mod document;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use posmap::choi::{identity_choi, pair, transpose_choi, ChoiMatrix};
use posmap::families::{gchoi_choi, omega_choi, GChoiParams, OmegaParams};
use posmap::linalg::C64;
use posmap::peel::{peel_once, select_pivot, DEFAULT_PEEL_TOL};
use posmap::positivity::{
    check_k_copositive, check_k_positive, SeesawOptions, VerdictKind, DEFAULT_REFUTE_TOL,
};
use posmap::split::{
    decompose_2copositive_3x3, decompose_2positive_3x3, split_cp_ccp, verify_decomposition,
    Decomposition, PipelineOptions, SplitOptions,
};
use posmap::states::{default_ensemble_size, is_ppt, schmidt_number_upper, schmidt_rank};
use posmap::Error;
use serde_json::{json, Value};

use crate::document::{DocumentError, Kind, MatrixDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "posmap", version, about = "Positivity checks, peel-off and CP + coCP splitting of linear maps")]
pub struct Cli {
    /// Tolerance override for the selected command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for every randomized step.
    #[arg(long, global = true, env = "POSMAP_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gchoi,
    Omega,
    Identity,
    Transpose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(name = "2pos")]
    TwoPositive,
    #[value(name = "2copos")]
    TwoCopositive,
    Feasibility,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the Choi matrix of a named map.
    Gen {
        family: Family,
        /// Diagonal weight of `gchoi` (a >= 1).
        #[arg(long)]
        a: Option<f64>,
        /// Second weight of `gchoi`.
        #[arg(long)]
        b: Option<f64>,
        /// Third weight of `gchoi`.
        #[arg(long)]
        c: Option<f64>,
        /// Parameter of `omega`.
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<f64>,
        /// Dimension for `identity` and `transpose`.
        #[arg(long)]
        m: Option<usize>,
        /// Same as `--m`; if both are given they must agree.
        #[arg(long)]
        n: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check k-positivity (or k-copositivity) of a Choi matrix.
    Check {
        /// Choi document.
        input: PathBuf,
        /// Positivity order to test.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Test the partial transpose instead.
        #[arg(long)]
        copositive: bool,
        /// See-saw restarts.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Peel a CP part off a Choi matrix.
    Peel {
        /// Choi document.
        input: PathBuf,
        /// `auto` or a 1-based block index.
        #[arg(long, default_value = "auto")]
        pivot: String,
        /// Writes `<prefix>_cp.json`, `<prefix>_remainder.json`, `<prefix>_unlifted.json`.
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Split a Choi matrix into CP and coCP parts.
    Decompose {
        /// Choi document.
        input: PathBuf,
        /// `2pos` and `2copos` run the peel-then-split pipeline on `M_3`;
        /// `feasibility` runs the split directly.
        #[arg(long, value_enum, default_value = "feasibility")]
        mode: Mode,
        /// Iteration cap for each splitting run.
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Writes `<prefix>_P.json`, `<prefix>_Q.json`, `<prefix>_certificate.json`.
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Pairing of a state (density, matrix or vector document) with a map.
    Pair {
        /// Density, matrix or vector document.
        state: PathBuf,
        /// Choi document.
        map: PathBuf,
    },
    /// Schmidt rank of a vector, or PPT test and Schmidt-number certificate of a state.
    Schmidt {
        /// Vector or density document.
        input: PathBuf,
        /// Treat the input as a vector (the default for vector documents).
        #[arg(long, conflicts_with = "density")]
        vector: bool,
        /// Treat the input as a state.
        #[arg(long)]
        density: bool,
        /// Schmidt rank bound for the ensemble search.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

/// What a command produced: text for stdout, the JSON report and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn report(report: Value, code: i32) -> Self {
        let stdout = serde_json::to_string_pretty(&report).expect("json");
        Self { stdout, report, code }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    pub report: Option<Value>,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into(), report: None }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::usage(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let report = match &e {
            Error::NotTwoPositive { round, block, residual } => Some(json!({
                "status": "not_two_positive",
                "round": round,
                "block": [block.0 + 1, block.1 + 1],
                "residual": residual,
            })),
            Error::RefutedInput { value } => Some(json!({"status": "refuted", "min_value": value})),
            Error::Infeasible { gap, iterations } => {
                Some(json!({"status": "infeasible", "gap": gap, "iterations": iterations}))
            }
            Error::VerificationFailed(msg) => Some(json!({"status": "verification_failed", "detail": msg})),
            _ => None,
        };
        let code = if report.is_some() { EXIT_NEGATIVE } else { EXIT_USAGE };
        let message = match &e {
            Error::NotTwoPositive { round, block, residual } => format!(
                "block ({}, {}) in the pivot row of the remainder has norm {residual:e} in peel round {round}: input is not 2-positive",
                block.0 + 1,
                block.1 + 1
            ),
            _ => e.to_string(),
        };
        CliError { code, message, report }
    }
}

fn write_doc(doc: &MatrixDocument, path: &Path) -> Result<String, CliError> {
    doc.write(path)?;
    Ok(path.display().to_string())
}

fn read_choi(path: &Path) -> Result<ChoiMatrix, CliError> {
    Ok(MatrixDocument::read(path)?.to_choi()?)
}

fn amplitudes_json(z: &[C64]) -> Value {
    json!({
        "re": z.iter().map(|x| x.re).collect::<Vec<_>>(),
        "im": z.iter().map(|x| x.im).collect::<Vec<_>>(),
    })
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::usage(format!("--{name} is required for this family")))
}

fn square_dim(m: Option<usize>, n: Option<usize>) -> Result<usize, CliError> {
    match (m, n) {
        (Some(m), Some(n)) if m != n => Err(CliError::usage("--m and --n must agree for this family")),
        (Some(d), _) | (_, Some(d)) if d > 0 => Ok(d),
        (None, None) => Err(CliError::usage("--n is required for this family")),
        _ => Err(CliError::usage("dimension must be positive")),
    }
}

fn cmd_gen(family: Family, a: Option<f64>, b: Option<f64>, c: Option<f64>, eps: Option<f64>,
           m: Option<usize>, n: Option<usize>, out: Option<&Path>) -> Result<Outcome, CliError> {
    let choi = match family {
        Family::Gchoi => {
            let p = GChoiParams::new(require("a", a)?, require("b", b)?, require("c", c)?)?;
            gchoi_choi(&p)
        }
        Family::Omega => omega_choi(&OmegaParams::new(require("eps", eps)?)?),
        Family::Identity => identity_choi(square_dim(m, n)?),
        Family::Transpose => transpose_choi(square_dim(m, n)?),
    };
    let doc = MatrixDocument::from_choi(&choi);
    match out {
        Some(path) => {
            let file = write_doc(&doc, path)?;
            Ok(Outcome::report(json!({"status": "ok", "file": file, "m": choi.m(), "n": choi.n()}), EXIT_OK))
        }
        None => {
            let report = serde_json::from_str(&doc.to_json()).expect("valid json");
            Ok(Outcome { stdout: doc.to_json(), report, code: EXIT_OK })
        }
    }
}

fn cmd_check(input: &Path, k: usize, copositive: bool, restarts: usize, tol: f64, seed: u64)
    -> Result<Outcome, CliError> {
    let c = read_choi(input)?;
    let opts = SeesawOptions { restarts, rng_seed: seed, ..SeesawOptions::default() };
    let v = if copositive {
        check_k_copositive(&c, k, &opts, tol)?
    } else {
        check_k_positive(&c, k, &opts, tol)?
    };
    let kind = match v.kind {
        VerdictKind::CertifiedExact => "certified_exact",
        VerdictKind::HeuristicUnrefuted => "heuristic_unrefuted",
        VerdictKind::Refuted => "refuted",
    };
    let report = json!({
        "verdict": kind,
        "property": if copositive { "k-copositive" } else { "k-positive" },
        "k": v.k,
        "min_value": v.min_value_found,
        "witness": v.witness.as_ref().map(|z| amplitudes_json(z.amplitudes())),
        "restarts_used": v.restarts_used,
        "seed": seed,
    });
    Ok(Outcome::report(report, if v.is_refuted() { EXIT_NEGATIVE } else { EXIT_OK }))
}

fn cmd_peel(input: &Path, pivot: &str, prefix: Option<&str>, tol: f64) -> Result<Outcome, CliError> {
    let c = read_choi(input)?;
    let p = if pivot == "auto" {
        select_pivot(&c, tol)?
    } else {
        let p: usize = pivot
            .parse()
            .map_err(|_| CliError::usage(format!("--pivot must be `auto` or a 1-based index, got {pivot:?}")))?;
        if p == 0 || p > c.m() {
            return Err(CliError::usage(format!("--pivot {p} outside 1..={}", c.m())));
        }
        p - 1
    };
    let res = peel_once(&c, p, tol)?;
    let mut files = Vec::new();
    if let Some(prefix) = prefix {
        for (suffix, part) in [("cp", &res.cp_part), ("remainder", &res.remainder), ("unlifted", &res.unlifted)] {
            files.push(write_doc(&MatrixDocument::from_choi(part), Path::new(&format!("{prefix}_{suffix}.json")))?);
        }
    }
    let report = json!({
        "status": "ok",
        "pivot": p + 1,
        "row_residual": res.row_residual,
        "lift_set": res.lift_set.indices().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "unlifted_m": res.unlifted.m(),
        "files": files,
    });
    Ok(Outcome::report(report, EXIT_OK))
}

fn cmd_decompose(input: &Path, mode: Mode, max_iter: usize, prefix: Option<&str>, tol: f64, seed: u64)
    -> Result<Outcome, CliError> {
    let c = read_choi(input)?;
    let split = SplitOptions { max_iters: max_iter, feas_tol: tol, ..SplitOptions::default() };
    let pipeline = PipelineOptions {
        split,
        seesaw: SeesawOptions::with_seed(seed),
        ..PipelineOptions::default()
    };
    let d: Decomposition = match mode {
        Mode::TwoPositive => decompose_2positive_3x3(&c, &pipeline)?,
        Mode::TwoCopositive => decompose_2copositive_3x3(&c, &pipeline)?,
        Mode::Feasibility => split_cp_ccp(&c, &split)?,
    };
    let report = verify_decomposition(&c, &d, tol)?;
    let certificate = json!({
        "status": if report.passed() { "ok" } else { "verification_failed" },
        "residual": report.residual,
        "min_eig_cp": report.min_eig_cp,
        "min_eig_ccp": report.min_eig_ccp,
        "residual_ok": report.residual_ok,
        "cp_ok": report.cp_ok,
        "ccp_ok": report.ccp_ok,
        "iterations": d.iterations,
        "restarted": d.restarted,
    });
    let mut files = Vec::new();
    if let Some(prefix) = prefix {
        files.push(write_doc(&MatrixDocument::from_choi(&d.cp), Path::new(&format!("{prefix}_P.json")))?);
        files.push(write_doc(&MatrixDocument::from_choi(&d.ccp), Path::new(&format!("{prefix}_Q.json")))?);
        let path = format!("{prefix}_certificate.json");
        std::fs::write(&path, serde_json::to_string_pretty(&certificate).expect("json") + "\n")
            .map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?;
        files.push(path);
    }
    let mut out = certificate;
    out["files"] = json!(files);
    Ok(Outcome::report(out, if report.passed() { EXIT_OK } else { EXIT_NEGATIVE }))
}

fn cmd_pair(state: &Path, map: &Path) -> Result<Outcome, CliError> {
    let doc = MatrixDocument::read(state)?;
    doc.expect_kinds(&[Kind::Density, Kind::Matrix, Kind::Vector])?;
    let a = match doc.kind {
        Kind::Density => doc.to_density()?.matrix().clone(),
        Kind::Vector => doc.to_vector()?.projector(),
        _ => doc.to_complex()?,
    };
    let c = read_choi(map)?;
    let p = pair(&a, &c)?;
    Ok(Outcome {
        stdout: format!("{:.14e}", p.value),
        report: json!({"value": p.value, "imag": p.imag}),
        code: EXIT_OK,
    })
}

fn cmd_schmidt(input: &Path, vector: bool, density: bool, k: usize, tol: f64, seed: u64)
    -> Result<Outcome, CliError> {
    let doc = MatrixDocument::read(input)?;
    let as_vector = vector || (!density && doc.kind == Kind::Vector);
    if as_vector {
        let z = doc.to_vector()?;
        let rank = schmidt_rank(&z, posmap::linalg::DEFAULT_RANK_TOL)?;
        return Ok(Outcome::report(json!({"schmidt_rank": rank, "m": z.m(), "n": z.n()}), EXIT_OK));
    }
    let rho = doc.to_density()?;
    let ppt = is_ppt(&rho, posmap::linalg::DEFAULT_PSD_TOL)?;
    let size = default_ensemble_size(&rho);
    let opts = SeesawOptions { restarts: 8, max_iters: 5000, ..SeesawOptions::with_seed(seed) };
    let found = schmidt_number_upper(&rho, k, size, &opts, tol)?;
    let report = json!({
        "ppt": ppt,
        "k": k,
        "certificate_found": found.is_some(),
        "residual": found.as_ref().map(|d| d.residual),
        "ensemble_size": found.as_ref().map(|d| d.vectors.len()),
    });
    Ok(Outcome::report(report, EXIT_OK))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::usage("--tol must be positive"));
        }
    }
    let tol = |default: f64| cli.tol.unwrap_or(default);
    match &cli.command {
        Command::Gen { family, a, b, c, eps, m, n, out } => {
            cmd_gen(*family, *a, *b, *c, *eps, *m, *n, out.as_deref())
        }
        Command::Check { input, k, copositive, restarts } => {
            cmd_check(input, *k, *copositive, *restarts, tol(DEFAULT_REFUTE_TOL), cli.seed)
        }
        Command::Peel { input, pivot, out_prefix } => {
            cmd_peel(input, pivot, out_prefix.as_deref(), tol(DEFAULT_PEEL_TOL))
        }
        Command::Decompose { input, mode, max_iter, out_prefix } => {
            cmd_decompose(input, *mode, *max_iter, out_prefix.as_deref(), tol(1e-8), cli.seed)
        }
        Command::Pair { state, map } => cmd_pair(state, map),
        Command::Schmidt { input, vector, density, k } => {
            cmd_schmidt(input, *vector, *density, *k, tol(1e-8), cli.seed)
        }
    }
}
