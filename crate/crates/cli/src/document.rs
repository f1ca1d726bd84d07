//! JSON matrix documents with split real/imaginary grids.
//!
//! Floats are written with 17 significant digits, so a write/read cycle
//! reproduces every `f64` bit for bit.

use std::fmt;
use std::path::Path;

use posmap::choi::ChoiMatrix;
use posmap::linalg::{c64, ComplexMatrix};
use posmap::states::{BipartiteVector, DensityMatrix};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// `mn x mn` Choi matrix of a map `M_m -> M_n`.
    Choi,
    /// `mn x mn` state on `C^m ⊗ C^n`.
    Density,
    /// Any square matrix.
    Matrix,
    /// Vector in `C^m ⊗ C^n` stored as its `m x n` coefficient grid.
    Vector,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Choi => "choi",
            Kind::Density => "density",
            Kind::Matrix => "matrix",
            Kind::Vector => "vector",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentError(pub String);

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DocumentError {}

fn err<T>(msg: impl Into<String>) -> Result<T, DocumentError> {
    Err(DocumentError(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct MatrixDocument {
    pub schema_version: String,
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

struct Sig17(f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
struct Wire<'a> {
    schema_version: &'a str,
    kind: Kind,
    m: usize,
    n: usize,
    re: Vec<Vec<Sig17>>,
    im: Vec<Vec<Sig17>>,
}

fn grid(rows: &[Vec<f64>]) -> Vec<Vec<Sig17>> {
    rows.iter().map(|r| r.iter().map(|&x| Sig17(x)).collect()).collect()
}

impl MatrixDocument {
    fn from_complex(kind: Kind, m: usize, n: usize, a: &ComplexMatrix) -> Self {
        let re = (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].re).collect()).collect();
        let im = (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].im).collect()).collect();
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            kind,
            m,
            n,
            re,
            im,
        }
    }

    pub fn from_choi(c: &ChoiMatrix) -> Self {
        Self::from_complex(Kind::Choi, c.m(), c.n(), c.matrix())
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self::from_complex(Kind::Density, rho.m(), rho.n(), rho.matrix())
    }

    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        Self::from_complex(Kind::Matrix, a.rows(), a.cols(), a)
    }

    pub fn from_vector(z: &BipartiteVector) -> Self {
        Self::from_complex(Kind::Vector, z.m(), z.n(), &z.coefficient_matrix())
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return err(format!("unsupported schema_version {:?}", self.schema_version));
        }
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return err("empty matrix grid");
        }
        if self.im.len() != rows
            || self.re.iter().chain(&self.im).any(|r| r.len() != cols)
        {
            return err("re and im must be rectangular grids of the same shape");
        }
        if self.re.iter().chain(&self.im).flatten().any(|x| !x.is_finite()) {
            return err("grid contains non-finite entries");
        }
        let (m, n) = (self.m, self.n);
        match self.kind {
            Kind::Choi | Kind::Density => {
                if m == 0 || n == 0 || rows != m * n || cols != m * n {
                    return err(format!(
                        "{} document with m={m}, n={n} needs a {0}x{0} grid, got {rows}x{cols}",
                        m * n
                    ));
                }
            }
            Kind::Matrix => {
                if rows != cols {
                    return err(format!("matrix document must be square, got {rows}x{cols}"));
                }
            }
            Kind::Vector => {
                if rows != m || cols != n {
                    return err(format!(
                        "vector document with m={m}, n={n} needs an {m}x{n} coefficient grid, got {rows}x{cols}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix, DocumentError> {
        self.validate()?;
        let (rows, cols) = (self.re.len(), self.re[0].len());
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| c64(self.re[i][j], self.im[i][j])))
    }

    pub fn to_choi(&self) -> Result<ChoiMatrix, DocumentError> {
        self.expect_kinds(&[Kind::Choi])?;
        ChoiMatrix::new(self.m, self.n, self.to_complex()?).map_err(|e| DocumentError(e.to_string()))
    }

    pub fn to_density(&self) -> Result<DensityMatrix, DocumentError> {
        self.expect_kinds(&[Kind::Density])?;
        DensityMatrix::new(self.m, self.n, self.to_complex()?).map_err(|e| DocumentError(e.to_string()))
    }

    pub fn to_vector(&self) -> Result<BipartiteVector, DocumentError> {
        self.expect_kinds(&[Kind::Vector])?;
        Ok(BipartiteVector::from_coefficient_matrix(&self.to_complex()?))
    }

    pub fn expect_kinds(&self, kinds: &[Kind]) -> Result<(), DocumentError> {
        if kinds.contains(&self.kind) {
            return Ok(());
        }
        let names: Vec<String> = kinds.iter().map(Kind::to_string).collect();
        err(format!("expected a {} document, got {}", names.join(" or "), self.kind))
    }

    pub fn to_json(&self) -> String {
        let wire = Wire {
            schema_version: &self.schema_version,
            kind: self.kind,
            m: self.m,
            n: self.n,
            re: grid(&self.re),
            im: grid(&self.im),
        };
        serde_json::to_string(&wire).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| DocumentError(format!("malformed document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DocumentError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), DocumentError> {
        self.validate()?;
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| DocumentError(format!("cannot write {}: {e}", path.display())))
    }
}
