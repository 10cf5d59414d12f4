use thiserror::Error;

/// Errors raised while validating inputs or evaluating quantities.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("entry count {len} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{what} is not Hermitian: max asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian {
        what: &'static str,
        asymmetry: f64,
        tolerance: f64,
    },
    #[error("{what} is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { what: &'static str, eigenvalue: f64 },
    #[error("density operator trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("{what} is not unitary: deviation {deviation:e}")]
    NotUnitary { what: &'static str, deviation: f64 },
    #[error("{what} is not normalized: norm {norm}")]
    NotNormalized { what: &'static str, norm: f64 },
    #[error("joint observables do not commute: ||[A, B]||_F = {norm:e} exceeds {tolerance:e}")]
    NotCommuting { norm: f64, tolerance: f64 },
    #[error("{what} has imaginary residue {residue:e}")]
    ImaginaryResidue { what: &'static str, residue: f64 },
    #[error("negative radicand {value:e} in {what}: inconsistent input")]
    NegativeRadicand { what: &'static str, value: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("composite dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(
    context: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
