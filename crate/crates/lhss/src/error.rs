//! Error type shared across the crate.

use std::fmt;
use std::io;

/// Errors produced by factorizations, eigensolvers, file I/O, generators,
/// and iterative solvers.
#[derive(Debug)]
pub enum Error {
    /// A Cholesky pivot was non-positive; the matrix is not positive definite.
    /// The payload names the matrix that failed (e.g. "W", "alpha*V + W").
    NotPositiveDefinite(String),
    /// A pivot block of an LDL^T factorization (or an LU pivot) was
    /// numerically singular.
    SingularMatrix(String),
    /// A dense eigensolve was requested above the dense dimension cap.
    DimensionTooLarge { n: usize, cap: usize },
    /// Dimensions of two operands disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// A QR-type eigenvalue iteration failed to converge.
    NoConvergence,
    /// A matrix or vector entry is NaN or infinite.
    NotFinite(String),
    /// The right-hand side has zero norm; a relative residual is undefined.
    ZeroRhs,
    /// Matrix Market parse failure at a 1-based line number.
    Parse { line: usize, msg: String },
    /// Matrix Market header kind does not match what the caller required.
    KindMismatch { expected: String, found: String },
    /// Underlying file I/O failure.
    Io(io::Error),
    /// The requested shift left T definite; the payload is the admissible
    /// open interval of shifts.
    NotIndefinite { lo: f64, hi: f64 },
    /// A prescribed-spectrum request is invalid (zero entry, duplicate
    /// within the minimum gap, sign constraint violated, ...).
    SpecViolation(String),
    /// A solver or analysis configuration is invalid (alpha <= 0, ...).
    InvalidConfig(String),
    /// A theorem hypothesis required by the requested analysis does not hold.
    HypothesisViolated(String),
    /// The convergence domain of the requested scheme is empty.
    EmptyDomain(String),
    /// An eigenvalue map was evaluated at an excluded pole.
    PoleError,
    /// Iterative extremal-eigenvalue estimation did not reach its tolerance.
    EstimationFailed(String),
    /// Krylov basis construction broke down before convergence.
    Breakdown(String),
    /// The COCG bilinear form r^T z vanished before convergence.
    BilinearBreakdown,
    /// The preconditioner is not complex symmetric and cannot be used
    /// with COCG.
    PreconditionerNotSymmetric,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPositiveDefinite(what) => {
                write!(f, "matrix is not positive definite: {what}")
            }
            Error::SingularMatrix(what) => write!(f, "matrix is numerically singular: {what}"),
            Error::DimensionTooLarge { n, cap } => {
                write!(f, "dimension {n} exceeds the dense eigensolve cap {cap}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NoConvergence => write!(f, "eigenvalue iteration failed to converge"),
            Error::NotFinite(what) => write!(f, "non-finite entry in {what}"),
            Error::ZeroRhs => write!(f, "right-hand side has zero norm"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::KindMismatch { expected, found } => {
                write!(f, "matrix market kind mismatch: expected {expected}, found {found}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::NotIndefinite { lo, hi } => write!(
                f,
                "shift does not make T indefinite; admissible shifts lie in ({lo:e}, {hi:e})"
            ),
            Error::SpecViolation(msg) => write!(f, "invalid spectrum prescription: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::HypothesisViolated(msg) => write!(f, "theorem hypothesis violated: {msg}"),
            Error::EmptyDomain(msg) => write!(f, "empty convergence domain: {msg}"),
            Error::PoleError => write!(f, "map evaluated at an excluded pole"),
            Error::EstimationFailed(msg) => write!(f, "eigenvalue estimation failed: {msg}"),
            Error::Breakdown(msg) => write!(f, "krylov breakdown: {msg}"),
            Error::BilinearBreakdown => {
                write!(f, "COCG bilinear form r^T z vanished before convergence")
            }
            Error::PreconditionerNotSymmetric => {
                write!(f, "preconditioner is not complex symmetric; COCG requires one")
            }
        }
    }
}

impl std::error::Error for Error {}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
