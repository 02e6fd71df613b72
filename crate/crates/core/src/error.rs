use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index 0 is not a valid spectral index")]
    ZeroIndex,
    #[error("spectral index {0} appears more than once")]
    DuplicateIndex(i64),
    #[error("equal eigenvalues at indices {first} and {second} of opposite sign")]
    SignConflict { first: i64, second: i64 },
    #[error("multiplicity group at {start} cannot be made contiguous: index {missing} is not in the data window")]
    NonContiguousGroup { start: i64, missing: i64 },
    #[error("no spectral entry for index {0} in either window or tail")]
    IndexMismatch(i64),
    #[error("mean shift mismatch: data omega0 = {data}, model omega0 = {model}")]
    OmegaMismatch { data: Complex64, model: Complex64 },
    #[error("derivative order {order} exceeds supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("non-finite potential value at node {node}")]
    NonFiniteInput { node: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("root near index {index} did not converge (last iterate {last})")]
    RootNotConverged { index: i64, last: Complex64 },
    #[error("winding count around {center} (radius {radius}) is unstable: {coarse} vs {fine}")]
    WindingAmbiguous {
        center: Complex64,
        radius: f64,
        coarse: i64,
        fine: i64,
    },
    #[error("disc search found {found} eigenvalues, expected {expected}")]
    ClusterCount { found: usize, expected: usize },
    #[error("contour around {0} cannot separate it from the rest of the spectrum")]
    PoleTooClose(Complex64),
    #[error("contour of radius {radius} passes through or too close to pole {pole}")]
    ContourTouchesPole { radius: f64, pole: Complex64 },
    #[error("main equation singular at x = {x} (condition estimate {condition:.3e})")]
    SingularSystem { x: f64, condition: f64 },
    #[error("1 + eps1^2 vanishes at x = {x}")]
    DegenerateEps1 { x: f64 },
    #[error("negative delta {0}")]
    NegativeDelta(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Broad category used by the command-line front end for exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RootNotConverged { .. }
            | Error::WindingAmbiguous { .. }
            | Error::ClusterCount { .. }
            | Error::PoleTooClose(_)
            | Error::SingularSystem { .. }
            | Error::DegenerateEps1 { .. } => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}
