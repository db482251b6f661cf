use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("spectral parameter {zeta} outside the admissible domain: {reason}")]
    Domain { zeta: Complex64, reason: &'static str },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("phase increment {increment:.3} rad at k = {k:.6e} is ambiguous; refine the grid")]
    GridTooCoarse { k: f64, increment: f64 },

    #[error("winding number {winding:.3} is not close to an integer; contour passes near a zero")]
    ContourThroughZero { winding: f64 },

    #[error("spectrum incomplete: contour counts {expected} zeros but {found} were located")]
    IncompleteSpectrum { expected: usize, found: usize },

    #[error("resonance rank undecidable: singular value ratio {ratio:.3e} inside the ambiguity band (candidates m = {low} or {high})")]
    AmbiguousResonance { ratio: f64, low: usize, high: usize },

    #[error("truncation error {bound:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { bound: f64, tol: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::HypothesisViolation(_) => 2,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}
