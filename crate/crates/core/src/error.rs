use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown domain preset `{0}` (expected square, disk, annulus or lshape)")]
    UnknownPreset(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("ellipticity violated on triangle {triangle}: smallest eigenvalue of a is {min_eigenvalue:e}")]
    Ellipticity { triangle: usize, min_eigenvalue: f64 },

    #[error("spectral gate violated: Dirichlet eigenvalue {eigenvalue:e} is within {tol:e} of zero")]
    SpectralGateViolation { eigenvalue: f64, tol: f64 },

    #[error("Neumann matrix is nearly singular: eigenvalue {eigenvalue:e} is within {tol:e} of zero")]
    NearSingularNeumann { eigenvalue: f64, tol: f64 },

    #[error("singular factorization: pivot {index} is {pivot:e}")]
    SingularFactorization { index: usize, pivot: f64 },

    #[error("symmetric eigensolver did not converge for a {size}x{size} matrix (condition estimate {condition:e})")]
    NonConvergence { size: usize, condition: f64 },

    #[error("mass matrix entry {index} is not strictly positive ({value:e})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("negative time {0:e}")]
    NegativeTime(f64),

    #[error("kernel time must be strictly positive, got {0:e}")]
    NonPositiveTime(f64),

    #[error("resolvent pole: lambda = {lambda:e} is within {gap:e} of -{eigenvalue:e}")]
    ResolventPole { lambda: f64, eigenvalue: f64, gap: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
