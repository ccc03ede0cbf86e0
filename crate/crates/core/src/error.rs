//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the geometry, transform, inversion and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("outside the admissible domain: {0}")]
    Domain(String),

    #[error("|lambda| = {0:e} is too close to zero")]
    SingularLambda(f64),

    #[error("degenerate field: |rho| = {0:e}")]
    DegenerateField(f64),

    #[error("contour winding {value} is not integer-close (distance {distance:e}) after {nodes} nodes")]
    NonIntegerWinding { value: f64, distance: f64, nodes: usize },

    #[error("zero cluster near {re}{im:+}i did not converge")]
    ZeroClusterUnresolved { re: f64, im: f64 },

    #[error("ratio is not a finite Blaschke product: |zeta| = {0}")]
    NotBlaschke(f64),

    #[error("finite-difference stencil leaves the sampled region")]
    GridBoundary,

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("family `{family}` is not of type H: failed {failed}")]
    TypeHViolation { family: String, failed: String },

    #[error("points lie on a common complexified characteristic (|ds| = {0:e})")]
    OnCharacteristic(f64),

    #[error("extrapolation did not converge: gap {gap:e} exceeds {limit:e}")]
    NonConvergent { gap: f64, limit: f64 },

    #[error("unknown curve family `{0}`")]
    UnknownFamily(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::SingularLambda(_) => "SingularLambda",
            Error::DegenerateField(_) => "DegenerateField",
            Error::NonIntegerWinding { .. } => "NonIntegerWinding",
            Error::ZeroClusterUnresolved { .. } => "ZeroClusterUnresolved",
            Error::NotBlaschke(_) => "NotBlaschke",
            Error::GridBoundary => "GridBoundary",
            Error::SupportViolation(_) => "SupportViolation",
            Error::GridMismatch(_) => "GridMismatch",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::TypeHViolation { .. } => "TypeHViolation",
            Error::OnCharacteristic(_) => "OnCharacteristic",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::UnknownFamily(_) => "UnknownFamily",
            Error::Config(_) => "ConfigError",
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::SupportViolation(_)
                | Error::GridMismatch(_)
                | Error::InvalidGrid(_)
                | Error::UnknownFamily(_)
                | Error::Config(_)
                | Error::Format(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }

    /// Process exit status: 2 for validation errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            3
        }
    }
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
