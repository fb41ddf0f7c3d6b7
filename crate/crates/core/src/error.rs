//! Error types shared across the solver.

/// Errors reported by flux evaluation, stepping, and diagnostics.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    /// A slope left the admissible flux domain |s| <= 1 - margin. For
    /// spacelike flows this signals loss of the spacelike property.
    #[error("slope {slope} outside flux domain |s| <= {limit} (spacelike property lost)")]
    DomainViolation { slope: f64, limit: f64 },

    /// A value handed to the flux inverse lies outside the attainable range.
    #[error("value {value} outside attainable flux range [{min}, {max}]")]
    RangeViolation { value: f64, min: f64, max: f64 },

    /// The discrete spacelike condition max|du/dx| <= 1 - margin failed.
    #[error("spacelike condition violated at interface {interface} (t = {t}): |{slope}| > {limit}")]
    SpacelikeViolation {
        interface: usize,
        slope: f64,
        limit: f64,
        t: f64,
    },

    /// The tridiagonal solve hit a zero pivot. With v' > 0 and dt > 0 this
    /// cannot happen for a well-formed state; it indicates corruption.
    #[error("singular tridiagonal system: zero pivot in row {row}")]
    SingularSystem { row: usize },

    /// Two grids that must match do not.
    #[error("grid mismatch: {left} nodes vs {right} nodes")]
    GridMismatch { left: usize, right: usize },

    /// The problem description violates a precondition.
    #[error("invalid problem: {0}")]
    Validation(String),

    /// A fit or estimate was requested on too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The time stepper could not make progress (non-finite values or
    /// persistent step rejection).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
