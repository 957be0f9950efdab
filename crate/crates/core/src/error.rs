use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (supported: 1, 2)")]
    UnsupportedDimension(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gaussian under-resolved: only {nodes} nodes within one width of the center (need 8)")]
    UnderResolved { nodes: usize },
    #[error("support overflow: {lost_fraction:.3e} of the L2 mass leaves the grid")]
    SupportOverflow { lost_fraction: f64 },
    #[error("fractional derivative of order {order} is singular: |f(0)| = {value:.3e}")]
    Singularity { order: f64, value: f64 },
    #[error("zero trial function")]
    ZeroFunction,
    #[error("exponent p = {p} outside the open interval ({lo}, {hi})")]
    ExponentRange { p: f64, lo: f64, hi: f64 },
    #[error("degenerate direction: xi + eta = 0")]
    DegenerateDirection,
    #[error("pole at xi = -eta")]
    Pole,
    #[error("angle condition violated: {lhs:.6} > theta_bar = {theta_bar:.6}")]
    AngleCondition { lhs: f64, theta_bar: f64 },
    #[error("root finding failed along direction {direction:?}")]
    RootFinding { direction: Vec<f64> },
    #[error("translation {shift} exceeds the spatial half-box {half_box}")]
    GridOverflow { shift: f64, half_box: f64 },
    #[error("time box is empty: the field leaves the periodic box immediately")]
    EmptyTimeBox,
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
