use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A precondition on an argument does not hold.
    InvalidArgument(String),
    /// The operation is not defined for this model.
    UnsupportedOperation(String),
    /// Every sampled density value was zero.
    DegenerateDensity { fingerprint: u64, detail: String },
    /// An exact computation would exceed its enumeration budget.
    ResourceExhausted(String),
    /// The integrator produced a non-finite state.
    BlowUp { last_good_time: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedOperation(msg.into())
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::UnsupportedOperation(_) => "unsupported-operation",
            Error::DegenerateDensity { .. } => "degenerate-density",
            Error::ResourceExhausted(_) => "resource-exhausted",
            Error::BlowUp { .. } => "blow-up",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::UnsupportedOperation(m) => write!(f, "unsupported operation: {m}"),
            Error::DegenerateDensity { fingerprint, detail } => write!(
                f,
                "degenerate density: all weights are zero for config {fingerprint:016x} ({detail})"
            ),
            Error::ResourceExhausted(m) => {
                write!(f, "pairing budget exceeded: {m}; fall back to Monte Carlo")
            }
            Error::BlowUp { last_good_time } => write!(
                f,
                "non-finite state after t = {last_good_time}; reduce the time step"
            ),
        }
    }
}

impl core::error::Error for Error {}
