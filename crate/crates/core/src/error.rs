use alloc::vec::Vec;
use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input fell outside its mathematical domain.
    Domain {
        /// What was being validated.
        what: &'static str,
        /// The offending value.
        value: f64,
    },
    /// A per-station parameter failed validation at scenario construction.
    BadLink {
        index: usize,
        what: &'static str,
        value: f64,
    },
    /// A ratio vector does not match the number of base stations.
    LengthMismatch { expected: usize, actual: usize },
    /// Recovering the optimal pilot ratio produced a value >= 1: the
    /// interior optimum does not exist for this link.
    PilotRatioOutOfRange { alpha: f64 },
    /// The objective did not change sign over the search bracket.
    /// Carries `(input, residual)` samples for diagnosis.
    BracketFailure { samples: Vec<(f64, f64)> },
    /// The objective changed sign more than once over the bracket, so the
    /// root is not unique. Carries `(input, residual)` samples.
    MultipleRoots { samples: Vec<(f64, f64)> },
    /// The iteration cap was reached before the tolerance; `best` is the
    /// last iterate and `residual` its objective value.
    NoConvergence {
        best: f64,
        residual: f64,
        iterations: u32,
    },
    /// The closed-form approximation is invalid for these inputs.
    ApproximationDomain(&'static str),
    /// The rate target cannot be met within the transmit-power limit.
    /// Carries the evaluation at the power ceiling as a certificate.
    RateUnreachable {
        max_power_w: f64,
        achievable_snr: f64,
        achievable_rate_bps: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => {
                write!(f, "{what} out of domain: {value}")
            }
            Error::BadLink { index, what, value } => {
                write!(f, "bs {index}: {what} out of domain: {value}")
            }
            Error::LengthMismatch { expected, actual } => {
                write!(f, "expected {expected} pilot ratios, got {actual}")
            }
            Error::PilotRatioOutOfRange { alpha } => {
                write!(
                    f,
                    "optimal pilot ratio {alpha} falls outside (0,1); no interior optimum exists"
                )
            }
            Error::BracketFailure { samples } => {
                write!(f, "no sign change over the bracket; samples: {samples:?}")
            }
            Error::MultipleRoots { samples } => {
                write!(
                    f,
                    "multiple sign changes over the bracket; samples: {samples:?}"
                )
            }
            Error::NoConvergence {
                best,
                residual,
                iterations,
            } => {
                write!(
                    f,
                    "no convergence after {iterations} iterations; best iterate {best} with residual {residual}"
                )
            }
            Error::ApproximationDomain(detail) => write!(f, "{detail}"),
            Error::RateUnreachable {
                max_power_w,
                achievable_snr,
                achievable_rate_bps,
            } => {
                write!(
                    f,
                    "rate target unreachable: at the {max_power_w} W ceiling the link achieves \
                     SNR {achievable_snr} ({achievable_rate_bps} bit/s)"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
