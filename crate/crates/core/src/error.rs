use thiserror::Error;

/// Failures raised by field kernels, quadrature and scenario builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point-source field was evaluated at (or within 1e-9 of) its source.
    #[error("field evaluated {distance:e} from a point source")]
    Singularity { distance: f64 },

    /// The flux-string potential only exists outside the magnet.
    #[error("flux-string potential requested at rho = {rho} inside radius {radius}")]
    InsideMagnet { rho: f64, radius: f64 },

    /// An integrand produced NaN or an infinity.
    #[error("integrand returned {value} at abscissa {x}")]
    NonFinite { x: f64, value: f64 },

    /// A path approaches a lattice cell or a source surface too closely.
    #[error("path clearance {clearance} below required {required}")]
    Clearance { clearance: f64, required: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
