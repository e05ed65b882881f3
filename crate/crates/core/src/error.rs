use thiserror::Error;

/// Errors raised by the physics library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} s lies outside the trajectory domain [{start}, {end}] s")]
    OutsideTimeDomain { t: f64, start: f64, end: f64 },

    #[error("interferometer is not closed in phase space: dz = {dz:e} m, dv = {dv:e} m/s")]
    NotClosed { dz: f64, dv: f64 },

    #[error("{0} is only defined for the Mach-Zehnder geometry")]
    NotMachZehnder(&'static str),

    #[error("unknown perturbation term `{0}`")]
    UnknownTerm(String),

    #[error("quadrature did not reach tolerance after {subdivisions} subdivisions: {estimate:e} +/- {error:e}")]
    NotConverged {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Fails with `InvalidParameter` unless `value` is finite.
pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
