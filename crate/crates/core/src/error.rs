use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("relay field is empty")]
    EmptyField,
    #[error("relay field has {0} relays, at least 2 are required")]
    FieldTooSmall(usize),
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    NoConvergence { subdivisions: usize, error: f64 },
    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    BadBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

impl Error {
    pub(crate) fn domain(function: &'static str, value: f64) -> Self {
        Error::Domain { function, value }
    }

    pub(crate) fn param(name: &'static str, value: f64) -> Self {
        Error::InvalidParameter { name, value }
    }
}
