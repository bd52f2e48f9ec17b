use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operation was called outside its domain (mismatched sets, wrong
    /// functor, a value outside a carrier, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A carrier or intermediate enumeration would exceed the configured
    /// safety bound.
    #[error("resource bound: {what} would have {size} elements, exceeding the carrier limit of {limit}")]
    CarrierLimit {
        what: String,
        size: String,
        limit: usize,
    },

    /// An internal invariant was broken, e.g. a functor instance produced a
    /// value outside its own carrier.
    #[error("invariant failure: {0}")]
    Invariant(String),

    /// Malformed canonical text or model input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::CarrierLimit { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
