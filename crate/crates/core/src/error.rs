use thiserror::Error;

/// Errors raised by the simulator and the closed-form evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input is outside the range the model is defined for.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    /// The inputs are individually valid but the formula or search has no
    /// meaningful value for them.
    #[error("domain error: {0}")]
    Domain(String),
    /// A threshold search could not bracket its target.
    #[error("search error: {0}")]
    Search(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
