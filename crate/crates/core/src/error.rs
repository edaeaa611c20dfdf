use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap { what: String, needed: u128, cap: u128 },
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
