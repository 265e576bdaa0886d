use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite component")]
    NonFinite,

    #[error("vector is not lightlike (<x,x> = {0})")]
    NotLightlike(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parameter {0:?} outside chart domain")]
    OutsideDomain(Vec<f64>),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("model is not closed: {0}")]
    NotClosed(String),

    #[error("model does not support this analysis: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
