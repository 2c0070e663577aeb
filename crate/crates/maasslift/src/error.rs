use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("horizon too small: need exponent {needed}, series known up to {have}")]
    Horizon { needed: i64, have: i64 },
    #[error("no such form: {0}")]
    NoSuchForm(String),
    #[error("incompatible series: {0}")]
    Incompatible(String),
    #[error("numeric budget exhausted: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
