use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("jet caps differ: ({0}, {1}) vs ({2}, {3})")]
    CapMismatch(usize, usize, usize, usize),
    #[error("index (eps^{i}, Z^{j}) outside caps ({d_cap}, {z_cap})")]
    IndexOutOfRange { i: usize, j: usize, d_cap: usize, z_cap: usize },
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("exponential needs a nilpotent argument: {0}")]
    NotNilpotent(String),
    #[error("invalid manifold spec: {0}")]
    InvalidSpec(String),
    #[error("validation flag {0} failed")]
    FlagFailed(&'static str),
    #[error("tau must lie in the upper half plane (Im tau = {0})")]
    NotUpperHalfPlane(f64),
    #[error("truncation too short: need cut >= {need}, have {have}")]
    InsufficientCut { need: i64, have: i64 },
    #[error("not a weight {weight} modular form: mismatch at q^{order}")]
    NotInSpan { weight: i64, order: i64 },
    #[error("space is zero")]
    ZeroSpace(i64),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
