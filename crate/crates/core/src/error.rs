use std::path::PathBuf;

use crate::zint::GInt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arithmetic overflow: norm or coordinate exceeds the 63-bit bound")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} requires a nonzero argument")]
    Zero(&'static str),
    #[error("{0} is not coprime to 1+i")]
    EvenModulus(GInt),
    #[error("{0} is not primary")]
    NotPrimary(GInt),
    #[error("{0} is not a prime of odd norm")]
    NotPrime(GInt),
    #[error("power residue of {a} modulo {p} matched no fourth root of unity")]
    OracleMismatch { a: GInt, p: GInt },
    #[error("{0} is not coprime to 1+i")]
    EvenParameter(GInt),
    #[error("{0} is not square-free")]
    NotSquarefree(GInt),
    #[error("modulus norm {norm} exceeds the enumeration limit {limit}")]
    ModulusTooLarge { norm: u64, limit: u64 },
    #[error("prime table covers norms up to {have} but {needed} is required")]
    PrimeCutoff { needed: u64, have: u64 },
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },
    #[error("transform tail does not fall below {eps:e} before t = {t_max}")]
    TailNotAchievable { eps: f64, t_max: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cache file {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
