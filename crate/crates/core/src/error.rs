use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    InvalidModulus,
    #[error("{what} exceeds the configured limit of {limit}")]
    ResourceLimit { what: &'static str, limit: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0}")]
    WrongOperation(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("iteration of z from {start} did not reach a fixed point within {steps} steps")]
    NonTermination { start: u64, steps: usize },
    #[error("class A_{0} is empty, so it has no minimum")]
    UndefinedMinimum(u64),
    #[error("methods disagree at n = {n}: {detail}")]
    Mismatch { n: u64, detail: String },
    #[error("malformed cache file at line {line}: {reason}")]
    Cache { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
