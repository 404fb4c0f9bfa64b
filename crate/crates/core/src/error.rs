use thiserror::Error;

use crate::operator::OperatorError;
use crate::symrep::SymRepError;
use crate::young::YoungError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error(transparent)]
    SymRep(#[from] SymRepError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("{what} needs about {required} bytes, budget is {limit}")]
    BudgetExceeded { what: &'static str, required: u64, limit: u64 },
    #[error("invalid comb: {0}")]
    InvalidComb(alloc::string::String),
    #[error("invalid argument: {0}")]
    InvalidArgument(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;
