use alloc::vec::Vec;
use core::fmt;

use crate::problem::Violation;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix argument does not have the length the problem requires.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// The user subproblem has no maximizer: a non-positive price with an unbounded domain.
    UnboundedSubproblem { user: Option<usize>, price: f64 },
    /// An iterative routine hit its iteration cap.
    NonConvergence {
        what: &'static str,
        iterations: u64,
        residual: f64,
    },
    /// The random generator could not produce a matrix without zero rows or columns.
    GeneratorExhausted { attempts: u32 },
    InvalidConfig(&'static str),
    InvalidProblem(Vec<Violation>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::UnboundedSubproblem { user: Some(i), price } => {
                write!(f, "user {i} subproblem is unbounded at price {price}")
            }
            Error::UnboundedSubproblem { user: None, price } => {
                write!(f, "user subproblem is unbounded at price {price}")
            }
            Error::NonConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::GeneratorExhausted { attempts } => write!(
                f,
                "no matrix without zero rows/columns after {attempts} attempts"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidProblem(violations) => {
                write!(f, "invalid problem:")?;
                for v in violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
