//! Exact-arithmetic kernel: polynomials over the rationals, rational
//! functions, GCDs, Gröbner bases and solution-set extraction.
//!
//! Everything here is pure and operates on immutable values.

pub mod budget;
mod gcd;
mod generic_point;
pub mod groebner;
pub mod linalg;
mod parse;
mod poly;
mod ratfunc;
mod symbol;
mod triangular;
mod variety;

use thiserror::Error;

pub use budget::{checkpoint, run_bounded, run_limited, Limits};
pub use gcd::{content_in, poly_gcd, primitive_part_in, pseudo_remainder, squarefree_part};
pub use generic_point::GenericPoint;
pub use groebner::{groebner_basis, reduce, OrderKind, TermOrder};
pub use parse::parse_poly;
pub use poly::{rat, ratio, Poly, Rational};
pub use ratfunc::RatFunc;
pub use symbol::{sym, Symbol};
pub use triangular::{solve_triangular, Branch, BranchValue};
pub use variety::{variety_dimension, DimensionReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid symbol name {0:?}")]
    InvalidSymbol(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("expression contains a symbol with no assigned value")]
    UnboundSymbol,
    #[error("the system has no solution")]
    NoSolution,
    #[error("symbolic solutions are not extractable: {0}")]
    NotExtractable(String),
    #[error("computation exceeded its deadline")]
    Timeout,
    #[error("computation exceeded its work limit of {0} steps")]
    WorkLimit(u64),
}
