//! Exact and certified-numeric arithmetic: Gaussian rationals, balls,
//! truncated power series in `x`, polynomials in `y` over those series and
//! sparse bivariate polynomials.

mod ball;
mod bipoly;
mod gaussian;
pub mod numroots;
mod rational;
pub mod roots;
mod scalar;
mod series;
pub mod upoly;
mod ypoly;

pub use ball::{precision_bits, ComplexBall, RealBall};
pub use bipoly::BiPoly;
pub use gaussian::GaussianRational;
pub use rational::{ceil_div, format_rational, parse_rational, rat, Rational};
pub use scalar::{Scalar, Undecided, ZeroTest};
pub use series::{Series, Valuation};
pub use ypoly::YPoly;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("coefficients beyond the truncation order are needed (truncation {0})")]
    Inconclusive(usize),
    #[error("divisor is not monic in y with a unit leading coefficient")]
    NotMonic,
    #[error("division by zero")]
    DivisionByZero,
    #[error("numeric coefficient could not be certified zero or nonzero")]
    Undecided,
}

impl From<Undecided> for AlgebraError {
    fn from(_: Undecided) -> Self {
        AlgebraError::Undecided
    }
}
