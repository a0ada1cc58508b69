//! Exact local analysis of `Q/P` where `P` is a polynomial with no zeros on
//! `R x H` (real first variable, upper half-plane second variable) except
//! at the origin.
//!
//! The crate extracts the local model of `P` at the origin, decides
//! `L^p` membership of `Q/P` from vanishing orders, builds the real
//! branch decomposition of `A + tB` and the monomial bases of the
//! quotients `I^p / (P, P̄)`.

pub mod algebra;
pub mod branches;
pub mod integrability;
pub mod localmodel;
pub mod parse;
pub mod quotient;
pub mod transfer;

pub use algebra::{BiPoly, ComplexBall, GaussianRational, Rational, Scalar, Series, YPoly};
pub use integrability::{Exponent, MembershipReport, Verdict};
pub use localmodel::{BranchDatum, LocalModel};
