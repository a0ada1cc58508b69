//! Floating-point verification harness: one-variable quadrature identities
//! and a dyadic-annulus integration oracle for local `L^p` membership.

pub mod numverify;
pub mod onevar;
pub mod quad;
