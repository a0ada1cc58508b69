//! Library half of the `stablefrac` command: request handling, JSON
//! reporting and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod suite;
