//! Built-in case-study suites.

pub mod elementary;
pub mod factorization;
pub mod fourier;
pub mod notation;
pub mod vm;
