//! Certification of logarithmic complete monotonicity, Bernstein and
//! monotonicity properties for ratios of products of gamma and q-gamma
//! functions with linear arguments.
//!
//! The library is organized around [`ratio::RatioSpec`], a description of
//! the ratio under study. The q-case (`0 < q < 1`) is decided through
//! discrete lattice measures ([`qlattice`], [`qmonotone`]); the classical
//! case through the elementary kernel `Q(u)` and a family of
//! sufficient-condition checkers ([`classical`]). The [`oracle`] module is
//! an independent numerical falsifier based on alternating finite
//! differences.

pub mod classical;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod qlattice;
pub mod qmonotone;
pub mod ratio;
pub mod report;
pub mod specfun;
pub mod verdict;

pub use error::{CertError, Result};
pub use exact::Rational;
pub use ratio::{GammaFactor, Mode, RatioSpec};
pub use specfun::{EvalConfig, QParam};
pub use verdict::{Status, Verdict, Witness};
