//! Exact q-expansions of (weakly holomorphic) modular forms of integral and
//! half-integral weight, Hecke operators, binary quadratic forms, numeric
//! Poincaré-series machinery, CM and cycle-integral traces, and the Zagier
//! and Shintani lifts built on top of them.

pub mod arith;
pub mod bqf;
pub mod error;
pub mod hecke;
pub mod lifts;
pub mod numerics;
pub mod qseries;
pub mod traces;

pub use arith::Rational;
pub use error::{Error, Result};
pub use qseries::{Level, PrincipalPart, QSeries};
