//! S-unit equations over number fields and asymptotic Fermat criteria.
//!
//! The crate solves `lambda + mu = 1` in S-units of a number field, groups
//! solutions into Legendre-curve orbits, evaluates the criteria that decide
//! the asymptotic Fermat conjecture over a field, and provides the
//! modular-forms side used for signature (p, p, 2) equations.

pub mod arith;
pub mod error;
pub mod field;
pub mod linalg;

pub use error::{Error, Result};
pub mod solver;
pub mod sunit;
pub mod orbits;
pub mod poly;
pub mod serre_mazur;
pub mod criteria;
pub mod lmfdb;
pub mod survey;
