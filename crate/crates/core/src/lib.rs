//! Exact computation of the integral homology of `P_{k,n}^l`, the space of
//! monic degree-`k` complex polynomials with at most `l` roots of
//! multiplicity `n` or more.
//!
//! The crate is split by concern:
//!
//! * [`digits`] expands `l` in base `p` and extracts the maximal runs of
//!   `p - 1` digits that control higher `p`-torsion.
//! * [`torsion`] turns each run into a `Z/p^mu` summand, its homological
//!   degree and the least `k` at which it appears.
//! * [`oracle`] recomputes every exponent from binomial valuations of the
//!   transgression coefficients, independently of [`torsion`].
//! * [`arnold`] holds the low-degree table of Arnol'd for `n = 2`.
//! * [`graded`] is the value type for graded abelian groups.

pub mod arnold;
pub mod digits;
pub mod error;
pub mod graded;
pub mod oracle;
pub mod torsion;

pub use error::{Error, Result};
