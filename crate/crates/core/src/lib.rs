//! Truncated Witt vectors over characteristic-p rings and the Witt
//! divisorial sheaves `W_n O(D)` of torus-invariant R-divisors on `P^N`.
//!
//! Every computation is exact. Universal polynomials are integer
//! polynomials computed from ghost components; cohomology is computed one
//! multidegree at a time, where each graded piece is a finite abelian
//! p-group small enough to enumerate.

pub mod cech;
pub mod divisor;
pub mod divisorial;
pub mod error;
pub mod kummer;
pub mod maps;
pub mod rings;
pub mod teichmuller;
pub mod witt;

pub use divisor::RDivisor;
pub use error::{Error, Result};
