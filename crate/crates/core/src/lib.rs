//! Colombeau-type algebras realized as sequence spaces with ultranorms.
//!
//! A weight scale `r = (r_n)` decreasing to zero turns a seminorm `p` into the
//! ultranorm `‖f‖ = limsup p(f_n)^{r_n}`. Moderate sequences (finite norm)
//! modulo negligible ones (norm zero) form the generalized algebra. This crate
//! provides exact symbolic evaluation of those norms for sequences of the form
//! `exp(c0 + s/r_n + γ log n + δ log log n)` and their sums, a numeric limsup
//! estimator for black-box sequences, quotient arithmetic on generalized
//! numbers, Fourier-side generalized functions on the circle, families of
//! scales and asymptotic algebras, extension of maps, and the association
//! relations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod association;
pub mod asymptotic;
pub mod basis;
mod error;
pub mod functorial;
pub mod gnum;
pub mod growth;
pub mod ladder;
pub mod scales;
pub mod torus;
pub mod ultranorm;
pub mod verdict;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use growth::{GrowthClass, Phase, Precision, SymbolicSeq};
pub use ladder::IndexLadder;
pub use scales::{AsymptoticScale, Direction, Limit, Scale, ScaleFamily, ScaleKind};
pub use ultranorm::{Classification, NormMode, UltraNormValue};
pub use verdict::{Evidence, Verdict, Witness};
