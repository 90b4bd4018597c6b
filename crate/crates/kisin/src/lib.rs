//! Exact arithmetic for torsion Frobenius modules over `k[[u]]`.
//!
//! The base ring is the power-series ring `k[[u]]` over a finite field
//! `k = GF(p^f)`, carrying the Frobenius substitution
//! `phi(sum a_n u^n) = sum a_n^p u^(pn)`.  On top of it the crate builds:
//!
//! * truncated power/Laurent series with explicit precision tracking
//!   ([`series::USeries`]),
//! * matrix algebra over `k[[u]]` and `k((u))`: Smith normal form, Hermite
//!   canonical lattice bases, membership solving ([`matrix`]),
//! * free modules with a semilinear Frobenius of bounded height
//!   ([`module::PhiModule`]), their morphisms, kernels, images, cokernels,
//!   duality and extensions,
//! * the inclusion-ordered set of height-bounded lattices inside
//!   `M[1/u]`, its supremum/infimum structure, the greatest and smallest
//!   elements (`max_r`, `min_r`) and the abelian-category kernels and
//!   cokernels of the maximal/minimal subcategories ([`lattice`]),
//! * the classification of simple objects by periodic integer sequences,
//!   with exact rational invariants and tame inertia weights
//!   ([`simple`]).
//!
//! Everything is exact: coefficients live in `GF(p^f)`, series carry the
//! precision to which they are known, and every yes/no verdict is either
//! certain or reported as a precision failure.  The crate is `no_std`
//! (with `alloc`); IO, file formats and the command-line front end live in
//! the companion crate `kisin-cli`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod module;
pub mod series;
pub mod simple;
pub use error::{Error, Result};
pub use field::{FFElt, FieldParams, FinField};
pub use lattice::{FrPoset, Lattice};
pub use matrix::{SeriesMatrix, SmithDecomposition};
pub use module::{PhiModule, PhiMorphism};
pub use series::{Prec, USeries};
pub use simple::SimpleSeq;

