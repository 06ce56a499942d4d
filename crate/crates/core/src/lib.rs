//! Computations with finitely generated discrete subgroups of the Euclidean
//! isometry group `E(n)`: ball enumeration, growth functions and dimension,
//! translation subgroups, conformal conjugation, geometric half-line
//! selection, and an obstruction classifier over `(n, dim Γ, dim Γ_T)`.

mod approx_index;
pub mod conjugate;
pub mod error;
pub mod fixtures;
pub mod geomselect;
pub mod groupgen;
pub mod growth;
pub mod isomcore;
pub mod obstruct;

pub use error::{Error, Result};
