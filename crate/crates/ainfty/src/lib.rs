//! Exact computer algebra for finite-dimensional A-infinity algebras.
//!
//! The engine validates A-infinity structures, morphisms, units, modules and
//! bimodules, computes Hochschild chain/cochain homology, Connes-type mixed
//! complexes and truncated negative cyclic homology with flatness reports,
//! and carries a layer of non-commutative differential geometry: cyclic
//! forms, Cartan calculus, Darboux normalization of symplectic forms, scalar
//! products, and trace maps to matrix representation spaces.
//!
//! All arithmetic is exact, over the rationals or a prime field. Everything
//! is computed on explicit finite truncations (word length `L`, series order
//! `N`, degree windows) and reports say so.

pub mod error;
pub mod field;
pub mod linalg;
pub mod graded;
pub mod coalgebra;
pub mod complex;
pub mod ainfinity;
pub mod modules;
pub mod fixtures;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
