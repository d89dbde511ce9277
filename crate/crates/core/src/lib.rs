//! Exact arithmetic for integral lattices, discriminant forms, binary
//! quadratic forms and lattices with involution.

pub mod binary_forms;
pub mod definite;
pub mod error;
pub mod f2quad;
pub mod finite_forms;
pub mod genus;
pub mod involutions;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod mukai;

pub use error::{Error, Result};
pub use lattice::{FiniteQuadraticForm, Lattice, StandardLattice, Sublattice};
pub use linalg::{IntMatrix, RationalMatrix, Signature};
