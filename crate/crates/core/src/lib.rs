//! Free-fermion description of the critical two-dimensional Ising model.
//!
//! The crate holds four presentations of the same theory and the glue to
//! compare them:
//!
//! - [`lattice`]: transfer matrices, Clifford generators and lattice fermion
//!   correlators on a strip with plus boundary conditions.
//! - [`cft`]: continuum Pfaffian correlators transported by conformal charts,
//!   Ward identities, descendants and null-field equations.
//! - [`voa`]: the Clifford vertex operator algebra on a level-truncated Fock
//!   space in exact rational arithmetic.
//! - [`sle`]: chordal and multiple SLE_3 driven by the fermion partition
//!   function, with martingale tests.
//!
//! [`numerics`] holds the shared kernels (Pfaffian, finite differences,
//! counter-based Brownian increments).

pub mod cft;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod sle;
pub mod voa;

pub use error::{Error, Result};
pub use num_complex::Complex64;
