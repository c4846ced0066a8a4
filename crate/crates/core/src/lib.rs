//! Finite-precision p-adic constructions: random p-adic elements, algebraic
//! independence checks, corner modules, free-module detection and the
//! supporting arithmetic.

pub mod acceptance;
pub mod arith;
pub mod corner;
pub mod density;
pub mod error;
pub mod free;
pub mod independence;
pub mod lattice;
pub mod linalg;
pub mod padic;
pub mod poly;
pub mod random;
pub mod ring;
pub mod stats;
pub mod zassenhaus;
pub mod zmod;

pub use error::{Error, Result};
pub use padic::{PadicApprox, PadicRing, PadicVector};
