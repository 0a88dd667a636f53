//! Certified numerics for Polya-type eigenvalue bounds of the Aharonov-Bohm
//! operator on the unit disk.

pub mod bessel;
pub mod enclosures;
pub mod emit;
pub mod error;
pub mod gapcert;
pub mod gfun;
pub mod lattice;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
