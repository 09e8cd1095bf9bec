//! Grid-level numerics for fractional Nikolskii-Besov functionals.
//!
//! The crate is `no_std` with `alloc`. It covers sampled functions on uniform
//! grids, the heat and Ornstein-Uhlenbeck semigroups, shift seminorms and
//! divergence-quotient witnesses, inequality certificates, the slice
//! counterexample, and shift regularity of gridded measures.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certify;
pub mod corpus;
pub mod counterexample;
mod error;
pub mod grid;
pub mod heat;
pub mod math;
pub mod measure;
pub mod ou;
pub mod seminorm;
pub mod witness;

pub use error::{Error, Result};
pub use grid::{Axis, Direction, Grid, GridFunction, Measure, VectorFieldGrid};
