//! Lévy-disordered SYK: heavy-tailed couplings, Majorana algebra, exact
//! diagonalization, spectral statistics and the fractal-spectrum calculus.
//!
//! The crate is `no_std` with `alloc`; the default `std` feature only turns on
//! the faster `std` code paths of its dependencies.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod crossover;
pub mod edge;
pub mod eigen;
mod error;
pub mod hierarchy;
pub mod majorana;
pub mod matrix;
pub mod sfd;
pub mod spectral;
pub mod stable;
pub mod syk;

pub use error::{Error, Result};
pub use faer::c64;

/// Tag written into cached artifacts; bump when a normalization convention changes.
pub const CONVENTION_TAG: &str = "chi2=1;stable=exp(-|sk|^mu);sector=jw-parity;v1";
