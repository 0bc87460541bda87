//! Symmetry-reduced spectral diagnostics for the cubically truncated
//! incompressible flow system.
//!
//! The crate enumerates the truncated Fourier lattice together with its
//! 48-element signed-permutation symmetry, counts triad interactions
//! exactly, assembles the orbit-level enstrophy transfer matrix and its
//! symmetric stretching part, samples random divergence-free velocity
//! ensembles, evolves the truncated system in time, and packages the whole
//! thing behind a reproducible Monte Carlo / golden-table harness and a
//! command-line front end.

pub mod error;
pub mod lattice;
pub mod stats;
pub mod rng;
pub mod incidence;
pub mod matrix;
pub mod ensemble;
pub mod transfer;

pub use error::{Error, Result};
