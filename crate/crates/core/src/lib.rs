//! Stabilizer codes for Majorana-pair errors on perfect state transfer
//! chains, with exact sector-resolved dephasing dynamics.
//!
//! The crate is organised bottom-up:
//! - [`gf2`]: bit-packed binary linear algebra (rref, nullspace, distances);
//! - [`pauli`]: Pauli operators as symplectic vectors and Majorana-monomial
//!   conversions with phase tracking;
//! - [`codes`]: CSS/stabilizer codes, error maps, Majorana distance, the code
//!   catalog and its verification;
//! - [`chain`]: the XX chain, its single-particle and Majorana propagators;
//! - [`dynamics`]: sector-blocked density-matrix evolution under dephasing,
//!   encode → transfer → correct protocols and fidelity sweeps;
//! - [`impossibility`]: the no-go numerics for correcting bit flips beyond
//!   half the chain.

extern crate blas_src;

pub mod chain;
pub mod codes;
pub mod dynamics;
pub mod pauli;
pub mod error;
pub mod gf2;

pub use error::{Error, Result};
