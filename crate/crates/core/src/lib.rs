//! Stabilizer entropies of qudit pure states and the maximal-magic bound.
//! The bound is saturated by Weyl-Heisenberg covariant SIC fiducials.
//!
//! Module map:
//! - [`states`]: dense complex vectors/matrices, pure states, Haar sampling
//! - [`wh_group`]: displacement operators for `d` or any factorization of `d`
//! - [`stabilizer`]: stabilizer projectors and enumeration for prime factors
//! - [`magic`]: characteristic distributions, stabilizer entropies, bound
//! - [`sic`]: SIC checks, the `K_α` functional, frame potentials, catalog
//! - [`cli`]: the `magiclab` command-line tool
//! - [`clifford`]: Clifford generators and conjugation of displacements
//! - [`search`]: projected-gradient search for maximal-magic states

pub mod cli;
pub mod clifford;
pub mod error;
pub mod magic;
pub mod search;
pub mod sic;
pub mod stabilizer;
pub mod states;
pub mod wh_group;

pub use error::{Error, Result};
pub use num_complex::Complex64;
