//! Coupled Hartree dynamics for two-species Bose mixtures and an exact
//! lattice many-body validator.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod counting;
pub mod error;
pub mod fock;
pub mod hartree;
pub mod lattice;
pub mod rdm;
pub mod sampling;
pub mod scaling;
pub mod verify;

pub use error::{Error, Result};
