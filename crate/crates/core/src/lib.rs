//! Simulation of fully and localized virtual purification (FVP / LVP).
//!
//! Two backends share one vocabulary: a dense engine for spin chains of up
//! to 14 sites ([`densop`], [`channels`], [`estimator`]) and a fermionic
//! Gaussian engine for free-fermion and transverse-field Ising systems far
//! beyond that size ([`gaussian`]).

pub mod channels;
pub mod densop;
pub mod error;
pub mod estimator;
pub mod fit;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod quadrature;
pub mod spin;

pub use densop::{DensityMatrix, LocalOperator, Observable};
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeKind, RegionPartition};
pub use pauli::{Pauli, PauliString};
pub use spin::{DenseLimit, Hamiltonian, HamiltonianTerm};
