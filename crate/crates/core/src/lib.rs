//! Full configuration interaction for fixed-(N↑, N↓) fermionic Hamiltonians and the
//! spin-resolved entanglement and correlation measures built on top of it.
//!
//! The pipeline is: [`integrals`] (FCIDUMP in) → [`fock`] (determinant basis) →
//! [`solver`] (Hamiltonian, eigenstates, thermal mixtures) → [`rdm`] (reduced density
//! matrices) → [`measures`] (entropies, mutual informations, negativities).
//! [`limits`] builds the analytic dissociation-limit states of the water molecule and
//! [`oracle`] holds brute-force reference paths used for validation.

pub mod error;
pub mod fock;
pub mod integrals;
pub mod limits;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod rdm;
pub mod solver;

pub use error::{Error, Result};
pub use fock::{Determinant, Op, SectorBasis, Spin};
pub use integrals::IntegralTable;
pub use measures::MeasureReport;
pub use solver::{Ensemble, State, WaveFunction};
