//! Coupled-spin Pauli Hamiltonians: exact spectra, level-crossing
//! classification and entanglement measures.

pub mod cli;
pub mod entanglement;
pub mod hamiltonian;
pub mod linalg;
pub mod pauli;
pub mod spectra;
