//! Jaynes–Cummings model with counter-rotating terms, solved in the
//! extended coherent-state (displaced Fock) basis.
//!
//! The crate is layered bottom-up:
//!
//! - [`boson`]: overlaps of displaced Fock and coherent states.
//! - [`solver`]: parity-sector Hamiltonians, their eigenpairs and the map
//!   back to the bare `|n, e/g⟩` basis; [`fock`] holds the bare-basis
//!   brute-force oracle.
//! - [`observables`]: level diagrams, ground-state photon number and the
//!   emission spectrum after exciting the dressed ground state.
//! - [`dynamics`]: atomic population inversion for an initial `|g⟩|α⟩`,
//!   exact and in the rotating-wave approximation.
//! - [`strong`]: strong-coupling perturbation theory.

pub mod boson;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod model;
pub mod observables;
pub mod solver;
pub mod strong;

pub use dynamics::{evolve_exact, evolve_rwa, population_trace, DynamicsConfig, DynamicsResult, Method, TimeAxis};
pub use error::{Error, Result};
pub use fock::{solve_fock_oracle, FockSpectrum, FockVector};
pub use model::{ModelParams, Parity};
pub use observables::{
    emission_spectrum, level_diagram, mean_photon_ground, rwa_vacuum_splitting, SpectrumConfig, SpectrumResult,
};
pub use solver::{
    assemble_hamiltonian, convergence_report, solve_sector, to_fock_basis, EigenSolution, FockBasis, SectorPair,
};
pub use strong::{perturbative_energies, perturbative_evolution, perturbative_population, zeroth_order_states};
