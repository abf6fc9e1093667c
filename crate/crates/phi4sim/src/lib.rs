//! Classical toolkit for quantum simulation of 1-D digitized scalar field theory.
//!
//! The crate covers the full pipeline at desk scale (up to 24 qubits):
//!
//! - [`lattice`]: field digitization, Pauli operator encodings, Hamiltonian
//!   construction, and analytic free-theory states.
//! - [`circuit`]: parameterized circuits and an exact statevector engine with
//!   Trotterized and Krylov time evolution.
//! - [`solver`]: exact-diagonalization oracles, momentum-sector analysis,
//!   adiabatic wavepacket preparation, and wavepacket tracking.
//! - [`ansatz`]: the scalable variational circuit families (vacuum input,
//!   neighbor-coupling layers, wavepacket brickwalls, time-evolution steps).
//! - [`optimize`]: BFGS infidelity minimization, greedy operator-pool ansatz
//!   growth, and exponential parameter extrapolation in system size.
//! - [`noise`]: depolarizing-noise emulation, Pauli/readout twirling, operator
//!   decoherence renormalization, filtering, and bootstrap statistics.
//! - [`pipeline`]: configuration-driven experiment orchestration and data export.

pub mod ansatz;
pub mod circuit;
pub mod lattice;
pub mod noise;
pub mod optimize;
pub mod pipeline;
pub mod solver;

pub use num_complex::Complex64;
