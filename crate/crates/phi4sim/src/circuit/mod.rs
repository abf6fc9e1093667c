//! Parameterized circuits and the exact statevector engine.

#[allow(clippy::module_inception)]
mod circuit;
pub mod density;
mod evolve;
mod gate;
mod lower;
pub mod sqft;
mod state;
mod trotter;

pub use circuit::Circuit;
pub use density::{
    fidelity, local_infidelity, nuclear_norm, reduce, window_infidelity, ReducedDensity,
};
pub use evolve::exact_evolve;
pub use gate::{hadamard, pauli_gate, phase_gate, Axis, CircuitError, Gate, GateKind, Param};
pub use lower::lower_to_entanglers;
pub use sqft::{sqft_elementary, sqft_elementary_inverse, sqft_gate, sqft_matrix};
pub use state::{apply, apply_gate, StateVector};
pub use trotter::{trotter2_circuit, trotter_evolve, trotter_identity_phase, SplitStepEvolver};
