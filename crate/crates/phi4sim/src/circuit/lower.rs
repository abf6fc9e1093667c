//! Lowering to the hardware-style gate set {1q gates, CX, CZ}.
//!
//! The noisy emulation and twirling paths require every entangler to be a
//! CX or CZ. ZZ rotations and SWAPs expand exactly; dense multi-qubit gates
//! are rejected (circuit builders offer elementary constructions for them).

use super::circuit::Circuit;
use super::gate::{Axis, CircuitError, Gate, GateKind};

/// Expand a circuit so its only entanglers are CX and CZ. Parameter slots
/// are preserved.
pub fn lower_to_entanglers(circuit: &Circuit) -> Result<Circuit, CircuitError> {
    let mut out = Circuit::new(circuit.n_qubits);
    for name in circuit.slot_names() {
        out.add_slot(name.clone());
    }
    for gate in &circuit.gates {
        match &gate.kind {
            GateKind::RotZZ(p) => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                out.push(Gate::cx(a, b));
                out.push(Gate::rot(Axis::Z, b, *p));
                out.push(Gate::cx(a, b));
            }
            GateKind::Swap => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                out.push(Gate::cx(a, b));
                out.push(Gate::cx(b, a));
                out.push(Gate::cx(a, b));
            }
            GateKind::Dense(_) if gate.qubits.len() > 1 => {
                return Err(CircuitError::Parse(
                    "dense multi-qubit gate has no lowering; build the circuit \
                     with elementary transforms instead"
                        .into(),
                ));
            }
            _ => out.push(gate.clone()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::state::{apply, StateVector};
    use crate::circuit::gate::Param;

    #[test]
    fn lowering_preserves_unitary() {
        let mut c = Circuit::new(3);
        let s = c.add_slot("t");
        c.push(Gate::rot_zz(0, 2, Param::slot(s)));
        c.push(Gate::swap(1, 2));
        c.push(Gate::rot(Axis::Y, 0, Param::Const(0.3)));
        let lowered = lower_to_entanglers(&c).unwrap();
        assert!(lowered
            .gates
            .iter()
            .all(|g| matches!(g.kind, GateKind::CX | GateKind::CZ | GateKind::Rot(..))));
        let mut a = StateVector::basis(3, 5);
        let mut b = StateVector::basis(3, 5);
        apply(&mut a, &c, &[0.83]).unwrap();
        apply(&mut b, &lowered, &[0.83]).unwrap();
        assert!(a.infidelity(&b) < 1e-12);
        // Phase-exact, not just up to fidelity.
        let diff: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes().iter())
            .map(|(x, y)| (x - y).norm())
            .sum();
        assert!(diff < 1e-10);
    }

    #[test]
    fn dense_two_qubit_gate_rejected() {
        let p = crate::lattice::ModelParams::new(2, 2, 0.5, 0.0, 1.5).unwrap();
        let (w, _) = crate::circuit::sqft::sqft_gate(&p, 0);
        let mut c = Circuit::new(4);
        c.push(w);
        assert!(lower_to_entanglers(&c).is_err());
    }
}
