//! Gate and parameter-slot primitives.

use num_complex::Complex64;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("parameter vector length {got} does not match slot table length {want}")]
    SlotMismatch { got: usize, want: usize },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateQubits(Vec<usize>),
    #[error("dense gate matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dense gates support 1 to 3 qubits, got {0}")]
    BadDenseArity(usize),
    #[error("referenced slot {0} does not exist")]
    UnknownSlot(usize),
    #[error("window of {width} sites does not fit lattice of {sites}")]
    WindowTooWide { width: usize, sites: usize },
    #[error("density matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Rotation axis for single-qubit rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Gate angle: a constant or an affine function of a named slot,
/// `angle = scale * value[slot] + offset`. One slot may feed many gates,
/// which is how translation-invariant families share parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Const(f64),
    Slot { id: usize, scale: f64, offset: f64 },
}

impl Param {
    pub fn slot(id: usize) -> Self {
        Param::Slot {
            id,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn scaled_slot(id: usize, scale: f64) -> Self {
        Param::Slot {
            id,
            scale,
            offset: 0.0,
        }
    }

    pub fn resolve(&self, values: &[f64]) -> f64 {
        match *self {
            Param::Const(v) => v,
            Param::Slot { id, scale, offset } => scale * values[id] + offset,
        }
    }

    pub fn slot_id(&self) -> Option<usize> {
        match *self {
            Param::Const(_) => None,
            Param::Slot { id, .. } => Some(id),
        }
    }
}

/// Gate kinds: parameterized rotations (including the two-qubit ZZ
/// rotation used by diagonal evolution ladders), CX/CZ entanglers, SWAP,
/// and constant dense unitaries on up to three qubits.
#[derive(Debug, Clone)]
pub enum GateKind {
    Rot(Axis, Param),
    RotZZ(Param),
    CX,
    CZ,
    Swap,
    Dense(Arc<nalgebra::DMatrix<Complex64>>),
}

/// A gate bound to target qubits. For dense gates the first listed qubit is
/// the least significant bit of the matrix index.
#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn rot(axis: Axis, qubit: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::Rot(axis, param),
            qubits: vec![qubit],
        }
    }

    pub fn rot_zz(a: usize, b: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::RotZZ(param),
            qubits: vec![a, b],
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::CX,
            qubits: vec![control, target],
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::CZ,
            qubits: vec![a, b],
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::Swap,
            qubits: vec![a, b],
        }
    }

    pub fn dense(qubits: Vec<usize>, matrix: nalgebra::DMatrix<Complex64>) -> Result<Self, CircuitError> {
        let arity = qubits.len();
        if !(1..=3).contains(&arity) {
            return Err(CircuitError::BadDenseArity(arity));
        }
        let dim = 1usize << arity;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(CircuitError::DimensionMismatch(format!(
                "dense gate on {arity} qubits needs a {dim}x{dim} matrix"
            )));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > 1e-12 {
            return Err(CircuitError::NotUnitary(dev));
        }
        Ok(Gate {
            kind: GateKind::Dense(Arc::new(matrix)),
            qubits,
        })
    }

    /// Number of two-qubit entangling gates this gate counts as.
    /// SWAP counts as three, a generic dense two-qubit unitary as three,
    /// a dense three-qubit unitary as its standard synthesis cost.
    pub fn two_qubit_cost(&self) -> usize {
        match &self.kind {
            GateKind::Rot(..) => 0,
            GateKind::RotZZ(_) => 1,
            GateKind::CX | GateKind::CZ => 1,
            GateKind::Swap => 3,
            GateKind::Dense(_) => match self.qubits.len() {
                1 => 0,
                2 => 3,
                _ => 20,
            },
        }
    }

    pub fn is_entangling(&self) -> bool {
        self.two_qubit_cost() > 0
    }

    pub fn param(&self) -> Option<&Param> {
        match &self.kind {
            GateKind::Rot(_, p) | GateKind::RotZZ(p) => Some(p),
            _ => None,
        }
    }

    pub fn validate(&self, n_qubits: usize, n_slots: usize) -> Result<(), CircuitError> {
        for &q in &self.qubits {
            if q >= n_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        for i in 0..self.qubits.len() {
            for j in (i + 1)..self.qubits.len() {
                if self.qubits[i] == self.qubits[j] {
                    return Err(CircuitError::DuplicateQubits(self.qubits.clone()));
                }
            }
        }
        if let Some(Param::Slot { id, .. }) = self.param() {
            if *id >= n_slots {
                return Err(CircuitError::UnknownSlot(*id));
            }
        }
        Ok(())
    }

    /// 2x2 matrix of a rotation gate for the given resolved angle.
    pub fn rotation_matrix(axis: Axis, angle: f64) -> [Complex64; 4] {
        let c = (0.5 * angle).cos();
        let s = (0.5 * angle).sin();
        match axis {
            Axis::X => [
                Complex64::new(c, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, -s),
                Complex64::new(c, 0.0),
            ],
            Axis::Y => [
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ],
            Axis::Z => [
                Complex64::new(c, -s),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(c, s),
            ],
        }
    }
}

pub(crate) fn unitarity_deviation(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    let id = nalgebra::DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    ((m.adjoint() * m) - id).norm()
}

/// Hadamard as a constant dense gate.
pub fn hadamard(qubit: usize) -> Gate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    );
    Gate::dense(vec![qubit], m).expect("hadamard is unitary")
}

/// diag(1, e^{i phase}) as a constant dense gate.
pub fn phase_gate(qubit: usize, phase: f64) -> Gate {
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(phase.cos(), phase.sin()),
        ],
    );
    Gate::dense(vec![qubit], m).expect("phase gate is unitary")
}

/// Pauli gates as constant dense gates (used by twirling).
pub fn pauli_gate(qubit: usize, op: crate::lattice::PauliOp) -> Option<Gate> {
    use crate::lattice::PauliOp;
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = match op {
        PauliOp::I => return None,
        PauliOp::X => [z, one, one, z],
        PauliOp::Y => [z, -i, i, z],
        PauliOp::Z => [one, z, z, -one],
    };
    Some(Gate::dense(vec![qubit], nalgebra::DMatrix::from_row_slice(2, 2, &m)).unwrap())
}
