//! Parameterized circuits: ordered gates plus a named slot table.

use super::gate::{Axis, CircuitError, Gate, GateKind, Param};
use num_complex::Complex64;

#[derive(Debug, Clone, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    slot_names: Vec<String>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            slot_names: Vec::new(),
        }
    }

    /// Register a named parameter slot, returning its id.
    pub fn add_slot(&mut self, name: impl Into<String>) -> usize {
        self.slot_names.push(name.into());
        self.slot_names.len() - 1
    }

    pub fn n_slots(&self) -> usize {
        self.slot_names.len()
    }

    pub fn slot_names(&self) -> &[String] {
        &self.slot_names
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.validate(self.n_qubits, self.slot_names.len()).is_ok());
        self.gates.push(gate);
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for gate in &self.gates {
            gate.validate(self.n_qubits, self.slot_names.len())?;
        }
        Ok(())
    }

    /// Append another circuit's gates, remapping its slots to fresh ids here.
    /// Returns the id offset applied to the appended slots.
    pub fn append(&mut self, other: &Circuit) -> usize {
        let offset = self.slot_names.len();
        for name in &other.slot_names {
            self.slot_names.push(name.clone());
        }
        for gate in &other.gates {
            let mut g = gate.clone();
            if let GateKind::Rot(_, p) | GateKind::RotZZ(p) = &mut g.kind {
                if let Param::Slot { id, .. } = p {
                    *id += offset;
                }
            }
            self.gates.push(g);
        }
        offset
    }

    /// Total count of two-qubit entangling gates (SWAP counted as three).
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().map(|g| g.two_qubit_cost()).sum()
    }

    /// Greedy two-qubit depth: gates are packed into layers left to right;
    /// a gate starts a new layer when it shares a qubit with the current one.
    /// Single-qubit gates do not contribute. A gate with two-qubit cost c
    /// occupies c consecutive layers.
    pub fn two_qubit_depth(&self) -> usize {
        let mut busy_until = vec![0usize; self.n_qubits];
        let mut depth = 0usize;
        for gate in &self.gates {
            let cost = gate.two_qubit_cost();
            if cost == 0 {
                continue;
            }
            let start = gate.qubits.iter().map(|&q| busy_until[q]).max().unwrap_or(0);
            let end = start + cost;
            for &q in &gate.qubits {
                busy_until[q] = end;
            }
            depth = depth.max(end);
        }
        depth
    }

    /// Resolved angle list for a bound parameter vector (rotations only).
    pub fn check_binding(&self, values: &[f64]) -> Result<(), CircuitError> {
        if values.len() != self.slot_names.len() {
            return Err(CircuitError::SlotMismatch {
                got: values.len(),
                want: self.slot_names.len(),
            });
        }
        Ok(())
    }

    /// Dense unitary of the bound circuit (oracle use, <= 10 qubits).
    pub fn to_dense(&self, values: &[f64]) -> Result<nalgebra::DMatrix<Complex64>, CircuitError> {
        self.check_binding(values)?;
        assert!(self.n_qubits <= 10, "dense circuit limited to 10 qubits");
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
        for col in 0..dim {
            let mut state = super::state::StateVector::basis(self.n_qubits, col);
            super::state::apply(&mut state, self, values)?;
            for row in 0..dim {
                m[(row, col)] = state.amplitudes()[row];
            }
        }
        Ok(m)
    }

    /// Line-oriented text serialization, one gate per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("qubits {}\n", self.n_qubits));
        for name in &self.slot_names {
            out.push_str(&format!("slot {name}\n"));
        }
        for gate in &self.gates {
            out.push_str(&serialize_gate(gate));
            out.push('\n');
        }
        out
    }

    /// Parse the `serialize` format.
    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let head = fields.next().unwrap();
            match head {
                "qubits" => {
                    let n = parse_usize(fields.next())?;
                    circuit = Some(Circuit::new(n));
                }
                "slot" => {
                    let c = circuit
                        .as_mut()
                        .ok_or_else(|| CircuitError::Parse("slot before qubits".into()))?;
                    let name = fields.next().unwrap_or("").to_string();
                    c.add_slot(name);
                }
                _ => {
                    let c = circuit
                        .as_mut()
                        .ok_or_else(|| CircuitError::Parse("gate before qubits".into()))?;
                    let gate = parse_gate(head, &mut fields)?;
                    gate.validate(c.n_qubits, c.n_slots())?;
                    c.gates.push(gate);
                }
            }
        }
        circuit.ok_or_else(|| CircuitError::Parse("empty circuit text".into()))
    }
}

fn serialize_param(p: &Param) -> String {
    match *p {
        Param::Const(v) => format!("const:{v:.17e}"),
        Param::Slot { id, scale, offset } => format!("slot:{id}:{scale:.17e}:{offset:.17e}"),
    }
}

fn serialize_gate(gate: &Gate) -> String {
    let qs: Vec<String> = gate.qubits.iter().map(|q| format!("q{q}")).collect();
    let qs = qs.join(" ");
    match &gate.kind {
        GateKind::Rot(axis, p) => {
            let name = match axis {
                Axis::X => "rx",
                Axis::Y => "ry",
                Axis::Z => "rz",
            };
            format!("{name} {qs} {}", serialize_param(p))
        }
        GateKind::RotZZ(p) => format!("rzz {qs} {}", serialize_param(p)),
        GateKind::CX => format!("cx {qs}"),
        GateKind::CZ => format!("cz {qs}"),
        GateKind::Swap => format!("swap {qs}"),
        GateKind::Dense(m) => {
            let entries: Vec<String> = m
                .iter()
                .map(|c| format!("{:.17e},{:.17e}", c.re, c.im))
                .collect();
            format!("dense {qs} {}", entries.join(" "))
        }
    }
}

fn parse_usize(field: Option<&str>) -> Result<usize, CircuitError> {
    field
        .ok_or_else(|| CircuitError::Parse("missing field".into()))?
        .parse()
        .map_err(|e| CircuitError::Parse(format!("bad integer: {e}")))
}

fn parse_qubit(field: &str) -> Result<usize, CircuitError> {
    field
        .strip_prefix('q')
        .ok_or_else(|| CircuitError::Parse(format!("expected qubit, got {field}")))?
        .parse()
        .map_err(|e| CircuitError::Parse(format!("bad qubit: {e}")))
}

fn parse_param(field: &str) -> Result<Param, CircuitError> {
    if let Some(v) = field.strip_prefix("const:") {
        return Ok(Param::Const(v.parse().map_err(|e| {
            CircuitError::Parse(format!("bad const: {e}"))
        })?));
    }
    if let Some(rest) = field.strip_prefix("slot:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CircuitError::Parse(format!("bad slot param {field}")));
        }
        return Ok(Param::Slot {
            id: parts[0]
                .parse()
                .map_err(|e| CircuitError::Parse(format!("bad slot id: {e}")))?,
            scale: parts[1]
                .parse()
                .map_err(|e| CircuitError::Parse(format!("bad scale: {e}")))?,
            offset: parts[2]
                .parse()
                .map_err(|e| CircuitError::Parse(format!("bad offset: {e}")))?,
        });
    }
    Err(CircuitError::Parse(format!("bad param {field}")))
}

fn parse_gate<'a>(
    head: &str,
    fields: &mut impl Iterator<Item = &'a str>,
) -> Result<Gate, CircuitError> {
    let rest: Vec<&str> = fields.collect();
    let n_qubits = rest.iter().take_while(|f| f.starts_with('q')).count();
    let qubits: Result<Vec<usize>, _> = rest[..n_qubits].iter().map(|f| parse_qubit(f)).collect();
    let qubits = qubits?;
    let tail = &rest[n_qubits..];
    match head {
        "rx" | "ry" | "rz" => {
            let axis = match head {
                "rx" => Axis::X,
                "ry" => Axis::Y,
                _ => Axis::Z,
            };
            let p = parse_param(tail.first().ok_or_else(|| {
                CircuitError::Parse("rotation needs a parameter".into())
            })?)?;
            Ok(Gate {
                kind: GateKind::Rot(axis, p),
                qubits,
            })
        }
        "rzz" => {
            let p = parse_param(tail.first().ok_or_else(|| {
                CircuitError::Parse("rzz needs a parameter".into())
            })?)?;
            Ok(Gate {
                kind: GateKind::RotZZ(p),
                qubits,
            })
        }
        "cx" => Ok(Gate {
            kind: GateKind::CX,
            qubits,
        }),
        "cz" => Ok(Gate {
            kind: GateKind::CZ,
            qubits,
        }),
        "swap" => Ok(Gate {
            kind: GateKind::Swap,
            qubits,
        }),
        "dense" => {
            let dim = 1usize << qubits.len();
            if tail.len() != dim * dim {
                return Err(CircuitError::Parse(format!(
                    "dense gate on {} qubits needs {} entries, got {}",
                    qubits.len(),
                    dim * dim,
                    tail.len()
                )));
            }
            let mut entries = Vec::with_capacity(dim * dim);
            for f in tail {
                let (re, im) = f
                    .split_once(',')
                    .ok_or_else(|| CircuitError::Parse(format!("bad complex entry {f}")))?;
                entries.push(Complex64::new(
                    re.parse()
                        .map_err(|e| CircuitError::Parse(format!("bad re: {e}")))?,
                    im.parse()
                        .map_err(|e| CircuitError::Parse(format!("bad im: {e}")))?,
                ));
            }
            // Column-major order matches DMatrix::iter.
            let m = nalgebra::DMatrix::from_vec(dim, dim, entries);
            Gate::dense(qubits, m)
        }
        other => Err(CircuitError::Parse(format!("unknown gate {other}"))),
    }
}
