//! Symmetric per-site quantum Fourier transform between the field and
//! conjugate-momentum eigenbases.
//!
//! W[m][l] = 2^(-n_q/2) exp(-i kphi_m phi_l), with the global phase fixed so
//! W[0][0] is real positive. Because both grids are symmetric about zero,
//! W factors as phase layers around a standard inverse DFT, which gives an
//! exact elementary-gate decomposition for lowered (CX/CZ-only) circuits.

use super::gate::{hadamard, phase_gate, Gate};
use crate::lattice::{build_grids, ModelParams};
use num_complex::Complex64;

/// The per-site transform matrix, field basis to momentum basis.
pub fn sqft_matrix(params: &ModelParams) -> nalgebra::DMatrix<Complex64> {
    let levels = params.levels();
    let grids = build_grids(params);
    let norm = 1.0 / (levels as f64).sqrt();
    let mut w = nalgebra::DMatrix::from_fn(levels, levels, |m, l| {
        let phase = -grids.kphi_values[m] * grids.phi_values[l];
        Complex64::from_polar(norm, phase)
    });
    // Global phase convention: W[0][0] real positive.
    let w00 = w[(0, 0)];
    let correction = (w00 / w00.norm()).conj();
    w *= correction;
    w
}

/// W as a dense gate on the qubits of `site`, together with its inverse.
pub fn sqft_gate(params: &ModelParams, site: usize) -> (Gate, Gate) {
    let w = sqft_matrix(params);
    let qubits: Vec<usize> = (0..params.n_q).map(|b| params.qubit(site, b)).collect();
    let forward = Gate::dense(qubits.clone(), w.clone()).expect("SQFT is unitary");
    let inverse = Gate::dense(qubits, w.adjoint()).expect("SQFT inverse is unitary");
    (forward, inverse)
}

/// Elementary-gate realization of W on the qubits of `site`: single-qubit
/// phase layers around an inverse DFT built from H, controlled phases
/// (expanded over CX), and SWAPs. Exact up to a global phase.
pub fn sqft_elementary(params: &ModelParams, site: usize) -> Vec<Gate> {
    let n = params.n_q;
    let qubits: Vec<usize> = (0..n).map(|b| params.qubit(site, b)).collect();
    let levels = params.levels() as f64;
    // W = e^{iC} D_alpha IDFT D_alpha with alpha = pi (N-1)/N per index unit.
    let alpha = std::f64::consts::PI * (levels - 1.0) / levels;
    let mut gates = Vec::new();
    for (b, &q) in qubits.iter().enumerate() {
        gates.push(phase_gate(q, alpha * (1u64 << b) as f64));
    }
    gates.extend(idft_gates(&qubits));
    for (b, &q) in qubits.iter().enumerate() {
        gates.push(phase_gate(q, alpha * (1u64 << b) as f64));
    }
    gates
}

/// Inverse of [`sqft_elementary`] (reversed gates with conjugated phases).
pub fn sqft_elementary_inverse(params: &ModelParams, site: usize) -> Vec<Gate> {
    let n = params.n_q;
    let qubits: Vec<usize> = (0..n).map(|b| params.qubit(site, b)).collect();
    let levels = params.levels() as f64;
    let alpha = std::f64::consts::PI * (levels - 1.0) / levels;
    let mut gates = Vec::new();
    for (b, &q) in qubits.iter().enumerate() {
        gates.push(phase_gate(q, -alpha * (1u64 << b) as f64));
    }
    gates.extend(dft_gates(&qubits));
    for (b, &q) in qubits.iter().enumerate() {
        gates.push(phase_gate(q, -alpha * (1u64 << b) as f64));
    }
    gates
}

/// Forward DFT |x> -> N^{-1/2} sum_y e^{+2 pi i x y / N} |y> with qubit b
/// the 2^b bit of the index.
fn dft_gates(qubits: &[usize]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    for q in (0..n).rev() {
        gates.push(hadamard(qubits[q]));
        for p in (0..q).rev() {
            let theta = std::f64::consts::PI / (1u64 << (q - p)) as f64;
            gates.extend(controlled_phase(qubits[p], qubits[q], theta));
        }
    }
    for q in 0..n / 2 {
        gates.push(Gate::swap(qubits[q], qubits[n - 1 - q]));
    }
    gates
}

/// Inverse DFT: reverse of [`dft_gates`] with negated phases.
fn idft_gates(qubits: &[usize]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    for q in 0..n / 2 {
        gates.push(Gate::swap(qubits[q], qubits[n - 1 - q]));
    }
    for q in 0..n {
        for p in 0..q {
            let theta = -std::f64::consts::PI / (1u64 << (q - p)) as f64;
            gates.extend(controlled_phase(qubits[p], qubits[q], theta));
        }
        gates.push(hadamard(qubits[q]));
    }
    gates
}

/// diag(1,1,1,e^{i theta}) expanded over CX and single-qubit phases, exact
/// with no global phase residue.
pub fn controlled_phase(a: usize, b: usize, theta: f64) -> Vec<Gate> {
    vec![
        phase_gate(a, 0.5 * theta),
        phase_gate(b, 0.5 * theta),
        Gate::cx(a, b),
        phase_gate(b, -0.5 * theta),
        Gate::cx(a, b),
    ]
}
