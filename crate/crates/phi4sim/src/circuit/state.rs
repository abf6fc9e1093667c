//! Statevector storage and gate application kernels.

use super::circuit::Circuit;
use super::gate::{CircuitError, Gate, GateKind};
use crate::lattice::{ModelParams, PauliOp, PauliSum};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use std::collections::BTreeMap;

const PARALLEL_THRESHOLD: usize = 1 << 15;

/// Normalized complex amplitude vector over 2^n computational basis states.
/// Qubit q corresponds to bit q of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0>.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state |index>.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1usize << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .par_iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        let inv = 1.0 / n;
        self.amps.par_iter_mut().for_each(|a| *a *= inv);
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .par_iter()
            .zip(other.amps.par_iter())
            .map(|(a, b)| a.conj() * b)
            .reduce(|| Complex64::new(0.0, 0.0), |x, y| x + y)
    }

    /// Global infidelity 1 - |<self|other>|^2.
    pub fn infidelity(&self, other: &StateVector) -> f64 {
        (1.0 - self.inner(other).norm_sqr()).max(0.0)
    }

    /// Expectation value of a Hermitian Pauli sum.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64, CircuitError> {
        if observable.n_qubits() != self.n_qubits {
            return Err(CircuitError::DimensionMismatch(format!(
                "observable on {} qubits, state on {}",
                observable.n_qubits(),
                self.n_qubits
            )));
        }
        let mut total = 0.0;
        for (coeff, string) in observable.terms() {
            total += coeff * self.pauli_string_expectation(string);
        }
        Ok(total)
    }

    fn pauli_string_expectation(&self, string: &[PauliOp]) -> f64 {
        let mut zmask = 0usize;
        let mut diagonal = true;
        for (q, &p) in string.iter().enumerate() {
            match p {
                PauliOp::I => {}
                PauliOp::Z => zmask |= 1 << q,
                _ => diagonal = false,
            }
        }
        if diagonal {
            return self
                .amps
                .par_iter()
                .enumerate()
                .map(|(i, a)| {
                    let sign = if (i & zmask).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    sign * a.norm_sqr()
                })
                .sum();
        }
        // General string: accumulate conj(psi[i']) phase psi[i] pairwise.
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            let (target, phase) = PauliSum::apply_string(string, i);
            total += self.amps[target].conj() * phase * self.amps[i];
        }
        total.re
    }

    /// Per-site <phi_j^2> profile in a single pass.
    pub fn phi2_profile(&self, params: &ModelParams) -> Vec<f64> {
        assert_eq!(params.n_qubits(), self.n_qubits);
        let grids = crate::lattice::build_grids(params);
        let phi2: Vec<f64> = grids.phi_values.iter().map(|p| p * p).collect();
        let nq = params.n_q;
        let mask = params.levels() - 1;
        let l = params.sites;
        let chunk = 1usize << 12;
        let partials: Vec<Vec<f64>> = self
            .amps
            .par_chunks(chunk)
            .enumerate()
            .map(|(ci, amps)| {
                let base = ci * chunk;
                let mut acc = vec![0.0f64; l];
                for (off, a) in amps.iter().enumerate() {
                    let p = a.norm_sqr();
                    if p == 0.0 {
                        continue;
                    }
                    let index = base + off;
                    for j in 0..l {
                        acc[j] += p * phi2[(index >> (nq * j)) & mask];
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0f64; l];
        for part in partials {
            for (o, v) in out.iter_mut().zip(part.iter()) {
                *o += v;
            }
        }
        out
    }

    /// Multinomial sample of measurement outcomes; deterministic per seed.
    pub fn sample(&self, shots: usize, seed: u64) -> BTreeMap<usize, u64> {
        assert!(shots >= 1);
        let mut cumulative = Vec::with_capacity(self.dim());
        let mut acc = 0.0f64;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c < u).min(self.dim() - 1);
            *counts.entry(idx).or_insert(0u64) += 1;
        }
        counts
    }

    /// Cyclic site translation j -> j + shift (amplitude permutation).
    pub fn translate_sites(&self, params: &ModelParams, shift: isize) -> StateVector {
        assert_eq!(params.n_qubits(), self.n_qubits);
        let nq = params.n_q;
        let l = params.sites;
        let mask = params.levels() - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        out.par_iter_mut().enumerate().for_each(|(target, o)| {
            // Source configuration: site j of the source goes to site
            // j+shift of the target, so source site j = target site j+shift.
            let mut source = 0usize;
            for j in 0..l {
                let tj = params.wrap(j as isize + shift);
                let level = (target >> (nq * tj)) & mask;
                source |= level << (nq * j);
            }
            *o = self.amps[source];
        });
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// Spatial site reflection j -> (pivot - j) mod L, preserving the
    /// intra-site qubit order.
    pub fn reflect_sites(&self, params: &ModelParams, pivot: isize) -> StateVector {
        assert_eq!(params.n_qubits(), self.n_qubits);
        let nq = params.n_q;
        let l = params.sites;
        let mask = params.levels() - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        out.par_iter_mut().enumerate().for_each(|(target, o)| {
            let mut source = 0usize;
            for j in 0..l {
                let tj = params.wrap(pivot - j as isize);
                let level = (target >> (nq * tj)) & mask;
                source |= level << (nq * j);
            }
            *o = self.amps[source];
        });
        StateVector::from_amplitudes(self.n_qubits, out)
    }
}

/// Apply a bound circuit to the state in gate order.
pub fn apply(state: &mut StateVector, circuit: &Circuit, values: &[f64]) -> Result<(), CircuitError> {
    circuit.check_binding(values)?;
    if state.n_qubits != circuit.n_qubits {
        return Err(CircuitError::DimensionMismatch(format!(
            "state on {} qubits, circuit on {}",
            state.n_qubits, circuit.n_qubits
        )));
    }
    for gate in &circuit.gates {
        gate.validate(circuit.n_qubits, circuit.n_slots())?;
        apply_gate(state, gate, values);
    }
    Ok(())
}

/// Apply a single gate with resolved parameters.
pub fn apply_gate(state: &mut StateVector, gate: &Gate, values: &[f64]) {
    match &gate.kind {
        GateKind::Rot(axis, p) => {
            let m = Gate::rotation_matrix(*axis, p.resolve(values));
            apply_1q(state, gate.qubits[0], &m);
        }
        GateKind::RotZZ(p) => {
            let theta = p.resolve(values);
            let plus = Complex64::from_polar(1.0, -0.5 * theta);
            let minus = Complex64::from_polar(1.0, 0.5 * theta);
            let (a, b) = (gate.qubits[0], gate.qubits[1]);
            diag_map(state, move |i| {
                if ((i >> a) ^ (i >> b)) & 1 == 0 {
                    plus
                } else {
                    minus
                }
            });
        }
        GateKind::CZ => {
            let (a, b) = (gate.qubits[0], gate.qubits[1]);
            diag_map(state, move |i| {
                if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            });
        }
        GateKind::CX => {
            let (c, t) = (gate.qubits[0], gate.qubits[1]);
            // Representative of each swapped pair: control set, target clear.
            permute_pairs(state, move |i| {
                if (i >> c) & 1 == 1 && (i >> t) & 1 == 0 {
                    Some(i | (1 << t))
                } else {
                    None
                }
            });
        }
        GateKind::Swap => {
            let (a, b) = (gate.qubits[0], gate.qubits[1]);
            permute_pairs(state, move |i| {
                let ba = (i >> a) & 1;
                let bb = (i >> b) & 1;
                if ba == 1 && bb == 0 {
                    Some(i ^ (1 << a) ^ (1 << b))
                } else {
                    None
                }
            });
        }
        GateKind::Dense(m) => apply_dense(state, &gate.qubits, m),
    }
}

fn apply_1q(state: &mut StateVector, qubit: usize, m: &[Complex64; 4]) {
    let bit = 1usize << qubit;
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let dim = state.dim();
    let work = |amps: &mut [Complex64], base: usize| {
        for off in 0..amps.len() {
            let i = base + off;
            if i & bit == 0 && (i | bit) < base + amps.len() {
                let j = off | bit;
                let a = amps[off];
                let b = amps[j];
                amps[off] = m00 * a + m01 * b;
                amps[j] = m10 * a + m11 * b;
            }
        }
    };
    // Chunk so that each pair lives inside one chunk: chunk size must be a
    // multiple of 2*bit.
    let chunk = (2 * bit).max(1 << 12);
    if dim >= PARALLEL_THRESHOLD {
        state
            .amps
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(ci, amps)| work(amps, ci * chunk));
    } else {
        for (ci, amps) in state.amps.chunks_mut(chunk).enumerate() {
            work(amps, ci * chunk);
        }
    }
}

fn diag_map<F>(state: &mut StateVector, phase: F)
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let dim = state.dim();
    if dim >= PARALLEL_THRESHOLD {
        state
            .amps
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, a)| *a *= phase(i));
    } else {
        for (i, a) in state.amps.iter_mut().enumerate() {
            *a *= phase(i);
        }
    }
}

fn permute_pairs<F>(state: &mut StateVector, partner: F)
where
    F: Fn(usize) -> Option<usize> + Sync,
{
    // partner(i) = Some(j) designates i as the representative of an (i, j)
    // swap with j > or < i but unique per pair; chunks cannot be used since
    // pairs may straddle them, so fall back to an index walk.
    let dim = state.dim();
    if dim >= PARALLEL_THRESHOLD {
        let ptr = SyncPtr(state.amps.as_mut_ptr());
        let ptr = &ptr;
        (0..dim).into_par_iter().for_each(|i| {
            if let Some(j) = partner(i) {
                // Safety: each unordered pair (i, j) is visited exactly once.
                unsafe {
                    let p = ptr.0;
                    std::ptr::swap(p.add(i), p.add(j));
                }
            }
        });
    } else {
        for i in 0..dim {
            if let Some(j) = partner(i) {
                state.amps.swap(i, j);
            }
        }
    }
}

struct SyncPtr(*mut Complex64);
unsafe impl Sync for SyncPtr {}
unsafe impl Send for SyncPtr {}

fn apply_dense(state: &mut StateVector, qubits: &[usize], m: &nalgebra::DMatrix<Complex64>) {
    let k = qubits.len();
    let gdim = 1usize << k;
    let dim = state.dim();
    let n_groups = dim >> k;
    // Positions not touched by the gate carry the group counter bits.
    let mut free_bits = Vec::with_capacity(state.n_qubits - k);
    for b in 0..state.n_qubits {
        if !qubits.contains(&b) {
            free_bits.push(b);
        }
    }
    let gather_masks: Vec<usize> = qubits.iter().map(|&q| 1usize << q).collect();
    let local = |r: usize| -> usize {
        let mut base = 0usize;
        for (pos, &b) in free_bits.iter().enumerate() {
            if (r >> pos) & 1 == 1 {
                base |= 1 << b;
            }
        }
        base
    };
    let work = |base: usize, amps_ptr: *mut Complex64| {
        let mut buf = [Complex64::new(0.0, 0.0); 8];
        let mut idx = [0usize; 8];
        for (g, slot) in idx.iter_mut().enumerate().take(gdim) {
            let mut i = base;
            for (bpos, mask) in gather_masks.iter().enumerate() {
                if (g >> bpos) & 1 == 1 {
                    i |= mask;
                }
            }
            *slot = i;
        }
        unsafe {
            for g in 0..gdim {
                buf[g] = *amps_ptr.add(idx[g]);
            }
            for row in 0..gdim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, b) in buf.iter().enumerate().take(gdim) {
                    acc += m[(row, col)] * b;
                }
                *amps_ptr.add(idx[row]) = acc;
            }
        }
    };
    if dim >= PARALLEL_THRESHOLD {
        let ptr = SyncPtr(state.amps.as_mut_ptr());
        let ptr = &ptr;
        (0..n_groups).into_par_iter().for_each(|r| {
            // Safety: distinct r map to disjoint index groups.
            work(local(r), ptr.0);
        });
    } else {
        let ptr = state.amps.as_mut_ptr();
        for r in 0..n_groups {
            work(local(r), ptr);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gate::{hadamard, Axis, Param};
    use approx::assert_relative_eq;

    #[test]
    fn empty_circuit_leaves_state_unchanged() {
        let c = Circuit::new(2);
        let mut s = StateVector::basis(2, 2);
        let before = s.clone();
        apply(&mut s, &c, &[]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn x_rotation_by_pi_flips_qubit() {
        let mut c = Circuit::new(1);
        c.push(Gate::rot(Axis::X, 0, Param::Const(std::f64::consts::PI)));
        let mut s = StateVector::zero(1);
        apply(&mut s, &c, &[]).unwrap();
        assert_relative_eq!(s.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_circuit_matches_dense_oracle() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 6;
        let mut c = Circuit::new(n);
        for _ in 0..60 {
            match rng.gen_range(0..6) {
                0 => c.push(Gate::rot(Axis::X, rng.gen_range(0..n), Param::Const(rng.gen_range(-3.0..3.0)))),
                1 => c.push(Gate::rot(Axis::Y, rng.gen_range(0..n), Param::Const(rng.gen_range(-3.0..3.0)))),
                2 => c.push(Gate::rot(Axis::Z, rng.gen_range(0..n), Param::Const(rng.gen_range(-3.0..3.0)))),
                3 => {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    c.push(Gate::cx(a, b));
                }
                4 => {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    c.push(Gate::cz(a, b));
                }
                _ => {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    c.push(Gate::rot_zz(a, b, Param::Const(rng.gen_range(-3.0..3.0))));
                }
            }
        }
        // Dense product oracle, independent of the apply kernels: each gate
        // matrix is written down directly and embedded by basis-index
        // bookkeeping.
        let dim = 1usize << n;
        let embed = |small: &nalgebra::DMatrix<Complex64>, qubits: &[usize]| {
            let k = qubits.len();
            let gdim = 1usize << k;
            let mut full = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
            for col in 0..dim {
                let mut g = 0usize;
                for (pos, &q) in qubits.iter().enumerate() {
                    g |= ((col >> q) & 1) << pos;
                }
                for row_g in 0..gdim {
                    let mut row = col;
                    for (pos, &q) in qubits.iter().enumerate() {
                        row = (row & !(1 << q)) | (((row_g >> pos) & 1) << q);
                    }
                    full[(row, col)] += small[(row_g, g)];
                }
            }
            full
        };
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut u = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
        for gate in &c.gates {
            let full = match &gate.kind {
                GateKind::Rot(axis, p) => {
                    let m = Gate::rotation_matrix(*axis, p.resolve(&[]));
                    let small = nalgebra::DMatrix::from_row_slice(2, 2, &m);
                    embed(&small, &gate.qubits)
                }
                GateKind::RotZZ(p) => {
                    let t = p.resolve(&[]);
                    let d = |s: f64| Complex64::from_polar(1.0, s * 0.5 * t);
                    let small = nalgebra::DMatrix::from_diagonal(
                        &nalgebra::DVector::from_vec(vec![d(-1.0), d(1.0), d(1.0), d(-1.0)]),
                    );
                    embed(&small, &gate.qubits)
                }
                GateKind::CX => {
                    let small = nalgebra::DMatrix::from_row_slice(
                        4,
                        4,
                        &[
                            one, z, z, z, z, z, z, one, z, z, one, z, z, one, z, z,
                        ],
                    );
                    embed(&small, &gate.qubits)
                }
                GateKind::CZ => {
                    let small = nalgebra::DMatrix::from_diagonal(
                        &nalgebra::DVector::from_vec(vec![one, one, one, -one]),
                    );
                    embed(&small, &gate.qubits)
                }
                _ => unreachable!("not generated here"),
            };
            u = full * u;
        }
        let mut s = StateVector::zero(n);
        let mut init = vec![Complex64::new(0.0, 0.0); dim];
        init[0] = Complex64::new(1.0, 0.0);
        apply(&mut s, &c, &[]).unwrap();
        let expect = u * nalgebra::DVector::from_vec(init);
        for i in 0..dim {
            assert!((s.amplitudes()[i] - expect[i]).norm() < 1e-10);
        }
        assert_relative_eq!(s.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn dense_gate_on_nonadjacent_qubits() {
        // SWAP as dense matrix on qubits (0, 2) vs the builtin on a 3-qubit state.
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let m = nalgebra::DMatrix::from_row_slice(
            4,
            4,
            &[one, z, z, z, z, z, one, z, z, one, z, z, z, z, z, one],
        );
        let dense = Gate::dense(vec![0, 2], m).unwrap();
        let mut s1 = StateVector::basis(3, 0b001);
        apply_gate(&mut s1, &dense, &[]);
        let mut s2 = StateVector::basis(3, 0b001);
        apply_gate(&mut s2, &Gate::swap(0, 2), &[]);
        for i in 0..8 {
            assert!((s1.amplitudes()[i] - s2.amplitudes()[i]).norm() < 1e-14);
        }
        assert_relative_eq!(s1.amplitudes()[0b100].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_z_on_plus_state_is_zero() {
        let mut s = StateVector::zero(1);
        apply_gate(&mut s, &hadamard(0), &[]);
        let mut z = PauliSum::new(1);
        z.add_term(1.0, &[(0, PauliOp::Z)]);
        assert_relative_eq!(s.expectation(&z).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phi2_expectation_on_basis_state() {
        // |00> per site is the most negative field value, phi = -1.5.
        let p = ModelParams::new(2, 2, 0.5, 0.0, 1.5).unwrap();
        let s = StateVector::zero(4);
        let (phi2, _) = crate::lattice::phi2_phi4_pauli(0, &p).unwrap();
        assert_relative_eq!(s.expectation(&phi2).unwrap(), 2.25, epsilon = 1e-12);
        assert_relative_eq!(s.phi2_profile(&p)[0], 2.25, epsilon = 1e-12);
    }

    #[test]
    fn sampling_basis_state_is_deterministic() {
        let s = StateVector::basis(3, 5);
        let counts = s.sample(100, 42);
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&5], 100);
    }

    #[test]
    fn sampling_plus_state_is_balanced() {
        let mut s = StateVector::zero(1);
        apply_gate(&mut s, &hadamard(0), &[]);
        let counts = s.sample(8000, 1);
        let n0 = *counts.get(&0).unwrap_or(&0) as f64;
        // 5 sigma binomial bound around 4000.
        let sigma = (8000.0f64 * 0.25).sqrt();
        assert!((n0 - 4000.0).abs() < 5.0 * sigma, "n0 = {n0}");
    }

    #[test]
    fn empirical_zz_matches_exact_within_3_sigma() {
        let mut s = StateVector::zero(2);
        apply_gate(&mut s, &hadamard(0), &[]);
        apply_gate(&mut s, &Gate::rot(Axis::Y, 1, Param::Const(0.7)), &[]);
        apply_gate(&mut s, &Gate::cx(0, 1), &[]);
        let mut zz = PauliSum::new(2);
        zz.add_term(1.0, &[(0, PauliOp::Z), (1, PauliOp::Z)]);
        let exact = s.expectation(&zz).unwrap();
        let shots = 1_000_000usize;
        let counts = s.sample(shots, 3);
        let mut acc = 0.0;
        for (idx, c) in counts {
            let sign = if (idx & 3).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * c as f64;
        }
        let est = acc / shots as f64;
        let sigma = ((1.0 - exact * exact) / shots as f64).sqrt();
        assert!((est - exact).abs() < 3.0 * sigma, "est {est} vs exact {exact}");
    }

    #[test]
    fn translation_moves_sites() {
        let p = ModelParams::new(3, 2, 0.5, 0.0, 1.5).unwrap();
        // Site 0 in level 2, others in level 0.
        let s = StateVector::basis(6, 0b000010);
        let t = s.translate_sites(&p, 1);
        // Now site 1 should hold level 2.
        assert_relative_eq!(t.amplitudes()[0b001000].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn apply_is_linear() {
        let n = 4;
        let mut c = Circuit::new(n);
        c.push(Gate::rot(Axis::Y, 0, Param::Const(0.4)));
        c.push(Gate::cx(0, 2));
        c.push(Gate::rot_zz(1, 3, Param::Const(1.1)));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dim = 1usize << n;
        let psi1: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let psi2: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let alpha = Complex64::new(0.3, -0.2);
        let beta = Complex64::new(-0.8, 0.1);
        let combo: Vec<Complex64> = psi1
            .iter()
            .zip(psi2.iter())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let run = |amps: Vec<Complex64>| {
            let mut s = StateVector::from_amplitudes(n, amps);
            apply(&mut s, &c, &[]).unwrap();
            s
        };
        let r1 = run(psi1);
        let r2 = run(psi2);
        let rc = run(combo);
        for i in 0..dim {
            let lin = alpha * r1.amplitudes()[i] + beta * r2.amplitudes()[i];
            assert!((rc.amplitudes()[i] - lin).norm() < 1e-10);
        }
    }
}
