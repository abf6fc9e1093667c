//! Exact time evolution e^{-itH}.
//!
//! Three paths by dimension: dense eigendecomposition for small systems,
//! Lanczos-Krylov propagation with a 1e-10 per-step tolerance for mid-size
//! systems, and high-resolution split stepping beyond 2^21 where storing a
//! Krylov basis would not fit in memory.

use super::state::StateVector;
use super::trotter::trotter_evolve;
use crate::lattice::{HamiltonianTerms, LatticeError};
use num_complex::Complex64;
use rayon::prelude::*;

const DENSE_LIMIT: usize = 1 << 10;
const KRYLOV_LIMIT: usize = 1 << 21;
const KRYLOV_TOL: f64 = 1e-10;
const LARGE_DT: f64 = 0.005;

/// e^{-itH} |psi>. Norm is preserved to 1e-10.
pub fn exact_evolve(
    state: &StateVector,
    ham: &HamiltonianTerms,
    t: f64,
) -> Result<StateVector, LatticeError> {
    let dim = ham.dim();
    assert_eq!(state.dim(), dim);
    if t == 0.0 {
        return Ok(state.clone());
    }
    if dim <= DENSE_LIMIT {
        Ok(dense_evolve(state, ham, t))
    } else if dim <= KRYLOV_LIMIT {
        Ok(krylov_evolve(state, ham, t))
    } else {
        // Memory-bound path: split stepping at fixed resolution.
        let n_steps = ((t.abs() / LARGE_DT).ceil() as usize).max(1);
        Ok(trotter_evolve(state, ham, t, n_steps))
    }
}

fn dense_evolve(state: &StateVector, ham: &HamiltonianTerms, t: f64) -> StateVector {
    let dense = ham.to_dense();
    let eig = nalgebra::SymmetricEigen::new(dense);
    let dim = ham.dim();
    let q = &eig.eigenvectors;
    // coeffs = Q^T psi, evolve phases, reassemble.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    let amps = state.amplitudes();
    for k in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            acc += amps[i] * q[(i, k)];
        }
        coeffs[k] = acc * Complex64::from_polar(1.0, -t * eig.eigenvalues[k]);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            acc += c * q[(i, k)];
        }
        *o = acc;
    }
    StateVector::from_amplitudes(state.n_qubits(), out)
}

/// Upper bound on the spectral radius from the diagonal range and the
/// per-site momentum block.
fn spectral_bound(ham: &HamiltonianTerms) -> f64 {
    let dmax = ham
        .diagonal()
        .par_iter()
        .cloned()
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let dmin = ham
        .diagonal()
        .par_iter()
        .cloned()
        .reduce(|| f64::INFINITY, f64::min);
    let block = ham.pi_site_block();
    let row_sum = (0..block.nrows())
        .map(|a| (0..block.ncols()).map(|b| block[(a, b)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    dmax.abs().max(dmin.abs()) + ham.params.sites as f64 * row_sum
}

fn krylov_evolve(state: &StateVector, ham: &HamiltonianTerms, t: f64) -> StateVector {
    let bound = spectral_bound(ham);
    let m_max = if ham.dim() <= 1 << 18 { 40 } else { 24 };
    let mut remaining = t;
    let mut current = state.clone();
    // Step so that ||H|| dt stays within the reliable Krylov regime.
    let dt_cap = 0.5 * m_max as f64 / bound.max(1e-12);
    while remaining.abs() > 1e-14 {
        let dt = remaining.signum() * remaining.abs().min(dt_cap);
        current = krylov_step(&current, ham, dt, m_max);
        remaining -= dt;
    }
    current
}

fn krylov_step(state: &StateVector, ham: &HamiltonianTerms, dt: f64, m_max: usize) -> StateVector {
    let dim = ham.dim();
    let beta0 = state.norm();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta = Vec::with_capacity(m_max);
    let inv = 1.0 / beta0;
    basis.push(state.amplitudes().iter().map(|a| a * inv).collect());
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut used = 0;
    for j in 0..m_max {
        ham.apply_complex(&basis[j], &mut w);
        if j > 0 {
            let b = beta[j - 1];
            let prev = &basis[j - 1];
            w.par_iter_mut()
                .zip(prev.par_iter())
                .for_each(|(wv, pv)| *wv -= pv * b);
        }
        let a_j: f64 = w
            .par_iter()
            .zip(basis[j].par_iter())
            .map(|(wv, vv)| (vv.conj() * wv).re)
            .sum();
        alpha.push(a_j);
        {
            let vj = &basis[j];
            w.par_iter_mut()
                .zip(vj.par_iter())
                .for_each(|(wv, vv)| *wv -= vv * a_j);
        }
        // One round of reorthogonalization keeps the basis clean enough for
        // propagation tolerances.
        for prev in &basis {
            let proj: Complex64 = w
                .par_iter()
                .zip(prev.par_iter())
                .map(|(wv, pv)| pv.conj() * wv)
                .reduce(|| Complex64::new(0.0, 0.0), |x, y| x + y);
            if proj.norm() > 1e-14 {
                w.par_iter_mut()
                    .zip(prev.par_iter())
                    .for_each(|(wv, pv)| *wv -= pv * proj);
            }
        }
        let b_next: f64 = w.par_iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        used = j + 1;
        // Convergence estimate: weight of the last Krylov component in the
        // propagated small system.
        let u = tridiag_expm_e1(&alpha, &beta, dt);
        let tail = beta.last().map(|b| b.abs()).unwrap_or(0.0) * u.last().map(|c| c.norm()).unwrap_or(1.0);
        if b_next < 1e-12 || (used >= 4 && tail * b_next.max(1.0) < KRYLOV_TOL) {
            break;
        }
        beta.push(b_next);
        let next: Vec<Complex64> = w.iter().map(|v| v / b_next).collect();
        basis.push(next);
    }
    let u = tridiag_expm_e1(&alpha[..used], &beta[..used.saturating_sub(1)], dt);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (j, coeff) in u.iter().enumerate() {
        let c = coeff * beta0;
        out.par_iter_mut()
            .zip(basis[j].par_iter())
            .for_each(|(ov, bv)| *ov += bv * c);
    }
    StateVector::from_amplitudes(state.n_qubits(), out)
}

/// expm(-i dt T) e_1 for a real symmetric tridiagonal T.
fn tridiag_expm_e1(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let m = alpha.len();
    if m == 0 {
        return vec![];
    }
    let mut t = nalgebra::DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = alpha[j];
        if j + 1 < m && j < beta.len() {
            t[(j, j + 1)] = beta[j];
            t[(j + 1, j)] = beta[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let q = &eig.eigenvectors;
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    for (i, uv) in u.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            acc += Complex64::from_polar(1.0, -dt * eig.eigenvalues[k]) * q[(i, k)] * q[(0, k)];
        }
        *uv = acc;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, ModelParams};
    use approx::assert_relative_eq;

    #[test]
    fn zero_time_is_identity() {
        let p = ModelParams::new(2, 2, 0.5, 0.0, 1.5).unwrap();
        let ham = build_hamiltonian(&p).unwrap();
        let s = crate::lattice::vacuum_amplitudes(&p).unwrap();
        let out = exact_evolve(&s, &ham, 0.0).unwrap();
        assert!(s.infidelity(&out) < 1e-14);
    }

    #[test]
    fn eigenstate_evolves_by_phase_only() {
        let p = ModelParams::new(3, 2, 0.5, 2.0, 1.5).unwrap();
        let ham = build_hamiltonian(&p).unwrap();
        let (_, ground) = crate::solver::ground_state(&ham).unwrap();
        let out = exact_evolve(&ground, &ham, 1.7).unwrap();
        // Observables unchanged.
        let before = ground.phi2_profile(&p);
        let after = out.phi2_profile(&p);
        for (a, b) in before.iter().zip(after.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
        assert!(ground.infidelity(&out) < 1e-10);
        assert_relative_eq!(out.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn krylov_matches_dense_path() {
        // 12-qubit case runs the Krylov branch; compare against the dense
        // path on the same problem by lowering the dense limit artificially:
        // here simply compare Krylov to a high-resolution split stepping.
        let p = ModelParams::new(3, 2, 0.5, 2.0, 1.5).unwrap();
        let ham = build_hamiltonian(&p).unwrap();
        let spec = crate::lattice::WavepacketSpec::new(
            std::f64::consts::PI / 3.0,
            std::f64::consts::PI / 3.0,
            1,
            3,
        );
        let free = ModelParams { lambda: 0.0, ..p };
        let psi0 = crate::lattice::wavepacket_amplitudes(&free, &spec).unwrap();
        let a = krylov_evolve(&psi0, &ham, 1.3);
        let b = dense_evolve(&psi0, &ham, 1.3);
        assert!(a.infidelity(&b) < 1e-9);
        assert_relative_eq!(a.norm(), 1.0, epsilon = 1e-10);
    }
}
