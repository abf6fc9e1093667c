//! Analytic free-theory states sampled on the digitized field grid.

use super::{
    build_grids, correlation_matrix_for_mass, dispersion, LatticeError, ModelParams, WavepacketSpec,
};
use crate::circuit::StateVector;
use num_complex::Complex64;
use rayon::prelude::*;

/// Free-theory vacuum: amplitude at field configuration phi proportional to
/// exp(-1/2 phi^T K phi), sampled at grid points and normalized.
pub fn vacuum_amplitudes(params: &ModelParams) -> Result<StateVector, LatticeError> {
    if params.lambda != 0.0 {
        return Err(LatticeError::RequiresFreeTheory(params.lambda));
    }
    vacuum_amplitudes_for_mass(params, params.mass)
}

/// Vacuum of the free theory with an explicit mass (effective-mass targets).
pub fn vacuum_amplitudes_for_mass(
    params: &ModelParams,
    mass: f64,
) -> Result<StateVector, LatticeError> {
    let quad = quadratic_form(params, mass);
    let dim = params.hilbert_dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps.par_iter_mut().enumerate().for_each(|(index, out)| {
        *out = Complex64::new((-0.5 * quad.evaluate(index)).exp(), 0.0);
    });
    let mut state = StateVector::from_amplitudes(params.n_qubits(), amps);
    state.normalize();
    Ok(state)
}

/// Single-particle Gaussian wavepacket on top of the free vacuum:
/// Gaussian envelope times a linear field polynomial whose site weights are
/// truncated to the packet window, then renormalized.
pub fn wavepacket_amplitudes(
    params: &ModelParams,
    spec: &WavepacketSpec,
) -> Result<StateVector, LatticeError> {
    if params.lambda != 0.0 {
        return Err(LatticeError::RequiresFreeTheory(params.lambda));
    }
    wavepacket_amplitudes_for_mass(params, spec, params.mass)
}

/// Wavepacket construction with an explicit mass (effective-mass targets).
pub fn wavepacket_amplitudes_for_mass(
    params: &ModelParams,
    spec: &WavepacketSpec,
    mass: f64,
) -> Result<StateVector, LatticeError> {
    if spec.width_sites > params.sites {
        return Err(LatticeError::WidthTooLarge {
            width: spec.width_sites,
            l: params.sites,
        });
    }
    let quad = quadratic_form(params, mass);
    let weights = wavepacket_site_weights_for_mass(params, spec, mass);
    let grids = build_grids(params);
    let phi = grids.phi_values;
    let levels_mask = params.levels() - 1;
    let nq = params.n_q;
    let l = params.sites;
    let dim = params.hilbert_dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps.par_iter_mut().enumerate().for_each(|(index, out)| {
        let gauss = (-0.5 * quad.evaluate(index)).exp();
        let mut linear = Complex64::new(0.0, 0.0);
        for j in 0..l {
            let w = weights[j];
            if w.norm_sqr() > 0.0 {
                linear += w * phi[(index >> (nq * j)) & levels_mask];
            }
        }
        *out = linear * gauss;
    });
    let mut state = StateVector::from_amplitudes(params.n_qubits(), amps);
    state.normalize();
    Ok(state)
}

/// Position-space field weights of the wavepacket before truncation:
/// w_j = (2/sqrt(L)) sum_k g(k) sqrt(E_k) e^{i k (j - center)}, zeroed
/// outside the packet window.
pub fn wavepacket_site_weights(params: &ModelParams, spec: &WavepacketSpec) -> Vec<Complex64> {
    wavepacket_site_weights_for_mass(params, spec, params.mass)
}

fn wavepacket_site_weights_for_mass(
    params: &ModelParams,
    spec: &WavepacketSpec,
    mass: f64,
) -> Vec<Complex64> {
    let l = params.sites;
    let momenta = params.momenta();
    let window = spec.window_sites(params);
    let mut weights = vec![Complex64::new(0.0, 0.0); l];
    for &j in &window {
        let rel = j as f64 - spec.center as f64;
        // Shortest signed displacement under periodic boundary conditions.
        let rel = if rel > l as f64 / 2.0 {
            rel - l as f64
        } else if rel < -(l as f64) / 2.0 {
            rel + l as f64
        } else {
            rel
        };
        let mut w = Complex64::new(0.0, 0.0);
        for &k in &momenta {
            let g = spec.envelope(k);
            let e = dispersion(k, mass).sqrt();
            let phase = k * rel;
            w += Complex64::new(phase.cos(), phase.sin()) * (2.0 * g * e);
        }
        weights[j] = w / (l as f64).sqrt();
    }
    weights
}

/// Precomputed quadratic form phi^T K phi over digitized configurations.
struct QuadraticForm {
    nq: usize,
    sites: usize,
    mask: usize,
    phi: Vec<f64>,
    k_matrix: Vec<f64>,
}

impl QuadraticForm {
    fn evaluate(&self, index: usize) -> f64 {
        let mut levels = [0usize; 16];
        for j in 0..self.sites {
            levels[j] = (index >> (self.nq * j)) & self.mask;
        }
        let mut total = 0.0;
        for j in 0..self.sites {
            let pj = self.phi[levels[j]];
            total += self.k_matrix[j * self.sites + j] * pj * pj;
            for jp in (j + 1)..self.sites {
                total += 2.0 * self.k_matrix[j * self.sites + jp] * pj * self.phi[levels[jp]];
            }
        }
        total
    }
}

fn quadratic_form(params: &ModelParams, mass: f64) -> QuadraticForm {
    assert!(params.sites <= 16, "analytic states limited to 16 sites");
    let cm = correlation_matrix_for_mass(params, mass);
    let l = params.sites;
    let mut k_matrix = vec![0.0; l * l];
    for j in 0..l {
        for jp in 0..l {
            k_matrix[j * l + jp] = cm.k_matrix[(j, jp)];
        }
    }
    QuadraticForm {
        nq: params.n_q,
        sites: l,
        mask: params.levels() - 1,
        phi: build_grids(params).phi_values,
        k_matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_is_normalized_real_positive() {
        let p = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        let v = vacuum_amplitudes(&p).unwrap();
        assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
        assert!(v.amplitudes().iter().all(|a| a.re > 0.0 && a.im == 0.0));
    }

    #[test]
    fn vacuum_rejects_interacting_theory() {
        let p = ModelParams::new(4, 2, 0.5, 2.0, 1.5).unwrap();
        assert!(vacuum_amplitudes(&p).is_err());
    }

    #[test]
    fn vacuum_field_reflection_symmetry() {
        let p = ModelParams::new(3, 2, 0.5, 0.0, 1.5).unwrap();
        let v = vacuum_amplitudes(&p).unwrap();
        let levels = p.levels();
        let dim = p.hilbert_dim();
        // phi -> -phi maps level l to levels-1-l on every site.
        for index in 0..dim {
            let mut flipped = 0usize;
            for j in 0..p.sites {
                let l = (index >> (p.n_q * j)) & (levels - 1);
                flipped |= (levels - 1 - l) << (p.n_q * j);
            }
            let a = v.amplitudes()[index];
            let b = v.amplitudes()[flipped];
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn vacuum_overlap_with_exact_ground_state() {
        let p = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        let v = vacuum_amplitudes(&p).unwrap();
        let h = crate::lattice::build_hamiltonian(&p).unwrap();
        let (e0, ground) = crate::solver::ground_state(&h).unwrap();
        let overlap: f64 = v
            .amplitudes()
            .iter()
            .zip(ground.amplitudes().iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            .abs();
        assert!(overlap > 0.95, "overlap {overlap} too small");
        // Rayleigh quotient within 5% of the exact ground energy.
        let rq = h.expectation(v.amplitudes());
        assert!(
            (rq - e0).abs() / e0.abs() < 0.05,
            "Rayleigh quotient {rq} vs E0 {e0}"
        );
    }

    #[test]
    fn zero_momentum_packet_is_symmetric_about_center() {
        let p = ModelParams::new(6, 2, 0.5, 0.0, 1.5).unwrap();
        let spec = WavepacketSpec::new(0.0, PI / 3.0, 3, 3);
        let wp = wavepacket_amplitudes(&p, &spec).unwrap();
        let profile = wp.phi2_profile(&p);
        // Sites 2 and 4 flank the center symmetrically.
        assert_relative_eq!(profile[2], profile[4], epsilon = 1e-10);
    }

    #[test]
    fn packet_weights_vanish_outside_window() {
        let p = ModelParams::new(8, 2, 0.5, 0.0, 1.5).unwrap();
        let spec = WavepacketSpec::new(-PI / 3.0, PI / 3.0, 4, 3);
        let w = wavepacket_site_weights(&p, &spec);
        for (j, v) in w.iter().enumerate() {
            if (3..=5).contains(&j) {
                assert!(v.norm() > 0.0);
            } else {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }

    #[test]
    fn width_larger_than_lattice_rejected() {
        let p = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        let spec = WavepacketSpec::new(0.0, PI / 3.0, 1, 5);
        assert!(wavepacket_amplitudes(&p, &spec).is_err());
    }
}
