//! Adiabatic turn-on of the quartic coupling.
//!
//! Free wavepackets flow into interacting ones by ramping lambda in N steps
//! while undoing free propagation: each step runs a forward half-leg with a
//! lambda staircase, a backward leg at the fixed midpoint lambda, and a
//! second forward half-leg. Substeps are second-order splits between the
//! field-diagonal groups and the per-site momentum term, both applied
//! exactly.

use super::SolverError;
use crate::circuit::StateVector;
use crate::lattice::{build_grids, build_hamiltonian, ModelParams};
use num_complex::Complex64;
use rayon::prelude::*;

/// Ramp schedule. The defaults follow the step counts used throughout:
/// total time 100, 10 steps, 1000 substeps per leg, linear lambda ramp
/// advanced once every 10 forward substeps.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticSchedule {
    pub total_time: f64,
    pub steps: usize,
    pub substeps_per_leg: usize,
}

impl Default for AdiabaticSchedule {
    fn default() -> Self {
        AdiabaticSchedule {
            total_time: 100.0,
            steps: 10,
            substeps_per_leg: 1000,
        }
    }
}

impl AdiabaticSchedule {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.total_time <= 0.0 || self.steps == 0 || self.substeps_per_leg < 20 {
            return Err(SolverError::BadSchedule(format!("{self:?}")));
        }
        Ok(())
    }
}

struct RampEvolver {
    diag_free: Vec<f64>,
    diag_int: Vec<f64>,
    pi_eigvals: Vec<f64>,
    pi_eigvecs: nalgebra::DMatrix<f64>,
    nq: usize,
    sites: usize,
}

impl RampEvolver {
    fn new(params: &ModelParams) -> Self {
        let free = ModelParams {
            lambda: 0.0,
            ..*params
        };
        let ham_free = build_hamiltonian(&free).expect("valid params");
        let grids = build_grids(params);
        let nq = params.n_q;
        let mask = params.levels() - 1;
        let sites = params.sites;
        let phi4: Vec<f64> = grids.phi_values.iter().map(|p| p.powi(4) / 24.0).collect();
        let dim = params.hilbert_dim();
        let mut diag_int = vec![0.0f64; dim];
        diag_int.par_iter_mut().enumerate().for_each(|(index, o)| {
            let mut acc = 0.0;
            for j in 0..sites {
                acc += phi4[(index >> (nq * j)) & mask];
            }
            *o = acc;
        });
        let eig = nalgebra::SymmetricEigen::new(ham_free.pi_site_block().clone());
        RampEvolver {
            diag_free: ham_free.diagonal().to_vec(),
            diag_int,
            pi_eigvals: eig.eigenvalues.iter().cloned().collect(),
            pi_eigvecs: eig.eigenvectors,
            nq,
            sites,
        }
    }

    fn exp_block(&self, dt: f64) -> nalgebra::DMatrix<Complex64> {
        let n = self.pi_eigvals.len();
        let mut out = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += Complex64::from_polar(1.0, -dt * self.pi_eigvals[k])
                        * self.pi_eigvecs[(a, k)]
                        * self.pi_eigvecs[(b, k)];
                }
                out[(a, b)] = acc;
            }
        }
        out
    }

    fn apply_diag(&self, amps: &mut [Complex64], lambda: f64, dt: f64) {
        amps.par_iter_mut()
            .zip(self.diag_free.par_iter().zip(self.diag_int.par_iter()))
            .for_each(|(a, (&d0, &d1))| {
                *a *= Complex64::from_polar(1.0, -dt * (d0 + lambda * d1));
            });
    }

    fn apply_pi(&self, amps: &mut [Complex64], block: &nalgebra::DMatrix<Complex64>) {
        let levels = 1usize << self.nq;
        for site in 0..self.sites {
            let stride = 1usize << (self.nq * site);
            let span = stride * levels;
            amps.par_chunks_mut(span).for_each(|chunk| {
                let mut buf = [Complex64::new(0.0, 0.0); 8];
                for low in 0..stride {
                    for (a, slot) in buf.iter_mut().enumerate().take(levels) {
                        *slot = chunk[low + a * stride];
                    }
                    for a in 0..levels {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (b, v) in buf.iter().enumerate().take(levels) {
                            acc += block[(a, b)] * v;
                        }
                        chunk[low + a * stride] = acc;
                    }
                }
            });
        }
    }

    /// Evolve `n_sub` second-order substeps at fixed lambda and signed dt.
    fn run_constant(
        &self,
        amps: &mut [Complex64],
        lambda: f64,
        dt: f64,
        n_sub: usize,
        block: &nalgebra::DMatrix<Complex64>,
    ) {
        if n_sub == 0 {
            return;
        }
        self.apply_diag(amps, lambda, 0.5 * dt);
        self.apply_pi(amps, block);
        for _ in 1..n_sub {
            self.apply_diag(amps, lambda, dt);
            self.apply_pi(amps, block);
        }
        self.apply_diag(amps, lambda, 0.5 * dt);
    }
}

/// Carry a free wavepacket into the interacting theory. The target coupling
/// is `params.lambda`; with a zero coupling the input state is returned
/// unchanged. Returns the final state and the energy expectation recorded
/// after every adiabatic step.
pub fn adiabatic_wavepacket_traced(
    free_state: &StateVector,
    params: &ModelParams,
    schedule: &AdiabaticSchedule,
) -> Result<(StateVector, Vec<f64>), SolverError> {
    schedule.validate()?;
    if params.lambda == 0.0 {
        return Ok((free_state.clone(), Vec::new()));
    }
    if params.hilbert_dim() > 1 << 24 {
        return Err(SolverError::DimensionTooLarge(params.hilbert_dim()));
    }
    let evolver = RampEvolver::new(params);
    let ham_full = build_hamiltonian(params).map_err(SolverError::Lattice)?;
    let n_steps = schedule.steps;
    let half_leg_time = schedule.total_time / (2.0 * n_steps as f64);
    let half_leg_subs = (schedule.substeps_per_leg / 2).max(1);
    let dt_fwd = half_leg_time / half_leg_subs as f64;
    let back_time = schedule.total_time / n_steps as f64;
    let dt_back = -back_time / schedule.substeps_per_leg as f64;
    // Lambda staircase advances once every 10 forward substeps.
    let groups_per_half = (half_leg_subs / 10).max(1);
    let subs_per_group = half_leg_subs / groups_per_half;

    let block_fwd = evolver.exp_block(dt_fwd);
    let block_back = evolver.exp_block(dt_back);

    let mut state = free_state.clone();
    let mut energies = Vec::with_capacity(n_steps);
    for step in 0..n_steps {
        let s_start = step as f64 / n_steps as f64;
        let s_mid = (2 * step + 1) as f64 / (2 * n_steps) as f64;
        let s_end = (step + 1) as f64 / n_steps as f64;
        // Forward half-leg A with staircase sampled at group midpoints.
        for g in 0..groups_per_half {
            let s = s_start + (g as f64 + 0.5) * (s_mid - s_start) / groups_per_half as f64;
            evolver.run_constant(
                state.amplitudes_mut(),
                params.lambda * s,
                dt_fwd,
                subs_per_group,
                &block_fwd,
            );
        }
        // Backward leg at the fixed midpoint coupling.
        evolver.run_constant(
            state.amplitudes_mut(),
            params.lambda * s_mid,
            dt_back,
            schedule.substeps_per_leg,
            &block_back,
        );
        // Forward half-leg B.
        for g in 0..groups_per_half {
            let s = s_mid + (g as f64 + 0.5) * (s_end - s_mid) / groups_per_half as f64;
            evolver.run_constant(
                state.amplitudes_mut(),
                params.lambda * s,
                dt_fwd,
                subs_per_group,
                &block_fwd,
            );
        }
        energies.push(ham_full.expectation(state.amplitudes()));
    }
    state.normalize();
    Ok((state, energies))
}

/// [`adiabatic_wavepacket_traced`] without the energy trace.
pub fn adiabatic_wavepacket(
    free_state: &StateVector,
    params: &ModelParams,
    schedule: &AdiabaticSchedule,
) -> Result<StateVector, SolverError> {
    adiabatic_wavepacket_traced(free_state, params, schedule).map(|(s, _)| s)
}
