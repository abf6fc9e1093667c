//! Classical oracles: eigensolvers, momentum-sector analysis, correlation
//! lengths, adiabatic wavepacket preparation, and center tracking.

mod adiabatic;
pub mod fit;
pub mod lanczos;
mod momentum;
mod track;

pub use adiabatic::{adiabatic_wavepacket, adiabatic_wavepacket_traced, AdiabaticSchedule};
pub use fit::{exp_fit, ExpFit};
pub use lanczos::{
    lowest_eigenpairs_complex, lowest_eigenpairs_real, residual_norm_real, HermitianOp, RealSymOp,
};
pub use momentum::{
    ed_wavepacket, momentum_analysis, sector_states, single_momentum_excitation, MomentumTable,
};
pub use track::track_center;

use crate::circuit::StateVector;
use crate::lattice::{build_hamiltonian, HamiltonianTerms, ModelParams};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("dimension {0} too large for this solver path")]
    DimensionTooLarge(usize),
    #[error("exponential fit failed: {0}")]
    FitFailure(String),
    #[error("translation operator failed its unitarity/commutation checks")]
    TranslationNotUnitary,
    #[error("profile has no structure to track")]
    FlatProfile,
    #[error("bad tracking window {0}")]
    BadWindow(String),
    #[error("bad adiabatic schedule {0}")]
    BadSchedule(String),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Lowest eigenpair of the Hamiltonian with residual below 1e-8.
pub fn ground_state(ham: &HamiltonianTerms) -> Result<(f64, StateVector), SolverError> {
    let (values, vectors) = lowest_eigenpairs_real(ham, 1, 1e-9, 12345)?;
    let residual = residual_norm_real(ham, values[0], &vectors[0]);
    if residual > 1e-8 {
        return Err(SolverError::NonConvergence {
            iterations: lanczos::ITERATION_CAP,
            residual,
        });
    }
    let amps: Vec<Complex64> = vectors[0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok((
        values[0],
        StateVector::from_amplitudes(ham.params.n_qubits(), amps),
    ))
}

/// Lowest `k` eigenvalues with the same guarantees as [`ground_state`].
pub fn lowest_eigenvalues(ham: &HamiltonianTerms, k: usize) -> Result<Vec<f64>, SolverError> {
    let (values, vectors) = lowest_eigenpairs_real(ham, k, 1e-9, 12345)?;
    for (v, vec) in values.iter().zip(vectors.iter()) {
        let residual = residual_norm_real(ham, *v, vec);
        if residual > 1e-8 {
            return Err(SolverError::NonConvergence {
                iterations: lanczos::ITERATION_CAP,
                residual,
            });
        }
    }
    Ok(values)
}

/// Inverse-gap correlation lengths per system size with an exponential
/// extrapolation to infinite volume.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    /// (L, gap, xi) per requested system size.
    pub per_size: Vec<(usize, f64, f64)>,
    pub xi_infinite: f64,
    pub fit: ExpFit,
}

impl SpectralSummary {
    pub fn export_csv(&self) -> String {
        let mut out = String::from("L,gap,xi\n");
        for (l, gap, xi) in &self.per_size {
            out.push_str(&format!("{l},{gap:.12e},{xi:.12e}\n"));
        }
        out.push_str(&format!("inf,,{:.12e}\n", self.xi_infinite));
        out
    }
}

/// xi(L) = 1/gap(L) for each size in `l_list` (ascending, at least three
/// entries) followed by the exponential fit xi(L) = xi_inf + a r^L.
pub fn correlation_length(
    params: &ModelParams,
    l_list: &[usize],
) -> Result<SpectralSummary, SolverError> {
    if l_list.len() < 3 || l_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolverError::FitFailure(
            "need an ascending list of at least 3 sizes".into(),
        ));
    }
    let mut per_size = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let p = ModelParams {
            sites: l,
            ..*params
        };
        let ham = build_hamiltonian(&p)?;
        let values = lowest_eigenvalues(&ham, 2)?;
        let gap = values[1] - values[0];
        if gap <= 0.0 {
            return Err(SolverError::FitFailure(format!(
                "non-positive gap {gap} at L={l}"
            )));
        }
        per_size.push((l, gap, 1.0 / gap));
    }
    let samples: Vec<(f64, f64)> = per_size.iter().map(|&(l, _, xi)| (l as f64, xi)).collect();
    let fit = exp_fit(&samples)?;
    if fit.rate.abs() >= 1.0 {
        return Err(SolverError::FitFailure(format!(
            "non-decaying fit rate {}",
            fit.rate
        )));
    }
    Ok(SpectralSummary {
        per_size,
        xi_infinite: fit.offset,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_matches_dense_and_has_field_symmetry() {
        let p = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        let ham = build_hamiltonian(&p).unwrap();
        let (e0, state) = ground_state(&ham).unwrap();
        // Dense oracle eigenvector overlap.
        let dense = ham.to_dense();
        let eig = nalgebra::SymmetricEigen::new(dense);
        let mut imin = 0;
        for i in 0..eig.eigenvalues.len() {
            if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                imin = i;
            }
        }
        assert_relative_eq!(e0, eig.eigenvalues[imin], epsilon = 1e-9);
        let overlap: f64 = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| a.re * eig.eigenvectors[(i, imin)])
            .sum::<f64>()
            .abs();
        assert!(overlap > 1.0 - 1e-9, "overlap {overlap}");
        // phi -> -phi symmetry: <phi_j> vanishes on the ground state.
        let phi0 = crate::lattice::phi_pauli(0, &p).unwrap();
        assert_relative_eq!(state.expectation(&phi0).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn constant_gap_sequence_extrapolates_to_constant() {
        let samples = vec![(4.0, 2.5), (6.0, 2.5), (8.0, 2.5)];
        let fit = exp_fit(&samples).unwrap();
        assert_relative_eq!(fit.offset, 2.5, epsilon = 1e-12);
        assert_eq!(fit.amplitude, 0.0);
    }
}
