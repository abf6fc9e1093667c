//! The digitized scalar field theory: field grids, operator encodings,
//! Hamiltonian terms, analytic free-theory states, and digitization
//! diagnostics.

mod digitize;
mod hamiltonian;
pub mod pauli;
mod states;

pub use digitize::{optimal_phi_max, shannon_interpolate};
pub use hamiltonian::{build_hamiltonian, HamiltonianTerms, SparseMatrix};
pub use pauli::{PauliOp, PauliSum};
pub use states::{vacuum_amplitudes, wavepacket_amplitudes, wavepacket_site_weights};

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("site index {site} out of range for L={l}")]
    SiteOutOfRange { site: usize, l: usize },
    #[error("unsupported qubits per site n_q={0} (1..=3 supported)")]
    UnsupportedNq(usize),
    #[error("Hilbert dimension 2^{0} exceeds the supported bound")]
    DimensionOverflow(u32),
    #[error("operation requires a free theory (lambda=0), got lambda={0}")]
    RequiresFreeTheory(f64),
    #[error("wavepacket width {width} exceeds lattice size {l}")]
    WidthTooLarge { width: usize, l: usize },
    #[error("empty search range")]
    EmptySearchRange,
}

/// Lattice and digitization configuration, lattice units a=1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Number of spatial sites L (periodic boundary conditions).
    pub sites: usize,
    /// Qubits per site n_q; the field takes 2^n_q values.
    pub n_q: usize,
    /// Bare mass m.
    pub mass: f64,
    /// Quartic coupling lambda.
    pub lambda: f64,
    /// Field cutoff phi_max; the grid spans [-phi_max, phi_max].
    pub phi_max: f64,
}

impl ModelParams {
    pub fn new(
        sites: usize,
        n_q: usize,
        mass: f64,
        lambda: f64,
        phi_max: f64,
    ) -> Result<Self, LatticeError> {
        if sites < 2 {
            return Err(LatticeError::InvalidParams(format!(
                "need at least 2 sites, got {sites}"
            )));
        }
        if !(1..=3).contains(&n_q) {
            return Err(LatticeError::UnsupportedNq(n_q));
        }
        if !(phi_max > 0.0) {
            return Err(LatticeError::InvalidParams(format!(
                "phi_max must be positive, got {phi_max}"
            )));
        }
        if lambda < 0.0 {
            return Err(LatticeError::InvalidParams(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        Ok(Self {
            sites,
            n_q,
            mass,
            lambda,
            phi_max,
        })
    }

    /// Grid step delta_phi = 2 phi_max / (2^n_q - 1).
    pub fn delta_phi(&self) -> f64 {
        2.0 * self.phi_max / ((1usize << self.n_q) - 1) as f64
    }

    /// Field values per site, 2^n_q of them.
    pub fn levels(&self) -> usize {
        1 << self.n_q
    }

    pub fn n_qubits(&self) -> usize {
        self.n_q * self.sites
    }

    pub fn hilbert_dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    /// Qubit index of bit `bit` within site `site`.
    pub fn qubit(&self, site: usize, bit: usize) -> usize {
        self.n_q * site + bit
    }

    /// Site index arithmetic modulo L.
    pub fn wrap(&self, site: isize) -> usize {
        site.rem_euclid(self.sites as isize) as usize
    }

    /// Allowed spatial momenta 2 pi n / L in (-pi, pi].
    pub fn momenta(&self) -> Vec<f64> {
        let l = self.sites as isize;
        let mut ks: Vec<f64> = (0..l)
            .map(|n| {
                let mut n = n;
                if n > l / 2 {
                    n -= l;
                }
                2.0 * PI * n as f64 / l as f64
            })
            .collect();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ks
    }

    /// Flat key-value serialization (keys: L, n_q, m, lambda, phi_max).
    pub fn to_key_values(&self) -> String {
        format!(
            "L = {}\nn_q = {}\nm = {}\nlambda = {}\nphi_max = {}\n",
            self.sites, self.n_q, self.mass, self.lambda, self.phi_max
        )
    }

    pub fn from_key_values(text: &str) -> Result<Self, LatticeError> {
        let mut l = None;
        let mut n_q = None;
        let mut m = None;
        let mut lambda = None;
        let mut phi_max = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LatticeError::InvalidParams(format!("malformed line: {line}")))?;
            let value = value.trim();
            match key.trim() {
                "L" => l = Some(value.parse().map_err(bad_value)?),
                "n_q" => n_q = Some(value.parse().map_err(bad_value)?),
                "m" => m = Some(value.parse().map_err(bad_value)?),
                "lambda" => lambda = Some(value.parse().map_err(bad_value)?),
                "phi_max" => phi_max = Some(value.parse().map_err(bad_value)?),
                other => {
                    return Err(LatticeError::InvalidParams(format!("unknown key {other}")));
                }
            }
        }
        let missing = |k: &str| LatticeError::InvalidParams(format!("missing key {k}"));
        Self::new(
            l.ok_or_else(|| missing("L"))?,
            n_q.ok_or_else(|| missing("n_q"))?,
            m.ok_or_else(|| missing("m"))?,
            lambda.ok_or_else(|| missing("lambda"))?,
            phi_max.ok_or_else(|| missing("phi_max"))?,
        )
    }
}

fn bad_value<E: std::fmt::Display>(e: E) -> LatticeError {
    LatticeError::InvalidParams(format!("bad value: {e}"))
}

/// Digitized field and conjugate-momentum grids.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitizedGrids {
    /// phi_l = -phi_max + l*delta_phi.
    pub phi_values: Vec<f64>,
    /// k_phi,l = -pi/delta_phi + (l + 1/2) * 2 pi / (2^n_q delta_phi).
    pub kphi_values: Vec<f64>,
}

/// Field and conjugate-momentum grids for the given digitization.
pub fn build_grids(params: &ModelParams) -> DigitizedGrids {
    let levels = params.levels();
    let dphi = params.delta_phi();
    let phi_values = (0..levels)
        .map(|l| -params.phi_max + l as f64 * dphi)
        .collect();
    let kphi_values = (0..levels)
        .map(|l| -PI / dphi + (l as f64 + 0.5) * 2.0 * PI / (levels as f64 * dphi))
        .collect();
    DigitizedGrids {
        phi_values,
        kphi_values,
    }
}

/// Field operator on site `site` as a sum of single-Z terms.
pub fn phi_pauli(site: usize, params: &ModelParams) -> Result<PauliSum, LatticeError> {
    if site >= params.sites {
        return Err(LatticeError::SiteOutOfRange {
            site,
            l: params.sites,
        });
    }
    let mut sum = PauliSum::new(params.n_qubits());
    let norm = params.phi_max / ((1usize << params.n_q) - 1) as f64;
    for bit in 0..params.n_q {
        sum.add_term(
            -norm * (1u64 << bit) as f64,
            &[(params.qubit(site, bit), PauliOp::Z)],
        );
    }
    Ok(sum)
}

/// Conjugate-momentum operator on site `site`, valid in the per-site
/// momentum eigenbasis. Callers must conjugate with the symmetric QFT to act
/// in the field basis.
pub fn pi_pauli(site: usize, params: &ModelParams) -> Result<PauliSum, LatticeError> {
    if site >= params.sites {
        return Err(LatticeError::SiteOutOfRange {
            site,
            l: params.sites,
        });
    }
    let mut sum = PauliSum::new(params.n_qubits());
    let norm = PI / (params.levels() as f64 * params.delta_phi());
    for bit in 0..params.n_q {
        sum.add_term(
            -norm * (1u64 << bit) as f64,
            &[(params.qubit(site, bit), PauliOp::Z)],
        );
    }
    Ok(sum)
}

/// phi^2 and phi^4 on one site, built by squaring the field operator
/// symbolically. For n_q=2 these reduce to the closed forms
/// phi^2 = (phi_max^2/9)(5 I + 4 ZZ), phi^4 = (phi_max^4/81)(41 I + 40 ZZ).
pub fn phi2_phi4_pauli(
    site: usize,
    params: &ModelParams,
) -> Result<(PauliSum, PauliSum), LatticeError> {
    let phi = phi_pauli(site, params)?;
    let phi2 = phi.mul_diagonal(&phi);
    let phi4 = phi2.mul_diagonal(&phi2);
    Ok((phi2, phi4))
}

/// Lattice single-particle energy E_k = sqrt(m^2 + 4 sin^2(k/2)).
pub fn dispersion(k: f64, mass: f64) -> f64 {
    (mass * mass + 4.0 * (0.5 * k).sin().powi(2)).sqrt()
}

/// Lattice group velocity v_k = sin k / E_k.
pub fn group_velocity(k: f64, mass: f64) -> f64 {
    k.sin() / dispersion(k, mass)
}

/// Continuum energy sqrt(m^2 + k^2).
pub fn dispersion_continuum(k: f64, mass: f64) -> f64 {
    (mass * mass + k * k).sqrt()
}

/// Continuum group velocity k / sqrt(m^2 + k^2).
pub fn group_velocity_continuum(k: f64, mass: f64) -> f64 {
    k / dispersion_continuum(k, mass)
}

/// Largest lattice group velocity over k, bounding correlation spread.
pub fn max_group_velocity(mass: f64) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=2000 {
        let k = PI * i as f64 / 2000.0;
        best = best.max(group_velocity(k, mass));
    }
    best
}

/// Spatial Fourier data for the free theory: E (diagonal energies), the
/// Fourier matrix V, and the position-space correlation matrix K = V^dag E V.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub momenta: Vec<f64>,
    pub energies: Vec<f64>,
    pub fourier: nalgebra::DMatrix<num_complex::Complex64>,
    pub k_matrix: nalgebra::DMatrix<f64>,
}

/// Build E, V, K for the free theory with the given bare mass.
pub fn correlation_matrix(params: &ModelParams) -> CorrelationMatrix {
    correlation_matrix_for_mass(params, params.mass)
}

/// Same as [`correlation_matrix`] with an explicit mass (used for
/// effective-mass constructions).
pub fn correlation_matrix_for_mass(params: &ModelParams, mass: f64) -> CorrelationMatrix {
    use num_complex::Complex64;
    let l = params.sites;
    let momenta = params.momenta();
    let energies: Vec<f64> = momenta.iter().map(|&k| dispersion(k, mass)).collect();
    let norm = 1.0 / (l as f64).sqrt();
    let fourier = nalgebra::DMatrix::from_fn(l, l, |row, col| {
        let phase = momenta[row] * col as f64;
        Complex64::new(phase.cos(), phase.sin()) * norm
    });
    // K_{j j'} = (1/L) sum_k E_k cos(k (j - j')), real symmetric circulant.
    let k_matrix = nalgebra::DMatrix::from_fn(l, l, |row, col| {
        let d = row as f64 - col as f64;
        momenta
            .iter()
            .zip(energies.iter())
            .map(|(&k, &e)| e * (k * d).cos())
            .sum::<f64>()
            / l as f64
    });
    CorrelationMatrix {
        momenta,
        energies,
        fourier,
        k_matrix,
    }
}

/// Effective mass of the n_q=2 digitized interacting theory:
/// m' = sqrt(m^2 + (lambda/4!)(20/9) phi_max^2).
pub fn effective_mass(params: &ModelParams) -> Result<f64, LatticeError> {
    if params.n_q != 2 {
        return Err(LatticeError::UnsupportedNq(params.n_q));
    }
    Ok((params.mass * params.mass
        + params.lambda / 24.0 * (20.0 / 9.0) * params.phi_max * params.phi_max)
        .sqrt())
}

/// Gaussian momentum-space envelope for a wavepacket centered at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    /// Central momentum in (-pi, pi].
    pub momentum: f64,
    /// Momentum spread sigma_p.
    pub sigma: f64,
    /// Site the packet is centered on.
    pub center: usize,
    /// Spatial truncation width in sites.
    pub width_sites: usize,
}

impl WavepacketSpec {
    pub fn new(momentum: f64, sigma: f64, center: usize, width_sites: usize) -> Self {
        Self {
            momentum,
            sigma,
            center,
            width_sites,
        }
    }

    /// Envelope value g(k, p; sigma_p).
    pub fn envelope(&self, k: f64) -> f64 {
        let z = (k - self.momentum) / self.sigma;
        (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * self.sigma)
    }

    /// Sites covered by the truncation window, centered on `center`.
    pub fn window_sites(&self, params: &ModelParams) -> Vec<usize> {
        let half = (self.width_sites as isize - 1) / 2;
        (0..self.width_sites as isize)
            .map(|o| params.wrap(self.center as isize - half + o))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params_nq2() -> ModelParams {
        ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap()
    }

    #[test]
    fn grids_match_digitization_formulas() {
        let p = params_nq2();
        let g = build_grids(&p);
        assert_eq!(g.phi_values, vec![-1.5, -0.5, 0.5, 1.5]);
        assert_relative_eq!(p.delta_phi(), 1.0);
        let expected = [-3.0 * PI / 4.0, -PI / 4.0, PI / 4.0, 3.0 * PI / 4.0];
        for (a, b) in g.kphi_values.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
        // Symmetry about zero.
        for l in 0..4 {
            assert_relative_eq!(g.phi_values[l], -g.phi_values[3 - l], epsilon = 1e-14);
            assert_relative_eq!(g.kphi_values[l], -g.kphi_values[3 - l], epsilon = 1e-14);
        }
    }

    #[test]
    fn grids_two_level_case() {
        let p = ModelParams::new(2, 1, 1.0, 0.0, 1.0).unwrap();
        let g = build_grids(&p);
        assert_eq!(g.phi_values, vec![-1.0, 1.0]);
    }

    #[test]
    fn phi_pauli_coefficients_and_eigenvalues() {
        let p = params_nq2();
        let phi = phi_pauli(0, &p).unwrap();
        let mut coeffs: Vec<f64> = phi.terms().iter().map(|(c, _)| *c).collect();
        coeffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(coeffs[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(coeffs[1], -0.5, epsilon = 1e-15);
        // Eigenvalues on site 0 match the phi grid exactly.
        let g = build_grids(&p);
        for l in 0..4 {
            assert_relative_eq!(phi.diagonal_value(l), g.phi_values[l], epsilon = 1e-14);
        }
    }

    #[test]
    fn pi_pauli_matches_kphi_grid() {
        let p = params_nq2();
        let pi = pi_pauli(0, &p).unwrap();
        let g = build_grids(&p);
        for l in 0..4 {
            assert_relative_eq!(pi.diagonal_value(l), g.kphi_values[l], epsilon = 1e-14);
        }
        let p1 = ModelParams::new(2, 1, 1.0, 0.0, 1.0).unwrap();
        let pi1 = pi_pauli(0, &p1).unwrap();
        assert_relative_eq!(pi1.terms()[0].0, -PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn phi2_phi4_closed_forms() {
        let p = params_nq2();
        let (phi2, phi4) = phi2_phi4_pauli(0, &p).unwrap();
        assert_relative_eq!(phi2.identity_coeff(), 1.25, epsilon = 1e-14);
        assert_relative_eq!(
            phi2.identity_coeff(),
            p.phi_max.powi(2) / 9.0 * 5.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            phi4.identity_coeff(),
            p.phi_max.powi(4) / 81.0 * 41.0,
            epsilon = 1e-12
        );
        // phi^4 eigenvalues are fourth powers of the grid.
        let mut vals: Vec<f64> = (0..4).map(|l| phi4.diagonal_value(l)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(vals[0], 0.0625, epsilon = 1e-12);
        assert_relative_eq!(vals[3], 5.0625, epsilon = 1e-12);
        // phi^4 equals (phi^2)^2 for n_q=2.
        let phi2sq = phi2.mul_diagonal(&phi2);
        for l in 0..4 {
            assert_relative_eq!(
                phi2sq.diagonal_value(l),
                phi4.diagonal_value(l),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn site_index_out_of_range_rejected() {
        let p = params_nq2();
        assert!(phi_pauli(4, &p).is_err());
        assert!(pi_pauli(7, &p).is_err());
    }

    #[test]
    fn dispersion_closed_forms() {
        assert_relative_eq!(dispersion(0.0, 0.5), 0.5);
        assert_relative_eq!(group_velocity(0.0, 0.5), 0.0);
        assert_relative_eq!(dispersion(PI / 3.0, 0.5), 1.25f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(
            group_velocity(PI / 3.0, 0.5),
            (PI / 3.0).sin() / 1.25f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(group_velocity(PI, 0.5), 0.0, epsilon = 1e-12);
        assert_relative_eq!(dispersion_continuum(0.0, 0.5), 0.5);
        assert_relative_eq!(group_velocity_continuum(1.0, 0.0), 1.0);
    }

    #[test]
    fn correlation_matrix_properties() {
        let p = ModelParams::new(6, 2, 0.5, 0.0, 1.5).unwrap();
        let cm = correlation_matrix(&p);
        // V unitary.
        let v = &cm.fourier;
        let id = v * v.adjoint();
        let mut max = 0.0f64;
        for i in 0..6 {
            for j in 0..6 {
                let target = if i == j { 1.0 } else { 0.0 };
                max = max.max((id[(i, j)] - num_complex::Complex64::new(target, 0.0)).norm());
            }
        }
        assert!(max < 1e-12);
        // K real symmetric with constant diagonal.
        for i in 0..6 {
            for j in 0..6 {
                assert_relative_eq!(cm.k_matrix[(i, j)], cm.k_matrix[(j, i)], epsilon = 1e-12);
            }
            assert_relative_eq!(cm.k_matrix[(i, i)], cm.k_matrix[(0, 0)], epsilon = 1e-12);
        }
        // K equals V^dag E V.
        let e = nalgebra::DMatrix::from_fn(6, 6, |r, c| {
            if r == c {
                num_complex::Complex64::new(cm.energies[r], 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        });
        let k2 = v.adjoint() * e * v;
        for i in 0..6 {
            for j in 0..6 {
                assert!((k2[(i, j)].re - cm.k_matrix[(i, j)]).abs() < 1e-12);
                assert!(k2[(i, j)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn effective_mass_values() {
        let free = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        assert_relative_eq!(effective_mass(&free).unwrap(), 0.5);
        let int = ModelParams::new(4, 2, 0.5, 2.0, 1.5).unwrap();
        assert_relative_eq!(
            effective_mass(&int).unwrap(),
            (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-12
        );
        let nq3 = ModelParams::new(4, 3, 0.5, 2.0, 1.5).unwrap();
        assert!(effective_mass(&nq3).is_err());
    }

    #[test]
    fn params_key_value_round_trip() {
        let p = ModelParams::new(12, 2, 0.5, 2.0, 1.5).unwrap();
        let text = p.to_key_values();
        let q = ModelParams::from_key_values(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn momenta_cover_brillouin_zone() {
        let p = ModelParams::new(6, 2, 0.5, 0.0, 1.5).unwrap();
        let ks = p.momenta();
        assert_eq!(ks.len(), 6);
        assert!(ks.iter().all(|&k| k > -PI - 1e-12 && k <= PI + 1e-12));
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
        assert!(ks.iter().any(|&k| (k - PI / 3.0).abs() < 1e-12));
    }
}
