//! Hamiltonian term groups in Pauli and matrix form.
//!
//! H = H_Pi + H_phi + H_kin + H_int with periodic boundary conditions. The
//! phi, kinetic and interaction groups are diagonal in the field basis; the
//! Pi group is a per-site dense block obtained by conjugating its diagonal
//! momentum-basis form with the symmetric per-site Fourier transform. The
//! matrix form is kept matrix-free (diagonal vector plus one shared per-site
//! block), which is what the eigensolvers and propagators consume.

use super::pauli::PauliSum;
use super::{build_grids, phi2_phi4_pauli, phi_pauli, pi_pauli, LatticeError, ModelParams};
use num_complex::Complex64;
use rayon::prelude::*;

/// Minimal CSR matrix for oracle-grade checks on small systems.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl SparseMatrix {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        for row in 0..self.dim {
            let mut acc = 0.0;
            for idx in self.indptr[row]..self.indptr[row + 1] {
                acc += self.data[idx] * x[self.indices[idx] as usize];
            }
            y[row] = acc;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        assert!(self.dim <= 1 << 14, "dense form limited to 14 qubits");
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            for idx in self.indptr[row]..self.indptr[row + 1] {
                m[(row, self.indices[idx] as usize)] += self.data[idx];
            }
        }
        m
    }
}

/// The four Hamiltonian term groups plus the matrix-free total operator.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub params: ModelParams,
    /// (1/2) sum_j Pi_j^2 written in the per-site momentum eigenbasis.
    pub h_pi: PauliSum,
    /// (1/2) m^2 sum_j phi_j^2.
    pub h_phi: PauliSum,
    /// (1/2) sum_j (phi_{j+1} - phi_j)^2 with wraparound.
    pub h_kin: PauliSum,
    /// (lambda/4!) sum_j phi_j^4.
    pub h_int: PauliSum,
    /// Field-basis diagonal of h_phi + h_kin + h_int over the full space.
    diagonal: Vec<f64>,
    /// Per-site field-basis block of (1/2) Pi^2 (shared by all sites).
    pi_block: nalgebra::DMatrix<f64>,
}

/// Builds all four term groups. The matrix form is available up to 2^26
/// dimensions.
pub fn build_hamiltonian(params: &ModelParams) -> Result<HamiltonianTerms, LatticeError> {
    let n_qubits = params.n_qubits();
    if n_qubits > 26 {
        return Err(LatticeError::DimensionOverflow(n_qubits as u32));
    }
    let l = params.sites;
    let levels = params.levels();

    let mut h_phi = PauliSum::new(n_qubits);
    let mut h_kin = PauliSum::new(n_qubits);
    let mut h_int = PauliSum::new(n_qubits);
    let mut h_pi = PauliSum::new(n_qubits);

    for j in 0..l {
        let phi_j = phi_pauli(j, params)?;
        let (phi2, phi4) = phi2_phi4_pauli(j, params)?;

        let mut mass_term = phi2.clone();
        mass_term.scale(0.5 * params.mass * params.mass);
        h_phi.add_assign(&mass_term);

        // (1/2)(phi_{j+1}-phi_j)^2 summed over j gives sum phi^2 - sum phi phi_{j+1}.
        let mut kin_site = phi2.clone();
        let phi_next = phi_pauli(params.wrap(j as isize + 1), params)?;
        let mut cross = phi_j.mul_diagonal(&phi_next);
        cross.scale(-1.0);
        kin_site.add_assign(&cross);
        h_kin.add_assign(&kin_site);

        let mut int_term = phi4;
        int_term.scale(params.lambda / 24.0);
        h_int.add_assign(&int_term);

        let pi_j = pi_pauli(j, params)?;
        let mut pi2 = pi_j.mul_diagonal(&pi_j);
        pi2.scale(0.5);
        h_pi.add_assign(&pi2);
    }
    h_phi.prune(1e-15);
    h_kin.prune(1e-15);
    h_int.prune(1e-15);
    h_pi.prune(1e-15);

    // Field-basis diagonal of the three diagonal groups, assembled per site
    // then accumulated over the full index to avoid walking Pauli strings.
    let grids = build_grids(params);
    let mut site_diag = vec![0.0f64; levels];
    let mut bond = vec![vec![0.0f64; levels]; levels];
    for (a, &pa) in grids.phi_values.iter().enumerate() {
        site_diag[a] =
            0.5 * params.mass * params.mass * pa * pa + params.lambda / 24.0 * pa.powi(4);
        for (b, &pb) in grids.phi_values.iter().enumerate() {
            bond[a][b] = 0.5 * (pb - pa) * (pb - pa);
        }
    }
    let dim = params.hilbert_dim();
    let mask = levels - 1;
    let nq = params.n_q;
    let mut diagonal = vec![0.0f64; dim];
    diagonal
        .par_iter_mut()
        .enumerate()
        .for_each(|(index, out)| {
            let mut total = 0.0;
            for j in 0..l {
                let lj = (index >> (nq * j)) & mask;
                let ljn = (index >> (nq * ((j + 1) % l))) & mask;
                total += site_diag[lj] + bond[lj][ljn];
            }
            *out = total;
        });

    // Per-site block of (1/2) Pi^2 in the field basis:
    // (1/2^n_q) sum_m (kphi_m^2 / 2) cos(kphi_m (phi_a - phi_b)).
    let pi_block = nalgebra::DMatrix::from_fn(levels, levels, |a, b| {
        let d = grids.phi_values[a] - grids.phi_values[b];
        grids
            .kphi_values
            .iter()
            .map(|&kp| 0.5 * kp * kp * (kp * d).cos())
            .sum::<f64>()
            / levels as f64
    });

    Ok(HamiltonianTerms {
        params: *params,
        h_pi,
        h_phi,
        h_kin,
        h_int,
        diagonal,
        pi_block,
    })
}

impl HamiltonianTerms {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Field-basis diagonal of the diagonal groups (phi + kin + int).
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Shared per-site field-basis block of (1/2) Pi^2.
    pub fn pi_site_block(&self) -> &nalgebra::DMatrix<f64> {
        &self.pi_block
    }

    /// y = H x for real vectors.
    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        y.par_iter_mut()
            .zip(x.par_iter())
            .zip(self.diagonal.par_iter())
            .for_each(|((yo, &xv), &d)| *yo = d * xv);
        let levels = self.params.levels();
        let nq = self.params.n_q;
        for j in 0..self.params.sites {
            let stride = 1usize << (nq * j);
            let block_span = stride * levels;
            y.par_chunks_mut(block_span)
                .zip(x.par_chunks(block_span))
                .for_each(|(yc, xc)| {
                    for low in 0..stride {
                        for a in 0..levels {
                            let mut acc = 0.0;
                            for b in 0..levels {
                                acc += self.pi_block[(a, b)] * xc[low + b * stride];
                            }
                            yc[low + a * stride] += acc;
                        }
                    }
                });
        }
    }

    /// y = H x for complex vectors.
    pub fn apply_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        y.par_iter_mut()
            .zip(x.par_iter())
            .zip(self.diagonal.par_iter())
            .for_each(|((yo, &xv), &d)| *yo = xv * d);
        let levels = self.params.levels();
        let nq = self.params.n_q;
        for j in 0..self.params.sites {
            let stride = 1usize << (nq * j);
            let block_span = stride * levels;
            y.par_chunks_mut(block_span)
                .zip(x.par_chunks(block_span))
                .for_each(|(yc, xc)| {
                    for low in 0..stride {
                        for a in 0..levels {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for b in 0..levels {
                                acc += xc[low + b * stride] * self.pi_block[(a, b)];
                            }
                            yc[low + a * stride] += acc;
                        }
                    }
                });
        }
    }

    /// Expectation <x|H|x> for a normalized complex state.
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply_complex(x, &mut y);
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Total Hamiltonian as CSR. Guarded to 2^22 dimensions.
    pub fn to_sparse(&self) -> Result<SparseMatrix, LatticeError> {
        let dim = self.dim();
        if dim > 1 << 22 {
            return Err(LatticeError::DimensionOverflow(
                self.params.n_qubits() as u32
            ));
        }
        let levels = self.params.levels();
        let nq = self.params.n_q;
        let mask = levels - 1;
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for row in 0..dim {
            let mut entries: Vec<(usize, f64)> = vec![(row, self.diagonal[row])];
            for j in 0..self.params.sites {
                let shift = nq * j;
                let a = (row >> shift) & mask;
                for b in 0..levels {
                    let v = self.pi_block[(a, b)];
                    if v.abs() < 1e-15 && a != b {
                        continue;
                    }
                    let col = (row & !(mask << shift)) | (b << shift);
                    entries.push((col, v));
                }
            }
            entries.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                indices.push(c as u32);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix {
            dim,
            indptr,
            indices,
            data,
        })
    }

    /// Dense total Hamiltonian for small systems (oracle use).
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.to_sparse().expect("dense form needs small dim").to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::effective_mass;
    use approx::assert_relative_eq;

    #[test]
    fn small_hamiltonian_is_hermitian() {
        let p = ModelParams::new(2, 1, 1.0, 0.0, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let m = h.to_dense();
        assert_eq!(m.nrows(), 4);
        let diff = (&m - m.transpose()).norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn groups_sum_to_total_and_diagonal_groups_commute() {
        let p = ModelParams::new(2, 2, 0.5, 2.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let total = h.to_dense().map(|v| Complex64::new(v, 0.0));
        // Sum of the four groups: diagonal ones directly, Pi via per-site
        // block conjugation is already validated by the matrix path, so use
        // the Pauli route with the symmetric transform for the comparison.
        let w = crate::circuit::sqft_matrix(&p);
        let levels = p.levels();
        let mut pi_site = nalgebra::DMatrix::zeros(levels, levels);
        let grids = build_grids(&p);
        for (m, &kp) in grids.kphi_values.iter().enumerate() {
            pi_site[(m, m)] = Complex64::new(0.5 * kp * kp, 0.0);
        }
        let pi_site = w.adjoint() * pi_site * &w;
        let eye = nalgebra::DMatrix::<Complex64>::identity(levels, levels);
        let pi_total = pi_site.kronecker(&eye) + eye.kronecker(&pi_site);
        let diag_sum = h.h_phi.to_dense() + h.h_kin.to_dense() + h.h_int.to_dense();
        let rebuilt = &diag_sum + &pi_total;
        assert!((&total - &rebuilt).norm() < 1e-10);
        // h_phi and h_int commute (both diagonal).
        let a = h.h_phi.to_dense();
        let b = h.h_int.to_dense();
        assert!(((&a * &b) - (&b * &a)).norm() < 1e-12);
    }

    #[test]
    fn ground_energy_matches_dense_diagonalization() {
        let p = ModelParams::new(4, 2, 0.5, 0.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let dense = h.to_dense();
        let eig = nalgebra::SymmetricEigen::new(dense);
        let e0_dense = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let (e0, _) = crate::solver::ground_state(&h).unwrap();
        assert_relative_eq!(e0, e0_dense, epsilon = 1e-8);
    }

    #[test]
    fn effective_mass_identity_shifts_spectrum() {
        let p_int = ModelParams::new(2, 2, 0.5, 2.0, 1.5).unwrap();
        let mprime = effective_mass(&p_int).unwrap();
        let p_free = ModelParams::new(2, 2, mprime, 0.0, 1.5).unwrap();
        let hi = build_hamiltonian(&p_int).unwrap().to_dense();
        let hf = build_hamiltonian(&p_free).unwrap().to_dense();
        let diff = &hi - &hf;
        let shift = diff[(0, 0)];
        for i in 0..diff.nrows() {
            for j in 0..diff.ncols() {
                let target = if i == j { shift } else { 0.0 };
                assert!((diff[(i, j)] - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sparse_matches_matrix_free_apply() {
        let p = ModelParams::new(3, 2, 0.5, 2.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let sparse = h.to_sparse().unwrap();
        let dim = h.dim();
        let x: Vec<f64> = (0..dim).map(|i| ((i * 37 + 11) % 101) as f64 / 101.0).collect();
        let mut y1 = vec![0.0; dim];
        let mut y2 = vec![0.0; dim];
        h.apply_real(&x, &mut y1);
        sparse.matvec(&x, &mut y2);
        for (a, b) in y1.iter().zip(y2.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }
}
