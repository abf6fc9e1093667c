//! Lanczos eigensolvers with full reorthogonalization.
//!
//! Real symmetric and complex Hermitian variants share the tridiagonal
//! Ritz machinery. Extremal eigenpairs converge first; residual norms
//! ||Hv - Ev|| are checked explicitly against the requested tolerance.

use super::SolverError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

pub const ITERATION_CAP: usize = 5000;

/// Matrix-free real symmetric operator.
pub trait RealSymOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl RealSymOp for crate::lattice::HamiltonianTerms {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_real(x, y);
    }
}

impl RealSymOp for crate::lattice::SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

/// Matrix-free Hermitian operator on complex vectors.
pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl HermitianOp for crate::lattice::HamiltonianTerms {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.apply_complex(x, y);
    }
}

fn ritz_pairs(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let m = alpha.len();
    let mut t = nalgebra::DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = alpha[j];
        if j + 1 < m {
            t[(j, j + 1)] = beta[j];
            t[(j + 1, j)] = beta[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = nalgebra::DMatrix::<f64>::zeros(m, m);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    (values, vectors)
}

/// Lowest `k` eigenpairs of a real symmetric operator.
pub fn lowest_eigenpairs_real(
    op: &dyn RealSymOp,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SolverError> {
    let dim = op.dim();
    if dim > 1 << 22 {
        return Err(SolverError::DimensionTooLarge(dim));
    }
    let max_iter = ITERATION_CAP.min(dim);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize_real(&mut v);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0f64; dim];

    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        if j > 0 {
            let b = beta[j - 1];
            let prev = &basis[j - 1];
            w.par_iter_mut().zip(prev.par_iter()).for_each(|(wv, pv)| *wv -= b * pv);
        }
        let a = dot_real(&w, &basis[j]);
        alpha.push(a);
        {
            let vj = &basis[j];
            w.par_iter_mut().zip(vj.par_iter()).for_each(|(wv, vv)| *wv -= a * vv);
        }
        for prev in &basis {
            let proj = dot_real(&w, prev);
            if proj.abs() > 0.0 {
                w.par_iter_mut()
                    .zip(prev.par_iter())
                    .for_each(|(wv, pv)| *wv -= proj * pv);
            }
        }
        let b_next = dot_real(&w, &w).sqrt();
        let m = alpha.len();
        let done = if m >= k + 2 || b_next < 1e-13 {
            let (_, vectors) = ritz_pairs(&alpha, &beta);
            (0..k.min(m)).all(|i| (b_next * vectors[(m - 1, i)]).abs() < tol) && m >= k
        } else {
            false
        };
        if done || b_next < 1e-13 || j + 1 == max_iter {
            if !done && b_next >= 1e-13 && j + 1 == max_iter {
                return Err(SolverError::NonConvergence {
                    iterations: max_iter,
                    residual: b_next,
                });
            }
            break;
        }
        beta.push(b_next);
        let next: Vec<f64> = w.iter().map(|x| x / b_next).collect();
        basis.push(next);
    }

    let m = alpha.len();
    let (values, vectors) = ritz_pairs(&alpha, &beta);
    if m < k {
        return Err(SolverError::NonConvergence {
            iterations: m,
            residual: f64::NAN,
        });
    }
    let mut eigvecs = Vec::with_capacity(k);
    for i in 0..k {
        let mut vec = vec![0.0f64; dim];
        for (j, base) in basis.iter().enumerate().take(m) {
            let c = vectors[(j, i)];
            vec.par_iter_mut().zip(base.par_iter()).for_each(|(o, b)| *o += c * b);
        }
        normalize_real(&mut vec);
        // Canonical sign: largest-magnitude entry positive.
        let mut imax = 0;
        for (idx, x) in vec.iter().enumerate() {
            if x.abs() > vec[imax].abs() {
                imax = idx;
            }
        }
        if vec[imax] < 0.0 {
            vec.par_iter_mut().for_each(|x| *x = -*x);
        }
        eigvecs.push(vec);
    }
    Ok((values[..k].to_vec(), eigvecs))
}

/// Lowest `k` eigenpairs of a complex Hermitian operator.
pub fn lowest_eigenpairs_complex(
    op: &dyn HermitianOp,
    k: usize,
    tol: f64,
    seed: u64,
    start: Option<Vec<Complex64>>,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>), SolverError> {
    let dim = op.dim();
    if dim > 1 << 22 {
        return Err(SolverError::DimensionTooLarge(dim));
    }
    let max_iter = ITERATION_CAP.min(2 * dim);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = match start {
        Some(s) => s,
        None => (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect(),
    };
    normalize_complex(&mut v);
    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        if j > 0 {
            let b = beta[j - 1];
            let prev = &basis[j - 1];
            w.par_iter_mut().zip(prev.par_iter()).for_each(|(wv, pv)| *wv -= pv * b);
        }
        let a = dot_complex(&basis[j], &w).re;
        alpha.push(a);
        {
            let vj = &basis[j];
            w.par_iter_mut().zip(vj.par_iter()).for_each(|(wv, vv)| *wv -= vv * a);
        }
        for prev in &basis {
            let proj = dot_complex(prev, &w);
            if proj.norm() > 0.0 {
                w.par_iter_mut()
                    .zip(prev.par_iter())
                    .for_each(|(wv, pv)| *wv -= pv * proj);
            }
        }
        let b_next = w.par_iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let m = alpha.len();
        let done = if m >= k + 2 || b_next < 1e-13 {
            let (_, vectors) = ritz_pairs(&alpha, &beta);
            (0..k.min(m)).all(|i| (b_next * vectors[(m - 1, i)]).abs() < tol) && m >= k
        } else {
            false
        };
        if done || b_next < 1e-13 || j + 1 == max_iter {
            if !done && b_next >= 1e-13 && j + 1 == max_iter {
                return Err(SolverError::NonConvergence {
                    iterations: max_iter,
                    residual: b_next,
                });
            }
            break;
        }
        beta.push(b_next);
        let next: Vec<Complex64> = w.iter().map(|x| x / b_next).collect();
        basis.push(next);
    }

    let m = alpha.len();
    let (values, vectors) = ritz_pairs(&alpha, &beta);
    if m < k {
        return Err(SolverError::NonConvergence {
            iterations: m,
            residual: f64::NAN,
        });
    }
    let mut eigvecs = Vec::with_capacity(k);
    for i in 0..k {
        let mut vec = vec![Complex64::new(0.0, 0.0); dim];
        for (j, base) in basis.iter().enumerate().take(m) {
            let c = vectors[(j, i)];
            vec.par_iter_mut().zip(base.par_iter()).for_each(|(o, b)| *o += b * c);
        }
        normalize_complex(&mut vec);
        eigvecs.push(vec);
    }
    Ok((values[..k].to_vec(), eigvecs))
}

/// Residual norm ||Hv - Ev|| for a computed eigenpair.
pub fn residual_norm_real(op: &dyn RealSymOp, value: f64, vector: &[f64]) -> f64 {
    let mut y = vec![0.0f64; vector.len()];
    op.apply(vector, &mut y);
    y.iter()
        .zip(vector.iter())
        .map(|(a, b)| (a - value * b) * (a - value * b))
        .sum::<f64>()
        .sqrt()
}

fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    a.par_iter().zip(b.par_iter()).map(|(x, y)| x * y).sum()
}

fn dot_complex(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| x.conj() * y)
        .reduce(|| Complex64::new(0.0, 0.0), |x, y| x + y)
}

fn normalize_real(v: &mut [f64]) {
    let n = dot_real(v, v).sqrt();
    v.par_iter_mut().for_each(|x| *x /= n);
}

fn normalize_complex(v: &mut [Complex64]) {
    let n = v.par_iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.par_iter_mut().for_each(|x| *x /= n);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, ModelParams};
    use approx::assert_relative_eq;

    #[test]
    fn matches_dense_spectrum() {
        let p = ModelParams::new(3, 2, 0.5, 2.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let dense = h.to_dense();
        let mut dense_vals: Vec<f64> =
            nalgebra::SymmetricEigen::new(dense).eigenvalues.iter().cloned().collect();
        dense_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (vals, vecs) = lowest_eigenpairs_real(&h, 3, 1e-9, 7).unwrap();
        for i in 0..3 {
            assert_relative_eq!(vals[i], dense_vals[i], epsilon = 1e-8);
            assert!(residual_norm_real(&h, vals[i], &vecs[i]) < 1e-8);
        }
    }

    #[test]
    fn complex_variant_agrees_with_real() {
        let p = ModelParams::new(2, 2, 0.5, 0.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let (vr, _) = lowest_eigenpairs_real(&h, 2, 1e-9, 3).unwrap();
        let (vc, _) = lowest_eigenpairs_complex(&h, 2, 1e-9, 3, None).unwrap();
        for (a, b) in vr.iter().zip(vc.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn decoupled_site_limit() {
        // Large mass suppresses the cross-site coupling; the ground energy
        // approaches L times the single-site energy. The single-site oracle
        // is the 4x4 momentum block plus the on-site potential including the
        // kinetic self-energy phi^2 (only -phi_j phi_{j+1} is dropped).
        let p = ModelParams::new(4, 2, 20.0, 0.0, 1.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let (e, _) = lowest_eigenpairs_real(&h, 1, 1e-9, 1).unwrap();
        let grids = crate::lattice::build_grids(&p);
        let mut site = h.pi_site_block().clone();
        for (l, &phi) in grids.phi_values.iter().enumerate() {
            site[(l, l)] += 0.5 * p.mass * p.mass * phi * phi + phi * phi;
        }
        let e_site = nalgebra::SymmetricEigen::new(site)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(e[0], 4.0 * e_site, max_relative = 1e-3);
    }
}
