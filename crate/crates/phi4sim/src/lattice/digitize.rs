//! Digitization diagnostics: band-limited reconstruction of single-site
//! wavefunctions and the field-cutoff search.

use super::{build_grids, LatticeError, ModelParams};
use num_complex::Complex64;
use std::f64::consts::PI;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Whittaker-Shannon reconstruction of a single-site wavefunction from its
/// 2^n_q grid samples, evaluated at field value `phi`.
pub fn shannon_interpolate(samples: &[Complex64], params: &ModelParams, phi: f64) -> Complex64 {
    assert_eq!(samples.len(), params.levels(), "one sample per grid point");
    let dphi = params.delta_phi();
    let mut total = Complex64::new(0.0, 0.0);
    for (n, s) in samples.iter().enumerate() {
        let phi_n = -params.phi_max + n as f64 * dphi;
        total += s * sinc((phi - phi_n) / dphi);
    }
    total
}

/// Single-site Hamiltonian used by the cutoff search: (1/2) Pi^2 plus the
/// on-site potential including the quadratic self-energy contributed by the
/// kinetic term, (1/2)(m^2 + 2) phi^2 + (lambda/4!) phi^4. Only the
/// cross-site coupling -phi_j phi_{j+1} is omitted.
fn single_site_potential(phi: f64, mass: f64, lambda: f64) -> f64 {
    0.5 * (mass * mass + 2.0) * phi * phi + lambda / 24.0 * phi.powi(4)
}

/// Continuum single-site eigenstates on a fine uniform grid by dense
/// diagonalization with a finite-difference Laplacian.
fn continuum_eigenstates(
    mass: f64,
    lambda: f64,
    n_states: usize,
    grid: &[f64],
) -> Vec<Vec<f64>> {
    let n = grid.len();
    let h = grid[1] - grid[0];
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0 / (h * h) + single_site_potential(grid[i], mass, lambda);
        if i + 1 < n {
            m[(i, i + 1)] = -0.5 / (h * h);
            m[(i + 1, i)] = -0.5 / (h * h);
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    order
        .iter()
        .take(n_states)
        .map(|&idx| {
            let col = eig.eigenvectors.column(idx);
            let norm: f64 = col.iter().map(|v| v * v * h).sum::<f64>().sqrt();
            col.iter().map(|v| v / norm).collect()
        })
        .collect()
}

/// Digitized single-site eigenstates for a trial cutoff.
fn digitized_eigenstates(params: &ModelParams, n_states: usize) -> Vec<Vec<f64>> {
    let levels = params.levels();
    let grids = build_grids(params);
    let mut m = nalgebra::DMatrix::<f64>::zeros(levels, levels);
    for a in 0..levels {
        m[(a, a)] = single_site_potential(grids.phi_values[a], params.mass, params.lambda);
        for b in 0..levels {
            let d = grids.phi_values[a] - grids.phi_values[b];
            let pi2: f64 = grids
                .kphi_values
                .iter()
                .map(|&kp| 0.5 * kp * kp * (kp * d).cos())
                .sum::<f64>()
                / levels as f64;
            m[(a, b)] += pi2;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..levels).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    order
        .iter()
        .take(n_states.min(levels))
        .map(|&idx| eig.eigenvectors.column(idx).iter().cloned().collect())
        .collect()
}

/// Summed overlap of the lowest digitized eigenstates (Shannon-interpolated
/// onto the fine grid) with the continuum eigenstates.
fn overlap_objective(
    params: &ModelParams,
    continuum: &[Vec<f64>],
    grid: &[f64],
    n_states: usize,
) -> f64 {
    let digitized = digitized_eigenstates(params, n_states);
    let h = grid[1] - grid[0];
    let dphi = params.delta_phi();
    let mut total = 0.0;
    for (cont, digi) in continuum.iter().zip(digitized.iter()) {
        // Interpolate the digitized state onto the fine grid and normalize.
        let interp: Vec<f64> = grid
            .iter()
            .map(|&phi| {
                digi.iter()
                    .enumerate()
                    .map(|(n, &s)| s * sinc((phi - (-params.phi_max + n as f64 * dphi)) / dphi))
                    .sum::<f64>()
            })
            .collect();
        let norm: f64 = interp.iter().map(|v| v * v * h).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let overlap: f64 = cont
            .iter()
            .zip(interp.iter())
            .map(|(c, i)| c * i * h)
            .sum::<f64>()
            / norm;
        total += overlap * overlap;
    }
    total
}

/// Cutoff maximizing the summed overlap between the lowest `n_states`
/// digitized eigenstates and the numerically solved continuum single-site
/// theory. Scans `search_range` then refines with a parabolic fit.
pub fn optimal_phi_max(
    params: &ModelParams,
    search_range: (f64, f64),
    n_states: usize,
) -> Result<f64, LatticeError> {
    let (lo, hi) = search_range;
    if !(hi > lo) || lo <= 0.0 {
        return Err(LatticeError::EmptySearchRange);
    }
    let grid_half = 8.0;
    let grid: Vec<f64> = (0..600)
        .map(|i| -grid_half + 2.0 * grid_half * i as f64 / 599.0)
        .collect();
    let continuum = continuum_eigenstates(params.mass, params.lambda, n_states, &grid);

    let steps = 80usize;
    let objective = |phi_max: f64| {
        let trial = ModelParams {
            phi_max,
            ..*params
        };
        overlap_objective(&trial, &continuum, &grid, n_states)
    };
    let mut best = (lo, f64::NEG_INFINITY);
    let mut values = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let phi_max = lo + (hi - lo) * i as f64 / steps as f64;
        let v = objective(phi_max);
        values.push((phi_max, v));
        if v > best.1 {
            best = (phi_max, v);
        }
    }
    // Parabolic refinement around the scan maximum.
    let idx = values
        .iter()
        .position(|&(p, _)| p == best.0)
        .expect("scan point");
    if idx > 0 && idx < values.len() - 1 {
        let (x0, y0) = values[idx - 1];
        let (x1, y1) = values[idx];
        let (x2, y2) = values[idx + 1];
        let denom = (y0 - 2.0 * y1 + y2).abs();
        if denom > 1e-15 {
            let refined = x1 - 0.5 * ((x1 - x0) * (y1 - y0) - (x1 - x2) * (y1 - y2))
                / ((y1 - y0) / (x1 - x0) - (y1 - y2) / (x1 - x2))
                / 1.0;
            // Guard against a degenerate parabola sending us outside the scan cell.
            if refined.is_finite() && refined > x0 && refined < x2 {
                return Ok(refined);
            }
        }
    }
    Ok(best.0)
}
