//! Wavepacket center tracking on per-site field-squared profiles.

use super::SolverError;

/// Gaussian least-squares center of the peak inside `window` (site index
/// range, non-wrapping). The fit uses the five sites around the argmax;
/// when the fit does not describe the data (overlapping packets, packet at
/// the window edge) the argmax site is returned instead.
pub fn track_center(
    profile: &[f64],
    window: std::ops::Range<usize>,
) -> Result<f64, SolverError> {
    if window.end > profile.len() || window.len() < 3 {
        return Err(SolverError::BadWindow(format!("{window:?}")));
    }
    let slice = &profile[window.clone()];
    let spread = {
        let mean = slice.iter().sum::<f64>() / slice.len() as f64;
        slice.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)
    };
    if spread < 1e-12 {
        return Err(SolverError::FlatProfile);
    }
    let argmax_local = slice
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let argmax = window.start + argmax_local;
    // Interior local maximum required.
    let interior = argmax > window.start && argmax + 1 < window.end;
    if !interior {
        return Ok(argmax as f64);
    }

    // Fit y = a exp(-(x-c)^2 / (2 w^2)) + b on up to +-2 sites around the
    // peak by Gauss-Newton, baseline fixed at the window minimum.
    let lo = argmax.saturating_sub(2).max(window.start);
    let hi = (argmax + 3).min(window.end);
    let xs: Vec<f64> = (lo..hi).map(|i| i as f64).collect();
    let baseline = profile[lo..hi].iter().cloned().fold(f64::INFINITY, f64::min);
    let ys: Vec<f64> = profile[lo..hi].iter().map(|v| v - baseline).collect();
    let peak = profile[argmax] - baseline;
    let mut a = peak.max(1e-12);
    let mut c = argmax as f64;
    let mut w2 = 1.0f64; // width^2
    let mut converged = false;
    for _ in 0..100 {
        // Residuals and Jacobian.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        let mut sse = 0.0;
        for (x, y) in xs.iter().zip(ys.iter()) {
            let d = x - c;
            let e = (-0.5 * d * d / w2).exp();
            let model = a * e;
            let r = y - model;
            sse += r * r;
            let grad = [e, a * e * d / w2, 0.5 * a * e * d * d / (w2 * w2)];
            for i in 0..3 {
                jtr[i] += grad[i] * r;
                for j in 0..3 {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        // Levenberg damping for stability.
        for (i, row) in jtj.iter_mut().enumerate() {
            row[i] += 1e-9 + 1e-6 * row[i];
        }
        let m = nalgebra::Matrix3::from_fn(|i, j| jtj[i][j]);
        let rhs = nalgebra::Vector3::new(jtr[0], jtr[1], jtr[2]);
        let Some(delta) = m.lu().solve(&rhs) else {
            break;
        };
        a += delta[0];
        c += delta[1];
        w2 = (w2 + delta[2]).max(1e-4);
        if delta.norm() < 1e-12 {
            // Residual check: the Gaussian must actually describe the bump.
            converged = sse.sqrt() < 0.2 * peak.max(1e-12) && a > 0.0;
            break;
        }
    }
    if converged && (c - argmax as f64).abs() <= 1.5 {
        Ok(c)
    } else {
        Ok(argmax as f64)
    }
}
