//! Exponential fits y(x) = offset + amplitude * rate^x.
//!
//! The rate is profiled: for each trial rate the (offset, amplitude) pair is
//! the exact linear least-squares solution, and the rate itself is found by
//! a coarse scan plus golden-section refinement. Used for correlation-length
//! and variational-parameter extrapolations in system size.

use super::SolverError;

#[derive(Debug, Clone, Copy)]
pub struct ExpFit {
    pub offset: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub residual_rms: f64,
}

impl ExpFit {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.offset + self.amplitude * self.rate.powf(x)
    }
}

fn linear_solve(samples: &[(f64, f64)], rate: f64) -> (f64, f64, f64) {
    // Least squares for y = c0 + c1 * rate^x.
    let n = samples.len() as f64;
    let mut sb = 0.0;
    let mut sy = 0.0;
    let mut sbb = 0.0;
    let mut sby = 0.0;
    for &(x, y) in samples {
        let b = rate.powf(x);
        sb += b;
        sy += y;
        sbb += b * b;
        sby += b * y;
    }
    let det = n * sbb - sb * sb;
    if det.abs() < 1e-300 {
        let mean = sy / n;
        return (mean, 0.0, f64::INFINITY);
    }
    let c1 = (n * sby - sb * sy) / det;
    let c0 = (sy - c1 * sb) / n;
    let mut sse = 0.0;
    for &(x, y) in samples {
        let r = y - (c0 + c1 * rate.powf(x));
        sse += r * r;
    }
    (c0, c1, sse)
}

/// Fit y(x) = offset + amplitude * rate^x with |rate| < 1.
pub fn exp_fit(samples: &[(f64, f64)]) -> Result<ExpFit, SolverError> {
    if samples.len() < 3 {
        return Err(SolverError::FitFailure(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let spread = {
        let mean = samples.iter().map(|s| s.1).sum::<f64>() / n;
        samples
            .iter()
            .map(|s| (s.1 - mean) * (s.1 - mean))
            .sum::<f64>()
            .sqrt()
    };
    if spread < 1e-14 {
        // Degenerate: constant series.
        return Ok(ExpFit {
            offset: samples[0].1,
            amplitude: 0.0,
            rate: 0.0,
            residual_rms: 0.0,
        });
    }
    // Coarse scan over the open interval (-1, 1), excluding |r| ~ 1.
    let mut best = (0.0f64, f64::INFINITY);
    let scan = 400;
    for i in 1..scan {
        let r = -0.995 + 1.99 * i as f64 / scan as f64;
        let (_, _, sse) = linear_solve(samples, r);
        if sse < best.1 {
            best = (r, sse);
        }
    }
    // Golden-section refinement around the best scan point.
    let cell = 1.99 / scan as f64;
    let (mut lo, mut hi) = (best.0 - cell, best.0 + cell);
    lo = lo.max(-0.9999);
    hi = hi.min(0.9999);
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    let mut x1 = lo + phi * (hi - lo);
    let mut x2 = hi - phi * (hi - lo);
    let mut f1 = linear_solve(samples, x1).2;
    let mut f2 = linear_solve(samples, x2).2;
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + phi * (hi - lo);
            f1 = linear_solve(samples, x1).2;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - phi * (hi - lo);
            f2 = linear_solve(samples, x2).2;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let mut rate = 0.5 * (lo + hi);
    // Even-spaced samples cannot distinguish +r from -r; prefer the
    // monotone (positive) branch when it fits equally well.
    if rate < 0.0 {
        let (_, _, sse_neg) = linear_solve(samples, rate);
        let (_, _, sse_pos) = linear_solve(samples, -rate);
        if sse_pos <= sse_neg * (1.0 + 1e-9) + 1e-300 {
            rate = -rate;
        }
    }
    let (offset, amplitude, sse) = linear_solve(samples, rate);
    if !offset.is_finite() || !amplitude.is_finite() {
        return Err(SolverError::FitFailure("non-finite fit".into()));
    }
    Ok(ExpFit {
        offset,
        amplitude,
        rate,
        residual_rms: (sse / n).sqrt(),
    })
}
