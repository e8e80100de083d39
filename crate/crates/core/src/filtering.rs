//! Gaussian smoothing of sampled probability series.

use crate::error::{Error, Result};
use crate::sampling::{DenseSeries, ProbabilitySeries};

pub const DEFAULT_HALF_WIDTH: usize = 3;
pub const DEFAULT_SHAPE: f64 = 4.0 / 9.0;

/// Normalized weights `φ(k) ∝ exp(−shape·k²)`, `k = −hw..=hw`.
pub fn gaussian_kernel(half_width: usize, shape: f64) -> Result<Vec<f64>> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::argument(format!("kernel shape must be positive, got {shape}")));
    }
    let hw = half_width as i64;
    let raw: Vec<f64> = (-hw..=hw).map(|k| (-shape * (k * k) as f64).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Convolves every variant's series with `kernel`. Near the ends the kernel is
/// truncated to the available offsets and renormalized, so each output row is
/// still a distribution and the series keeps its length.
pub fn filter_trajectory<S: ProbabilitySeries + ?Sized>(series: &S, kernel: &[f64]) -> Result<DenseSeries> {
    if kernel.len() % 2 == 0 {
        return Err(Error::argument("kernel length must be odd"));
    }
    let grid = *series.grid();
    let len = grid.count();
    if len < 1 {
        return Err(Error::argument("series must contain at least one instant"));
    }
    let hw = (kernel.len() / 2) as isize;
    let m = series.variants();
    let rows = (0..len as isize)
        .map(|t| {
            let mut acc = vec![0.0; m];
            let mut weight = 0.0;
            for (j, &w) in kernel.iter().enumerate() {
                let s = t + j as isize - hw;
                if s < 0 || s >= len as isize {
                    continue;
                }
                weight += w;
                for (a, &x) in acc.iter_mut().zip(series.probs_at(s as usize)) {
                    *a += w * x;
                }
            }
            acc.iter_mut().for_each(|a| *a /= weight);
            acc
        })
        .collect();
    DenseSeries::new(grid, rows)
}
