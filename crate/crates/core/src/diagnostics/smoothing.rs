use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::solver::damping_exponent;

/// `∫_0^t |η+σξ|^{2s} dσ / (t^{2s+1}|ξ|^{2s} + t|η|^{2s})`
pub fn kolmogorov_ratio(xi: f64, eta: f64, t: f64, s: f64) -> Result<f64> {
    let den = t.powf(2.0 * s + 1.0) * xi.abs().powf(2.0 * s) + t * eta.abs().powf(2.0 * s);
    Ok(damping_exponent(xi, eta, t, s)? / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingGrid {
    pub extent: f64,
    pub frequency_points: usize,
    pub t_max: f64,
    pub time_points: usize,
}

impl Default for SmoothingGrid {
    /// `(ξ, η) ∈ [−32, 32]²` with step 1/2, `t ∈ {0.05, 0.10, …, 2}`.
    fn default() -> Self {
        Self {
            extent: 32.0,
            frequency_points: 129,
            t_max: 2.0,
            time_points: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingMinimum {
    pub min_ratio: f64,
    pub argmin: (f64, f64, f64),
}

/// Brute-force minimum of [`kolmogorov_ratio`] over the grid, `(ξ, η) = 0` excluded.
pub fn kolmogorov_min_ratio(s: f64, grid: &SmoothingGrid) -> Result<SmoothingMinimum> {
    let m = grid.frequency_points;
    let axis: Vec<f64> = (0..m)
        .map(|i| -grid.extent + 2.0 * grid.extent * i as f64 / (m - 1) as f64)
        .collect();
    let times: Vec<f64> = (1..=grid.time_points)
        .map(|k| grid.t_max * k as f64 / grid.time_points as f64)
        .collect();
    let best = axis
        .par_iter()
        .map(|&xi| {
            let mut best = SmoothingMinimum {
                min_ratio: f64::INFINITY,
                argmin: (0.0, 0.0, 0.0),
            };
            for &eta in &axis {
                if xi == 0.0 && eta == 0.0 {
                    continue;
                }
                for &t in &times {
                    let r = kolmogorov_ratio(xi, eta, t, s)?;
                    if r < best.min_ratio {
                        best = SmoothingMinimum {
                            min_ratio: r,
                            argmin: (xi, eta, t),
                        };
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(best
        .into_iter()
        .reduce(|a, b| if b.min_ratio < a.min_ratio { b } else { a })
        .expect("non-empty grid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_zero_slice_is_exact() {
        for s in [0.25, 0.5, 0.75] {
            for (xi, t) in [(1.0, 0.5), (-7.5, 2.0), (32.0, 0.05)] {
                let r = kolmogorov_ratio(xi, 0.0, t, s).unwrap();
                assert!((r * (2.0 * s + 1.0) - 1.0).abs() < 1e-10, "{s} {xi} {t}: {r}");
            }
        }
    }

    #[test]
    fn minimum_is_positive() {
        let grid = SmoothingGrid {
            frequency_points: 33,
            time_points: 8,
            ..SmoothingGrid::default()
        };
        for s in [0.25, 0.5, 0.75] {
            let m = kolmogorov_min_ratio(s, &grid).unwrap();
            assert!(m.min_ratio > 0.0 && m.min_ratio <= 1.0 / (2.0 * s + 1.0) + 1e-12);
        }
    }
}
