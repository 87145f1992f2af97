use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SpectralState;

pub const NU_MIN: f64 = 0.05;
pub const NU_MAX: f64 = 1.50;
pub const NU_STEP: f64 = 0.01;
/// Slices below this fraction of the largest slice are treated as noise.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Hermite,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub axis: Axis,
    /// Fitted `ν` in `log|slice| ≈ b − a·index^ν`.
    pub exponent: f64,
    /// Fitted rate `a`.
    pub amplitude: f64,
    pub intercept: f64,
    /// Sum of squared residuals of the linear fit at `exponent`.
    pub residual: f64,
    /// First and last index used.
    pub range: (usize, usize),
    /// The optimum sits on the upper edge of the searched grid: the data
    /// decay faster than any stretched exponential in range.
    pub above_range: bool,
    pub below_range: bool,
}

impl FitReport {
    pub fn to_csv_row(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{:?},{:.6},{:.9e},{:.9e},{:.6e},{},{},{},{}",
            self.axis,
            self.exponent,
            self.amplitude,
            self.intercept,
            self.residual,
            self.range.0,
            self.range.1,
            self.above_range,
            self.below_range
        );
        out
    }

    pub const CSV_HEADER: &'static str =
        "axis,exponent,amplitude,intercept,residual,first,last,above_range,below_range";
}

/// `ℓ²` slices of the state along `axis`: per Hermite mode `n`, or per `|j|`.
pub fn slices(state: &SpectralState, axis: Axis) -> Vec<f64> {
    let c = &state.coeffs;
    match axis {
        Axis::Hermite => c
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect(),
        Axis::Fourier => {
            let n_x = state.n_x();
            let kmax = if n_x == 1 { 0 } else { n_x / 2 - 1 };
            (0..=kmax)
                .map(|k| {
                    let mut acc: f64 = c.column(k).iter().map(|z| z.norm_sqr()).sum();
                    if k > 0 {
                        acc += c.column(n_x - k).iter().map(|z| z.norm_sqr()).sum::<f64>();
                    }
                    acc.sqrt()
                })
                .collect()
        }
    }
}

pub fn fit_decay(state: &SpectralState, axis: Axis) -> Result<FitReport> {
    fit_decay_values(&slices(state, axis), axis)
}

/// Grid search over `ν`, with `(b, a)` by linear least squares for each `ν`.
/// Value `k` of `values` sits at index `k`.
pub fn fit_decay_values(values: &[f64], axis: Axis) -> Result<FitReport> {
    let peak = values.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::DegenerateFit("all-zero or non-finite spectrum".into()));
    }
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > NOISE_FLOOR * peak)
        .map(|(k, v)| (k as f64, v.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} slices above the noise floor",
            points.len()
        )));
    }
    let steps = ((NU_MAX - NU_MIN) / NU_STEP).round() as usize;
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for i in 0..=steps {
        let nu = NU_MIN + i as f64 * NU_STEP;
        let Some((b, a, res)) = linear_fit(&points, nu) else {
            continue;
        };
        if best.is_none_or(|bst| res < bst.3) {
            best = Some((nu, a, b, res));
        }
    }
    let (nu, a, b, residual) = best.ok_or_else(|| Error::DegenerateFit("no admissible exponent".into()))?;
    Ok(FitReport {
        axis,
        exponent: nu,
        amplitude: a,
        intercept: b,
        residual,
        range: (points[0].0 as usize, points[points.len() - 1].0 as usize),
        above_range: nu >= NU_MAX - 0.5 * NU_STEP,
        below_range: nu <= NU_MIN + 0.5 * NU_STEP,
    })
}

/// Least squares for `y ≈ b − a x^ν`; `(b, a, residual)`.
fn linear_fit(points: &[(f64, f64)], nu: f64) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(k, _)| k.powf(nu)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let b = my - slope * mx;
    let res = xs.iter().zip(points).map(|(x, p)| (p.1 - b - slope * x).powi(2)).sum();
    Some((b, -slope, res))
}
