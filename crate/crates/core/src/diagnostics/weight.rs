use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm, DyadicFilterBank, Exponent};
use crate::solver::SpectralState;

/// Exponents above this are flagged rather than exponentiated blindly.
pub const EXPONENT_CAP: f64 = 700.0;

/// Parameters of `G_κ(ct)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub t: f64,
    pub c: f64,
    pub kappa: f64,
    pub s: f64,
}

impl WeightSpec {
    pub fn new(t: f64, c: f64, kappa: f64, s: f64) -> Result<Self> {
        if !(t >= 0.0 && c >= 0.0 && (0.0..=1.0).contains(&kappa) && s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weight t = {t}, c = {c}, κ = {kappa}, s = {s}"
            )));
        }
        Ok(Self { t, c, kappa, s })
    }

    /// `ct((n+1/2)^{(s+1)/2} + ⟨ξ⟩^{(3s+1)/(2s+1)})^{2s/(3s+1)}`
    pub fn exponent(&self, n: usize, xi: f64) -> f64 {
        let s = self.s;
        let velocity = (n as f64 + 0.5).powf(0.5 * (s + 1.0));
        let space = (1.0 + xi * xi).sqrt().powf((3.0 * s + 1.0) / (2.0 * s + 1.0));
        self.c * self.t * (velocity + space).powf(2.0 * s / (3.0 * s + 1.0))
    }

    /// `Z(x) = e^x / (1 + κe^x)`
    pub fn saturation(&self, x: f64) -> f64 {
        saturation(x, self.kappa)
    }
}

pub fn saturation(x: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        x.exp()
    } else {
        1.0 / ((-x).exp() + kappa)
    }
}

#[derive(Debug, Clone)]
pub struct WeightedState {
    pub state: SpectralState,
    /// `(n, slot)` entries whose exponent exceeded [`EXPONENT_CAP`] with `κ = 0`.
    pub flagged: Vec<(usize, usize)>,
}

impl WeightedState {
    pub fn is_clean(&self) -> bool {
        self.flagged.is_empty() && self.state.is_finite()
    }
}

pub fn apply_weight(state: &SpectralState, spec: &WeightSpec) -> Result<WeightedState> {
    let freqs = state.grid()?.frequencies();
    let mut flagged = Vec::new();
    let mut out = state.clone();
    for ((n, j), c) in out.coeffs.indexed_iter_mut() {
        let x = spec.exponent(n, freqs[j]);
        if spec.kappa == 0.0 && x > EXPONENT_CAP {
            flagged.push((n, j));
            if *c != Complex64::new(0.0, 0.0) {
                // product in log space; infinite if it does not fit
                *c = Complex64::from_polar((c.norm().ln() + x).exp(), c.arg());
            }
        } else {
            *c *= spec.saturation(x);
        }
    }
    Ok(WeightedState { state: out, flagged })
}

/// Critical norm `‖·‖_{L̃²_v B^{1/2}_{2,1}}`.
pub fn critical_norm(bank: &DyadicFilterBank, coeffs: &Array2<Complex64>) -> Result<f64> {
    Ok(besov_norm(bank, coeffs.view(), 0.5, Exponent::Two, Exponent::One)?.value)
}

/// Weighted critical norm at each snapshot (`κ = 0`), `None` where flagged.
pub fn weighted_norm_monitor(
    bank: &DyadicFilterBank,
    snapshots: &[SpectralState],
    s: f64,
    c: f64,
) -> Result<Vec<Option<f64>>> {
    snapshots
        .iter()
        .map(|snap| {
            let spec = WeightSpec::new(snap.time, c, 0.0, s)?;
            let w = apply_weight(snap, &spec)?;
            if !w.is_clean() {
                return Ok(None);
            }
            critical_norm(bank, &w.state.coeffs).map(Some)
        })
        .collect()
}

/// Largest `c ∈ (0, c_max]` (bisection, `iters` halvings) for which the
/// weighted critical norm stays `≤ factor · ` its initial value with no
/// flagged entries. `None` if even `c_max·2^{-iters}` fails.
pub fn bisect_weight_rate(
    bank: &DyadicFilterBank,
    snapshots: &[SpectralState],
    s: f64,
    factor: f64,
    c_max: f64,
    iters: usize,
) -> Result<Option<f64>> {
    if snapshots.is_empty() {
        return Err(Error::EmptySeries);
    }
    let accept = |c: f64| -> Result<bool> {
        let series = weighted_norm_monitor(bank, snapshots, s, c)?;
        let Some(Some(first)) = series.first().copied() else {
            return Ok(false);
        };
        Ok(series.iter().all(|v| matches!(v, Some(v) if *v <= factor * first)))
    };
    crate::solver::bisect_largest(c_max * (0.5f64).powi(iters as i32), c_max, iters, accept)
}
