//! Exact solution of `∂_t g + v∂_x g + (−Δ_v)^s g = 0` in `(ξ, η)` Fourier
//! variables. The transformed equation `∂_t ĝ − ξ∂_η ĝ + |η|^{2s} ĝ = 0` is
//! solved along characteristics:
//!
//! ```text
//! ĝ(t, ξ, η) = ĝ_0(ξ, η + tξ) exp(−∫_0^t |η + σξ|^{2s} dσ).
//! ```

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::TanhSinh;

/// Below this `|tξ|/|η|` the closed form loses digits to cancellation.
const CANCELLATION_RATIO: f64 = 1e-3;

fn antiderivative(y: f64, s: f64) -> f64 {
    y.signum() * y.abs().powf(2.0 * s + 1.0) / (2.0 * s + 1.0)
}

/// `∫_0^t |η + σξ|^{2s} dσ`
pub fn damping_exponent(xi: f64, eta: f64, t: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) || t < 0.0 {
        return Err(Error::InvalidParameter(format!("s = {s}, t = {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if xi == 0.0 {
        return Ok(t * eta.abs().powf(2.0 * s));
    }
    if (t * xi).abs() >= CANCELLATION_RATIO * eta.abs() {
        return Ok((antiderivative(eta + t * xi, s) - antiderivative(eta, s)) / xi);
    }
    // no sign change on [0, t]; integrand smooth
    TanhSinh::with_tol(1e-14)
        .integrate(|sigma: f64| (eta + sigma * xi).abs().powf(2.0 * s), 0.0, t)
        .map(|e| e.value)
}

/// `ĝ(t)` on the tensor grid `xi × eta`, rows indexed by `ξ`.
pub fn kolmogorov_evolve(
    g0_hat: &dyn Fn(f64, f64) -> Complex64,
    xi: &[f64],
    eta: &[f64],
    t: f64,
    s: f64,
) -> Result<Array2<Complex64>> {
    let mut out = Array2::zeros((xi.len(), eta.len()));
    for (a, &x) in xi.iter().enumerate() {
        for (b, &y) in eta.iter().enumerate() {
            let damping = damping_exponent(x, y, t, s)?;
            out[[a, b]] = g0_hat(x, y + t * x) * (-damping).exp();
        }
    }
    Ok(out)
}
