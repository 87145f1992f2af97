//! The non-cutoff Kac cross section `β(θ) = |cos(θ/2)| / |sin(θ/2)|^{1+2s}` on
//! `|θ| ≤ π/4`, the eigenvalues `λ_k` of the linearized collision operator and
//! the trilinear coefficients `α_{k,l}` with `Γ(e_k, e_l) = α_{k,l} e_{k+l}`.
//!
//! Every angular integral is evaluated after the substitution
//! `u = sin(θ/2)`, under which `β(θ) dθ = 2 u^{-1-2s} du`,
//! `cos θ = 1 - 2u²` and `sin θ = 2u √(1-u²)`. Folding by evenness, an
//! integral over `[-π/4, π/4]` becomes `4 ∫_0^{sin(π/8)} u^{-1-2s} F du`.

mod bobylev;
mod tables;

pub use bobylev::{bobylev_apply, bobylev_gamma_projection, even_part, hermite_fourier_transform, BobylevOptions};
pub use tables::KernelTables;

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{QuadEstimate, TanhSinh};

/// Half-width of the angular support of the cross section.
pub const THETA_MAX: f64 = FRAC_PI_4;

/// Relative tolerance requested from each angular quadrature.
pub const KERNEL_QUAD_TOL: f64 = 1e-12;

/// Absolute tolerance, reached only by integrals that vanish identically (`λ_2`).
pub const KERNEL_QUAD_ABS_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionParams {
    s: f64,
}

impl CrossSectionParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "singularity exponent s must lie in (0, 1), got {s}"
            )));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn theta_max(&self) -> f64 {
        THETA_MAX
    }
}

/// `sin(π/8)`, the upper limit in the `u` variable.
pub fn u_max() -> f64 {
    (PI / 8.0).sin()
}

pub fn beta(theta: f64, params: &CrossSectionParams) -> Result<f64> {
    if theta == 0.0 || !theta.is_finite() || theta.abs() > THETA_MAX * (1.0 + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "cross section is defined on 0 < |θ| ≤ π/4, got θ = {theta}"
        )));
    }
    let half = 0.5 * theta;
    Ok(half.cos().abs() / half.sin().abs().powf(1.0 + 2.0 * params.s))
}

/// `1 - (1 - 2u²)^m` without cancellation at small `u`.
#[inline]
pub(crate) fn one_minus_cos_pow(m: f64, u: f64) -> f64 {
    -(m * (-2.0 * u * u).ln_1p()).exp_m1()
}

#[inline]
pub(crate) fn sin_theta(u: f64) -> f64 {
    2.0 * u * (1.0 - u * u).sqrt()
}

/// `value · u^{-1-2s}` formed in log space: at tiny `u` the power overflows
/// while `value` underflows.
#[inline]
pub(crate) fn singular_weighted(value: f64, u: f64, s: f64) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    value.signum() * (value.abs().ln() - (1.0 + 2.0 * s) * u.ln()).exp()
}

/// `4 ∫_0^{sin(π/8)} u^{-1-2s} F(u) du`, split at the transition scale
/// `1/√m` of factors like `cos^m θ`.
pub(crate) fn folded_integral<F>(params: &CrossSectionParams, scale_index: f64, f: F) -> Result<QuadEstimate<f64>>
where
    F: Fn(f64) -> f64,
{
    let s = params.s;
    let integrand = |u: f64| singular_weighted(4.0 * f(u), u, s);
    let b = u_max();
    let mut cuts: Vec<f64> = vec![0.0];
    if scale_index >= 1.0 {
        let w = 1.0 / scale_index.sqrt();
        for c in [0.25, 1.0, 4.0] {
            let p = c * w;
            if p < 0.9 * b {
                cuts.push(p);
            }
        }
    }
    cuts.push(b);
    let quad = TanhSinh::with_tol(KERNEL_QUAD_TOL).with_abs_tol(KERNEL_QUAD_ABS_TOL);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    for w in cuts.windows(2) {
        let piece = quad.integrate(integrand, w[0], w[1])?;
        total += piece.value;
        err += piece.rel_error * piece.value.abs();
        evals += piece.evaluations;
    }
    Ok(QuadEstimate {
        value: total,
        rel_error: if total.abs() > KERNEL_QUAD_ABS_TOL {
            err / total.abs()
        } else {
            0.0
        },
        evaluations: evals,
    })
}

/// `λ_k` with its quadrature error estimate. `λ_0 = 0` by convention.
pub fn eigenvalue_estimate(k: usize, params: &CrossSectionParams) -> Result<QuadEstimate<f64>> {
    if k == 0 {
        return Ok(QuadEstimate {
            value: 0.0,
            rel_error: 0.0,
            evaluations: 0,
        });
    }
    let m = k as f64;
    let est = if k % 2 == 1 {
        folded_integral(params, m, |u| one_minus_cos_pow(m, u))?
    } else {
        folded_integral(params, m, |u| one_minus_cos_pow(m, u) - sin_theta(u).powi(k as i32))?
    };
    Ok(est)
}

pub fn eigenvalue(k: usize, params: &CrossSectionParams) -> Result<f64> {
    Ok(eigenvalue_estimate(k, params)?.value)
}

/// `(2^{1+s}/s) Γ(1-s) k^s`; diverges as `s → 1` through the pole of `Γ` at 0.
pub fn asymptotic_lambda(k: f64, params: &CrossSectionParams) -> f64 {
    let s = params.s;
    2f64.powf(1.0 + s) / s * gamma(1.0 - s) * k.powf(s)
}

/// `ln √C(2n+m, 2n)` through log-Gamma.
pub(crate) fn half_log_binomial(two_n: usize, m: usize) -> f64 {
    0.5 * (ln_gamma((two_n + m + 1) as f64) - ln_gamma((two_n + 1) as f64) - ln_gamma((m + 1) as f64))
}

/// Trilinear coefficient `α_{k,l}`; zero for odd `k` and for `k = l = 0`.
pub fn alpha_estimate(k: usize, l: usize, params: &CrossSectionParams) -> Result<QuadEstimate<f64>> {
    let zero = QuadEstimate {
        value: 0.0,
        rel_error: 0.0,
        evaluations: 0,
    };
    if k % 2 == 1 || (k == 0 && l == 0) {
        return Ok(zero);
    }
    let m = l as f64;
    if k == 0 {
        let est = folded_integral(params, m, |u| one_minus_cos_pow(m, u))?;
        return Ok(QuadEstimate {
            value: -est.value,
            ..est
        });
    }
    let log_binom = half_log_binomial(k, l);
    let kf = k as f64;
    // integrand ~ u^{2n-1-2s} near 0, smooth otherwise
    folded_integral(params, m.max(kf), |u| {
        let st = sin_theta(u);
        let c = 1.0 - 2.0 * u * u;
        (log_binom + kf * st.ln() + m * c.ln()).exp()
    })
}

pub fn alpha(k: usize, l: usize, params: &CrossSectionParams) -> Result<f64> {
    Ok(alpha_estimate(k, l, params)?.value)
}

/// `μ̃_{n,m} = (1 + m/n)^s (1 + n/(m+1))^{1/4}` for `n ≥ 1`.
pub fn mu_tilde(n: usize, m: usize, params: &CrossSectionParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("mu_tilde requires n >= 1".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok((1.0 + mf / nf).powf(params.s) * (1.0 + nf / (mf + 1.0)).powf(0.25))
}
