//! Fourier-side evaluation of the Kac collision operator,
//!
//! ```text
//! F(K(g, f))(ξ) = ∫ β(θ) [ ĝ̆(ξ sin θ) f̂(ξ cos θ) − ĝ(0) f̂(ξ) ] dθ,
//! ```
//!
//! used as an oracle for the Hermite-table form of `Γ`. Transforms are taken
//! as `f̂(ξ) = ∫ f(v) e^{-ivξ} dv` and passed as analytic callables, so they
//! can be sampled off the real axis. With `√μ e_n = (−1)^n μ^{(n)} / √n!` the
//! transform of `√μ Σ c_n e_n` is `e^{-ξ²/2} Σ c_n (−iξ)^n / √n!`, and Hermite
//! coefficients of a result are read off from Taylor coefficients of
//! `e^{ξ²/2} K̂(ξ)` by sampling on a circle in the complex plane.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::{singular_weighted, u_max, CrossSectionParams};
use crate::error::{Error, Result};
use crate::quadrature::TanhSinh;

#[derive(Debug, Clone, Copy)]
pub struct BobylevOptions {
    /// Below this `u = sin(θ/2)` the integrand is replaced by its even Taylor
    /// model to avoid cancellation in the bracket.
    pub u_split: f64,
    pub quad_tol: f64,
    /// Absolute quadrature tolerance, for brackets that vanish up to rounding.
    pub abs_tol: f64,
    /// Radius of the sampling circle for coefficient extraction.
    pub radius: f64,
    /// Number of samples on the circle (must exceed the polynomial degree).
    pub samples: usize,
}

impl Default for BobylevOptions {
    fn default() -> Self {
        Self {
            u_split: 0.02,
            quad_tol: 1e-11,
            abs_tol: 1e-14,
            radius: 1.5,
            samples: 64,
        }
    }
}

/// `ζ ↦ (ĝ(ζ) + ĝ(−ζ))/2`
pub fn even_part<'a>(g_hat: &'a dyn Fn(Complex64) -> Complex64) -> impl Fn(Complex64) -> Complex64 + 'a {
    move |z| (g_hat(z) + g_hat(-z)) * 0.5
}

/// Fourier transform of `√μ Σ_n c_n e_n`.
pub fn hermite_fourier_transform(coeffs: &[Complex64]) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |xi: Complex64| {
        let minus_i_xi = Complex64::new(0.0, -1.0) * xi;
        let mut power = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in coeffs.iter().enumerate() {
            if n > 0 {
                power *= minus_i_xi;
            }
            acc += c * power * (-0.5 * ln_gamma(n as f64 + 1.0)).exp();
        }
        acc * (-0.5 * xi * xi).exp()
    }
}

/// `F(K(g, f))` at each point of `xi`.
pub fn bobylev_apply(
    f_hat: &dyn Fn(Complex64) -> Complex64,
    g_hat: &dyn Fn(Complex64) -> Complex64,
    xi: &[Complex64],
    params: &CrossSectionParams,
    opts: &BobylevOptions,
) -> Result<Vec<Complex64>> {
    let g_even = even_part(g_hat);
    let g0 = g_hat(Complex64::new(0.0, 0.0));
    xi.iter()
        .map(|&x| {
            let bracket = |theta: f64| g_even(x * theta.sin()) * f_hat(x * theta.cos()) - g0 * f_hat(x);
            let ts = 2.0 * opts.u_split.asin();
            let scale = (g0 * f_hat(x)).norm() + (g_even(x * ts.sin()) * f_hat(x * ts.cos())).norm();
            angular_integral(&bracket, scale, params, opts)
        })
        .collect()
}

/// `4 ∫_0^{sin(π/8)} u^{-1-2s} D(θ(u)) du` for an even bracket `D` with `D(0) = 0`,
/// whose terms have magnitude about `scale`.
fn angular_integral(
    bracket: &dyn Fn(f64) -> Complex64,
    scale: f64,
    params: &CrossSectionParams,
    opts: &BobylevOptions,
) -> Result<Complex64> {
    let s = params.s();
    let theta_of = |u: f64| 2.0 * u.asin();
    let quad = TanhSinh::with_tol(opts.quad_tol).with_abs_tol(opts.abs_tol);
    let outer = quad.integrate(
        |u: f64| bracket(theta_of(u)) * (4.0 * u.powf(-1.0 - 2.0 * s)),
        opts.u_split,
        u_max(),
    )?;

    // Even Taylor model D(θ) ≈ θ² P(θ²), P cubic, fitted at θ_j = j·h.
    let h = theta_of(opts.u_split) / 2.0;
    let nodes: Vec<f64> = (1..=4).map(|j| (j as f64 * h).powi(2)).collect();
    let values: Vec<Complex64> = nodes.iter().map(|&t2| bracket(t2.sqrt()) / t2).collect();
    let model = |t2: f64| neville(&nodes, &values, t2);
    let probe = (2.5 * h).powi(2);
    let direct = bracket(probe.sqrt()) / probe;
    let mismatch = (model(probe) - direct).norm();
    // rounding in the bracket, amplified by the division by θ²
    let floor = 64.0 * f64::EPSILON * scale / (h * h);
    // ∫_0^{u_split} 4θ² u^{-1-2s} du with θ ≈ 2u: how far a model error reaches into the result
    let reach = 16.0 * opts.u_split.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    let negligible = mismatch * reach <= 1e-9 * outer.value.norm() + opts.abs_tol;
    if mismatch > 1e-7 * direct.norm().max(1e-300) && mismatch > floor && !negligible {
        return Err(Error::Resolution(format!(
            "small-angle model mismatch {mismatch:.3e} (|D/θ²| = {:.3e})",
            direct.norm()
        )));
    }
    let inner = quad.integrate(
        |u: f64| {
            let t2 = theta_of(u).powi(2);
            model(t2) * singular_weighted(4.0 * t2, u, s)
        },
        0.0,
        opts.u_split,
    )?;
    Ok(outer.value + inner.value)
}

fn neville(x: &[f64], y: &[Complex64], at: f64) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for level in 1..n {
        for i in 0..n - level {
            p[i] = (p[i] * (at - x[i + level]) + p[i + 1] * (x[i] - at)) / (x[i] - x[i + level]);
        }
    }
    p[0]
}

/// Hermite coefficients `0..n_out` of `Γ(f, g) = μ^{-1/2} K(√μ f, √μ g)`
/// computed through the Fourier representation.
pub fn bobylev_gamma_projection(
    f_coeffs: &[Complex64],
    g_coeffs: &[Complex64],
    n_out: usize,
    params: &CrossSectionParams,
    opts: &BobylevOptions,
) -> Result<Vec<Complex64>> {
    let degree = f_coeffs.len() + g_coeffs.len();
    if opts.samples <= degree.max(n_out) {
        return Err(Error::Resolution(format!(
            "{} contour samples cannot resolve degree {}",
            opts.samples,
            degree.max(n_out)
        )));
    }
    // K(√μ f, √μ g): the star argument is f
    let star_hat = hermite_fourier_transform(f_coeffs);
    let other_hat = hermite_fourier_transform(g_coeffs);
    let m = opts.samples;
    let r = opts.radius;
    let circle: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect();
    let k_hat = bobylev_apply(&other_hat, &star_hat, &circle, params, opts)?;
    let poly: Vec<Complex64> = k_hat
        .iter()
        .zip(&circle)
        .map(|(k, xi)| k * (0.5 * xi * xi).exp())
        .collect();
    Ok((0..n_out)
        .map(|n| {
            let taylor: Complex64 = poly
                .iter()
                .enumerate()
                .map(|(j, p)| p * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * n) as f64 / m as f64))
                .sum::<Complex64>()
                / (m as f64 * r.powi(n as i32));
            // p_n = d_n (−i)^n / √n!
            taylor * Complex64::new(0.0, 1.0).powu(n as u32) * (0.5 * ln_gamma(n as f64 + 1.0)).exp()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::alpha;

    fn unit(n: usize) -> Vec<Complex64> {
        let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
        u[n] = Complex64::new(1.0, 0.0);
        u
    }

    #[test]
    fn maxwellian_is_collision_invariant() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let mu_hat = |xi: Complex64| (-0.5 * xi * xi).exp();
        let xi: Vec<Complex64> = [-3.0, -0.7, 0.0, 0.4, 2.5]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let out = bobylev_apply(&mu_hat, &mu_hat, &xi, &p, &BobylevOptions::default()).unwrap();
        for v in out {
            assert!(v.norm() < 1e-13, "{v}");
        }
    }

    #[test]
    fn vanishes_at_zero_frequency() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let g_hat = |xi: Complex64| xi * xi * (-xi * xi).exp();
        let f_hat = |xi: Complex64| (Complex64::new(0.3, 1.0) * xi).exp();
        let out = bobylev_apply(
            &f_hat,
            &g_hat,
            &[Complex64::new(0.0, 0.0)],
            &p,
            &BobylevOptions::default(),
        )
        .unwrap();
        assert!(out[0].norm() < 1e-15);
    }

    #[test]
    fn single_pair_projects_onto_sum_mode() {
        let p = CrossSectionParams::new(0.5).unwrap();
        for (k, l) in [(0, 2), (2, 2), (4, 1), (0, 3)] {
            let proj = bobylev_gamma_projection(&unit(k), &unit(l), k + l + 3, &p, &BobylevOptions::default()).unwrap();
            let a = alpha(k, l, &p).unwrap();
            assert!(
                (proj[k + l].re - a).abs() <= 1e-6 * a.abs(),
                "({k},{l}): {} vs {a}",
                proj[k + l]
            );
            for (n, c) in proj.iter().enumerate() {
                if n != k + l {
                    assert!(c.norm() < 1e-8, "({k},{l}) leak at {n}: {c}");
                }
            }
        }
    }

    #[test]
    fn odd_star_argument_gives_zero() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let proj = bobylev_gamma_projection(&unit(3), &unit(2), 8, &p, &BobylevOptions::default()).unwrap();
        assert!(proj.iter().all(|c| c.norm() < 1e-10));
    }
}
