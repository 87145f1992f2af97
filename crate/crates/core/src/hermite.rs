//! Scaled Hermite functions `e_n(v) = 2^{-1/4} φ_n(2^{-1/2} v)`, the
//! eigenbasis of the harmonic oscillator `-∂_v² + v²/4`.
//!
//! Ladder operators act as `A_+ e_n = √(n+1) e_{n+1}`, `A_- e_n = √n e_{n-1}`
//! with `v = A_+ + A_-` and `∂_v = (A_- - A_+)/2`. Coefficient vectors are
//! indexed by Hermite mode and are always complex.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Extra Gauss nodes beyond the mode count used by [`HermiteGrid::build`].
pub const NODE_PADDING: usize = 8;

const ORTHONORMALITY_LIMIT: f64 = 1e-8;

/// Quadrature realization of the scaled Hermite basis.
#[derive(Debug, Clone)]
pub struct HermiteGrid {
    n_modes: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `basis[[n, m]] = e_n(nodes[m])`
    basis: Array2<f64>,
}

impl HermiteGrid {
    /// Grid with `n_modes + NODE_PADDING` Gauss nodes.
    pub fn build(n_modes: usize) -> Result<Self> {
        Self::with_nodes(n_modes, n_modes + NODE_PADDING)
    }

    /// Grid with an explicit node count (`n_nodes >= n_modes`).
    ///
    /// A square grid (`n_nodes == n_modes`) diagonalizes the truncated
    /// multiplication-by-`v` matrix: its nodes are that matrix's eigenvalues.
    pub fn with_nodes(n_modes: usize, n_nodes: usize) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "hermite grid needs at least 2 modes, got {n_modes}"
            )));
        }
        if n_nodes < n_modes {
            return Err(Error::InvalidParameter(format!(
                "{n_nodes} nodes cannot resolve {n_modes} modes"
            )));
        }
        let (x, w) = gauss_hermite_function_rule(n_nodes);
        let nodes: Vec<f64> = x.iter().map(|xi| xi * std::f64::consts::SQRT_2).collect();
        let weights: Vec<f64> = w.iter().map(|wi| wi * std::f64::consts::SQRT_2).collect();
        let mut basis = Array2::zeros((n_modes, n_nodes));
        for (m, &v) in nodes.iter().enumerate() {
            for (n, e) in basis_values(n_modes, v).into_iter().enumerate() {
                basis[[n, m]] = e;
            }
        }
        let grid = Self {
            n_modes,
            nodes,
            weights,
            basis,
        };
        let residual = grid.orthonormality_residual();
        if residual > ORTHONORMALITY_LIMIT {
            return Err(Error::Orthonormality {
                residual,
                limit: ORTHONORMALITY_LIMIT,
            });
        }
        Ok(grid)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> &Array2<f64> {
        &self.basis
    }

    /// `max |Σ_m w_m e_n(v_m) e_n'(v_m) - δ_{nn'}|`
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.n_modes {
            for k in n..self.n_modes {
                let s: f64 = (0..self.nodes.len())
                    .map(|m| self.weights[m] * self.basis[[n, m]] * self.basis[[k, m]])
                    .sum();
                let target = if n == k { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Hermite coefficients `(f, e_n)` from values at the nodes.
    pub fn forward(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.nodes.len(), values.len())?;
        Ok((0..self.n_modes)
            .map(|n| {
                values
                    .iter()
                    .enumerate()
                    .map(|(m, &f)| f * (self.weights[m] * self.basis[[n, m]]))
                    .sum()
            })
            .collect())
    }

    /// Values at the nodes of `Σ_n c_n e_n`.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.n_modes, coeffs.len())?;
        Ok((0..self.nodes.len())
            .map(|m| coeffs.iter().enumerate().map(|(n, &c)| c * self.basis[[n, m]]).sum())
            .collect())
    }

    /// Quadrature L² norm of node values.
    pub fn l2_norm(&self, values: &[Complex64]) -> f64 {
        values
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| w * f.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// `e_0(v), …, e_{n-1}(v)` by the upward recurrence
/// `e_{n+1} = (v e_n - √n e_{n-1}) / √(n+1)`.
pub fn basis_values(n_modes: usize, v: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_modes);
    if n_modes == 0 {
        return out;
    }
    let e0 = (2.0 * PI).powf(-0.25) * (-0.25 * v * v).exp();
    out.push(e0);
    if n_modes == 1 {
        return out;
    }
    out.push(v * e0);
    for n in 1..n_modes - 1 {
        let next = (v * out[n] - (n as f64).sqrt() * out[n - 1]) / ((n + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// Gauss–Hermite rule for weight `e^{-x²}`, with weights multiplied by
/// `e^{x²}` so that it integrates functions that carry their own Gaussian.
/// Newton iteration on the orthonormal Hermite-function recurrence.
fn gauss_hermite_function_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let half = n.div_ceil(2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // recurrence on Hermite functions, Gaussian included, so the
            // derivative below yields weights already scaled by e^{x²}
            let mut p1 = pim4 * (-0.5 * z * z).exp();
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let wi = 2.0 / (pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    // ascending order
    x.reverse();
    w.reverse();
    (x, w)
}

/// Which ladder operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Plus,
    Minus,
}

/// Result of a truncating operator: the kept coefficients plus the squared
/// magnitude pushed past the top mode.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub coeffs: Vec<Complex64>,
    pub outflow: f64,
}

pub fn apply_ladder(coeffs: &[Complex64], which: Ladder) -> Truncated {
    let n = coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut outflow = 0.0;
    match which {
        Ladder::Plus => {
            for k in 0..n {
                let shifted = coeffs[k] * ((k + 1) as f64).sqrt();
                if k + 1 < n {
                    out[k + 1] = shifted;
                } else {
                    outflow += shifted.norm_sqr();
                }
            }
        }
        Ladder::Minus => {
            for k in 1..n {
                out[k - 1] = coeffs[k] * (k as f64).sqrt();
            }
        }
    }
    Truncated { coeffs: out, outflow }
}

/// `v·u`, i.e. `A_+ u + A_- u`.
pub fn apply_v_multiplication(coeffs: &[Complex64]) -> Truncated {
    let plus = apply_ladder(coeffs, Ladder::Plus);
    let minus = apply_ladder(coeffs, Ladder::Minus);
    Truncated {
        coeffs: plus.coeffs.iter().zip(&minus.coeffs).map(|(a, b)| a + b).collect(),
        outflow: plus.outflow,
    }
}

/// `∂_v u = (A_- u - A_+ u)/2`.
pub fn apply_derivative(coeffs: &[Complex64]) -> Truncated {
    let plus = apply_ladder(coeffs, Ladder::Plus);
    let minus = apply_ladder(coeffs, Ladder::Minus);
    Truncated {
        coeffs: plus
            .coeffs
            .iter()
            .zip(&minus.coeffs)
            .map(|(p, m)| (m - p) * 0.5)
            .collect(),
        outflow: 0.25 * plus.outflow,
    }
}

/// `ℋ^r u`: mode `n` scaled by `(n + 1/2)^r`.
pub fn apply_h_power(coeffs: &[Complex64], r: f64) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * (n as f64 + 0.5).powf(r))
        .collect()
}

/// Banded velocity operators on Hermite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityOperator {
    MultiplyV,
    Derivative,
    LadderPlus,
    LadderMinus,
    HPower(f64),
    /// Diagonal action, e.g. the linearized collision operator with its eigenvalues.
    Diagonal(Vec<f64>),
}

impl VelocityOperator {
    pub fn apply(&self, coeffs: &[Complex64]) -> Truncated {
        match self {
            VelocityOperator::MultiplyV => apply_v_multiplication(coeffs),
            VelocityOperator::Derivative => apply_derivative(coeffs),
            VelocityOperator::LadderPlus => apply_ladder(coeffs, Ladder::Plus),
            VelocityOperator::LadderMinus => apply_ladder(coeffs, Ladder::Minus),
            VelocityOperator::HPower(r) => Truncated {
                coeffs: apply_h_power(coeffs, *r),
                outflow: 0.0,
            },
            VelocityOperator::Diagonal(d) => Truncated {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .map(|(n, c)| c * d.get(n).copied().unwrap_or(0.0))
                    .collect(),
                outflow: 0.0,
            },
        }
    }

    /// Dense real matrix of the operator truncated to `n` modes.
    pub fn matrix(&self, n: usize) -> Array2<f64> {
        let mut m = Array2::zeros((n, n));
        for col in 0..n {
            let mut unit = vec![Complex64::new(0.0, 0.0); n];
            unit[col] = Complex64::new(1.0, 0.0);
            let image = self.apply(&unit);
            for (row, c) in image.coeffs.iter().enumerate() {
                m[[row, col]] = c.re;
            }
        }
        m
    }
}

/// Apply `v^k ∂_v^l` to `coeffs`, returning an error if any mass would leave
/// the available modes.
pub fn apply_moment(coeffs: &[Complex64], k: usize, l: usize) -> Result<Vec<Complex64>> {
    let top = coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .map_or(0, |i| i + 1);
    if top + k + l > coeffs.len() {
        return Err(Error::Truncation {
            needed: top + k + l,
            available: coeffs.len(),
        });
    }
    let mut u = coeffs.to_vec();
    for _ in 0..l {
        u = apply_derivative(&u).coeffs;
    }
    for _ in 0..k {
        u = apply_v_multiplication(&u).coeffs;
    }
    Ok(u)
}

/// `‖v^k ∂_v^l e_n‖_{L²}`, computed on a basis padded by `k + l` modes.
pub fn moment_norm_e_n(n: usize, k: usize, l: usize) -> Result<f64> {
    let mut unit = vec![Complex64::new(0.0, 0.0); n + k + l + 1];
    unit[n] = Complex64::new(1.0, 0.0);
    let image = apply_moment(&unit, k, l)?;
    Ok(image.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
}

/// Upper bound `2^k √((k+l+n)!/n!)` on [`moment_norm_e_n`].
pub fn moment_norm_bound(n: usize, k: usize, l: usize) -> f64 {
    let log_ratio: f64 = ((n + 1)..=(n + k + l)).map(|j| (j as f64).ln()).sum();
    2f64.powi(k as i32) * (0.5 * log_ratio).exp()
}
