use std::sync::Arc;

use ndarray::{Array2, ArrayView2, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::hermite::HermiteGrid;
use crate::kernel::KernelTables;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollisionMode {
    /// `−𝒦g`
    Derivative,
    /// `e^{−dt 𝒦} g`
    Exponential(f64),
}

pub fn apply_collision(
    coeffs: ArrayView2<Complex64>,
    tables: &KernelTables,
    mode: CollisionMode,
) -> Result<Array2<Complex64>> {
    tables.check_coverage(coeffs.nrows())?;
    let mut out = coeffs.to_owned();
    for (n, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let lambda = tables.lambda(n)?;
        let factor = match mode {
            CollisionMode::Derivative => -lambda,
            CollisionMode::Exponential(dt) => (-dt * lambda).exp(),
        };
        row.mapv_inplace(|c| c * factor);
    }
    Ok(out)
}

/// `−v∂_x g` in coefficients: `−iξ_j (√n ĝ[n−1] + √(n+1) ĝ[n+1])`, truncated at `N_v`.
pub fn apply_transport(coeffs: ArrayView2<Complex64>, grid: &SpatialGrid) -> Result<Array2<Complex64>> {
    if coeffs.ncols() != grid.n_x() {
        return Err(Error::LengthMismatch {
            expected: grid.n_x(),
            got: coeffs.ncols(),
        });
    }
    let n_v = coeffs.nrows();
    let freqs = grid.frequencies();
    let mut out = Array2::zeros(coeffs.raw_dim());
    for n in 0..n_v {
        for (j, xi) in freqs.iter().enumerate() {
            let mut acc = ZERO;
            if n > 0 {
                acc += coeffs[[n - 1, j]] * (n as f64).sqrt();
            }
            if n + 1 < n_v {
                acc += coeffs[[n + 1, j]] * ((n + 1) as f64).sqrt();
            }
            out[[n, j]] = Complex64::new(0.0, -xi) * acc;
        }
    }
    Ok(out)
}

/// Exact propagator `e^{−t v∂_x}` of the truncated transport, applied as a
/// phase at the `N_v` Gauss-Hermite nodes, which diagonalize the truncated
/// multiplication-by-`v` matrix.
#[derive(Debug, Clone)]
pub struct TransportPropagator {
    /// `q[m][n] = √w_m e_n(v_m)`, orthogonal.
    q: Array2<f64>,
    nodes: Vec<f64>,
    freqs: Vec<f64>,
}

impl TransportPropagator {
    pub fn new(n_v: usize, grid: &SpatialGrid) -> Result<Self> {
        let hg = HermiteGrid::with_nodes(n_v, n_v)?;
        let basis = hg.basis();
        let mut q = Array2::zeros((n_v, n_v));
        for m in 0..n_v {
            let sw = hg.weights()[m].sqrt();
            for n in 0..n_v {
                q[[m, n]] = sw * basis[[n, m]];
            }
        }
        Ok(Self {
            q,
            nodes: hg.nodes().to_vec(),
            freqs: grid.frequencies(),
        })
    }

    pub fn apply(&self, coeffs: &mut Array2<Complex64>, t: f64) {
        let re = coeffs.mapv(|c| c.re);
        let im = coeffs.mapv(|c| c.im);
        let mut phys_re = self.q.dot(&re);
        let mut phys_im = self.q.dot(&im);
        Zip::indexed(&mut phys_re).and(&mut phys_im).for_each(|(m, j), r, i| {
            let phase = Complex64::from_polar(1.0, -t * self.freqs[j] * self.nodes[m]);
            let z = Complex64::new(*r, *i) * phase;
            *r = z.re;
            *i = z.im;
        });
        let qt = self.q.t();
        let back_re = qt.dot(&phys_re);
        let back_im = qt.dot(&phys_im);
        Zip::from(coeffs).and(&back_re).and(&back_im).for_each(|c, r, i| {
            *c = Complex64::new(*r, *i);
        });
    }
}

/// Evaluates `Γ(f, g)_n(x) = Σ_{k even, k+l=n} α_{k,l} f_k(x) g_l(x)` with
/// products in physical `x` on a 3/2-padded grid.
#[derive(Clone)]
pub struct Nonlinear {
    n_v: usize,
    n_x: usize,
    padded: usize,
    /// `alpha[k/2][l]` for `k + l < 2 N_v − 1`
    alpha: Vec<Vec<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Nonlinear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nonlinear")
            .field("n_v", &self.n_v)
            .field("n_x", &self.n_x)
            .field("padded", &self.padded)
            .finish()
    }
}

/// `Γ` output and the `L²` norm of the part with `k + l ≥ N_v` that the
/// truncation discards.
#[derive(Debug, Clone)]
pub struct GammaOutput {
    pub value: Array2<Complex64>,
    pub outflow: f64,
}

impl Nonlinear {
    pub fn new(n_v: usize, n_x: usize, tables: &KernelTables) -> Result<Self> {
        tables.check_coverage(n_v)?;
        let mut alpha = Vec::with_capacity(n_v.div_ceil(2));
        for k in (0..n_v).step_by(2) {
            alpha.push((0..n_v).map(|l| tables.alpha(k, l)).collect::<Result<Vec<_>>>()?);
        }
        let padded = if n_x == 1 { 1 } else { 3 * n_x / 2 };
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_v,
            n_x,
            padded,
            alpha,
            forward: planner.plan_fft_forward(padded),
            inverse: planner.plan_fft_inverse(padded),
        })
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    fn to_physical(&self, row: ndarray::ArrayView1<Complex64>) -> Vec<Complex64> {
        let (n, m) = (self.n_x, self.padded);
        let mut buf = vec![ZERO; m];
        if n == 1 {
            buf[0] = row[0];
            return buf;
        }
        for (idx, c) in row.iter().enumerate() {
            if idx == n / 2 {
                continue;
            }
            let target = if idx < n / 2 { idx } else { m - (n - idx) };
            buf[target] = *c;
        }
        self.inverse.process(&mut buf);
        buf
    }

    fn to_spectral(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        let (n, m) = (self.n_x, self.padded);
        if n == 1 {
            return buf;
        }
        self.forward.process(&mut buf);
        let scale = 1.0 / m as f64;
        (0..n)
            .map(|idx| {
                if idx == n / 2 {
                    ZERO
                } else if idx < n / 2 {
                    buf[idx] * scale
                } else {
                    buf[m - (n - idx)] * scale
                }
            })
            .collect()
    }

    fn check(&self, a: ArrayView2<Complex64>) -> Result<()> {
        if a.nrows() != self.n_v || a.ncols() != self.n_x {
            return Err(Error::LengthMismatch {
                expected: self.n_v * self.n_x,
                got: a.len(),
            });
        }
        Ok(())
    }

    pub fn gamma(&self, f: ArrayView2<Complex64>, g: ArrayView2<Complex64>) -> Result<GammaOutput> {
        self.check(f)?;
        self.check(g)?;
        let f_phys: Vec<Vec<Complex64>> = (0..self.n_v)
            .into_par_iter()
            .map(|k| {
                if k % 2 == 0 {
                    self.to_physical(f.row(k))
                } else {
                    Vec::new()
                }
            })
            .collect();
        let g_phys: Vec<Vec<Complex64>> = (0..self.n_v)
            .into_par_iter()
            .map(|l| self.to_physical(g.row(l)))
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..2 * self.n_v - 1)
            .into_par_iter()
            .map(|n| {
                let mut acc = vec![ZERO; self.padded];
                let mut any = false;
                for k in (0..=n.min(self.n_v - 1)).step_by(2) {
                    let l = n - k;
                    if l >= self.n_v {
                        continue;
                    }
                    let a = self.alpha[k / 2][l];
                    if a == 0.0 {
                        continue;
                    }
                    any = true;
                    for ((o, fk), gl) in acc.iter_mut().zip(&f_phys[k]).zip(&g_phys[l]) {
                        *o += fk * gl * a;
                    }
                }
                if any {
                    self.to_spectral(acc)
                } else {
                    vec![ZERO; self.n_x]
                }
            })
            .collect();
        let mut value = Array2::zeros((self.n_v, self.n_x));
        let mut outflow = 0.0;
        for (n, row) in rows.into_iter().enumerate() {
            if n < self.n_v {
                value.row_mut(n).iter_mut().zip(row).for_each(|(o, c)| *o = c);
            } else {
                outflow += row.iter().map(|c| c.norm_sqr()).sum::<f64>();
            }
        }
        Ok(GammaOutput {
            value,
            outflow: outflow.sqrt(),
        })
    }
}
