use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::weight::critical_norm;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::hermite::{apply_moment, HermiteGrid};
use crate::kernel::KernelTables;
use crate::littlewood_paley::DyadicFilterBank;
use crate::solver::{Nonlinear, SpectralState};

/// Extra Hermite modes available to `v^k ∂_v^l`.
pub const MOMENT_PADDING: usize = 16;

/// `‖v^k ∂_v^l ∂_x^q g‖_{L̃²_v B^{1/2}_{2,1}}`
pub fn moment_estimate(bank: &DyadicFilterBank, state: &SpectralState, k: usize, l: usize, q: u32) -> Result<f64> {
    if k + l > MOMENT_PADDING {
        return Err(Error::Truncation {
            needed: state.n_v() + k + l,
            available: state.n_v() + MOMENT_PADDING,
        });
    }
    let n_v = state.n_v();
    let rows = n_v + k + l;
    let freqs = state.grid()?.frequencies();
    let mut out = Array2::zeros((rows, state.n_x()));
    for (j, xi) in freqs.iter().enumerate() {
        let mut col = vec![Complex64::new(0.0, 0.0); rows];
        for n in 0..n_v {
            col[n] = state.coeffs[[n, j]];
        }
        let image = apply_moment(&col, k, l)?;
        let symbol = Complex64::new(0.0, *xi).powu(q);
        for (n, c) in image.into_iter().enumerate() {
            out[[n, j]] = c * symbol;
        }
    }
    critical_norm(bank, &out)
}

/// Fit of `log M_k ≈ A + k log C + p log k!` over `k = 0..`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorialFit {
    pub log_prefactor: f64,
    pub log_rate: f64,
    pub factorial_power: f64,
    pub residual: f64,
}

pub fn fit_factorial_growth(norms: &[f64]) -> Result<FactorialFit> {
    if norms.len() < 4 || norms.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!(
            "need ≥ 4 positive moments, got {:?}",
            norms
        )));
    }
    // normal equations for the three-column design [1, k, log k!]
    let rows: Vec<[f64; 3]> = (0..norms.len())
        .map(|k| [1.0, k as f64, ln_gamma(k as f64 + 1.0)])
        .collect();
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (r, yk) in rows.iter().zip(&y) {
        for i in 0..3 {
            aty[i] += r[i] * yk;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let x = solve3(ata, aty).ok_or_else(|| Error::DegenerateFit("singular moment design".into()))?;
    let residual = rows
        .iter()
        .zip(&y)
        .map(|(r, yk)| (yk - r[0] * x[0] - r[1] * x[1] - r[2] * x[2]).powi(2))
        .sum();
    Ok(FactorialFit {
        log_prefactor: x[0],
        log_rate: x[1],
        factorial_power: x[2],
        residual,
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Predicted velocity Gelfand-Shilov index `(3s+1)/(2s(s+1))`.
pub fn predicted_velocity_index(s: f64) -> f64 {
    (3.0 * s + 1.0) / (2.0 * s * (s + 1.0))
}

/// Predicted spatial Gevrey index `1 + 1/(2s)`.
pub fn predicted_space_index(s: f64) -> f64 {
    1.0 + 1.0 / (2.0 * s)
}

/// `max_{1≤n≤N} max((λ_n+1)/(n+1/2)^s, (n+1/2)^s/(λ_n+1))`
pub fn coercivity_check(lambdas: &[f64], s: f64, n_max: usize) -> Result<f64> {
    if n_max == 0 || n_max >= lambdas.len() {
        return Err(Error::TableCoverage {
            covered: lambdas.len(),
            needed: n_max + 1,
        });
    }
    let c = (1..=n_max)
        .map(|n| {
            let a = lambdas[n] + 1.0;
            let b = (n as f64 + 0.5).powf(s);
            (a / b).max(b / a)
        })
        .fold(0.0, f64::max);
    if !c.is_finite() {
        return Err(Error::NonFinite {
            time: 0.0,
            detail: "coercivity constant".into(),
        });
    }
    Ok(c)
}

fn hs_norm(g: &Array2<Complex64>, s: f64) -> f64 {
    g.indexed_iter()
        .map(|((n, _), c)| c.norm_sqr() * (n as f64 + 0.5).powf(s))
        .sum::<f64>()
        .sqrt()
}

/// `‖f‖_{L²_v L^∞_x}` with the sup taken over the grid nodes and the
/// velocity integral by Gauss-Hermite quadrature.
fn l2v_linfx(f: &Array2<Complex64>, grid: &SpatialGrid, hg: &HermiteGrid) -> Result<f64> {
    let n_v = f.nrows();
    let phys: Vec<Vec<Complex64>> = (0..n_v)
        .map(|n| grid.inverse(&f.row(n).to_vec()))
        .collect::<Result<_>>()?;
    let basis = hg.basis();
    let mut acc = 0.0;
    for m in 0..hg.n_nodes() {
        let sup = (0..grid.n_x())
            .map(|x| (0..n_v).map(|n| phys[n][x] * basis[[n, m]]).sum::<Complex64>().norm())
            .fold(0.0, f64::max);
        acc += hg.weights()[m] * sup * sup;
    }
    Ok(acc.sqrt())
}

/// `|(Γ(f,g),h)| / (‖f‖_{L²_v L^∞_x} ‖ℋ^{s/2}g‖ ‖ℋ^{s/2}h‖)`
pub fn trilinear_quotient(
    nonlinear: &Nonlinear,
    grid: &SpatialGrid,
    hg: &HermiteGrid,
    s: f64,
    f: &Array2<Complex64>,
    g: &Array2<Complex64>,
    h: &Array2<Complex64>,
) -> Result<f64> {
    let gamma = nonlinear.gamma(f.view(), g.view())?.value;
    let lhs = gamma
        .iter()
        .zip(h.iter())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        .norm();
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / (l2v_linfx(f, grid, hg)? * hs_norm(g, s) * hs_norm(h, s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrilinearSample {
    pub samples: usize,
    pub max_ratio: f64,
}

/// Maximum of the trilinear quotient over `samples` seeded random
/// band-limited triples; sample `i` draws from its own ChaCha stream.
pub fn trilinear_ratio(
    tables: &KernelTables,
    n_v: usize,
    grid: &SpatialGrid,
    samples: usize,
    seed: u64,
) -> Result<TrilinearSample> {
    let nonlinear = Nonlinear::new(n_v, grid.n_x(), tables)?;
    let hg = HermiteGrid::build(n_v)?;
    let s = tables.s();
    let band = (grid.n_x() / 4).max(1);
    let random = |rng: &mut ChaCha8Rng| {
        let mut a = SpectralState::zeros(n_v, grid.n_x(), grid.length());
        for n in 0..n_v {
            for j in 0..band {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let c = if j == 0 { Complex64::new(c.re, 0.0) } else { c };
                a.coeffs[[n, j]] = c;
                if j > 0 {
                    a.coeffs[[n, grid.n_x() - j]] = c.conj();
                }
            }
        }
        a.coeffs
    };
    let ratios = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (f, g, h) = (random(&mut rng), random(&mut rng), random(&mut rng));
            trilinear_quotient(&nonlinear, grid, &hg, s, &f, &g, &h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrilinearSample {
        samples,
        max_ratio: ratios.into_iter().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{alpha, CrossSectionParams};

    #[test]
    fn moment_of_ground_state() {
        let grid = SpatialGrid::new(16, 1.0).unwrap();
        let bank = DyadicFilterBank::new(&grid).unwrap();
        let mut s = SpectralState::zeros(6, 16, 1.0);
        s.coeffs[[0, 0]] = Complex64::new(0.8, 0.0);
        s.coeffs[[0, 3]] = Complex64::new(0.1, 0.2);
        let plain = moment_estimate(&bank, &s, 0, 0, 0).unwrap();
        assert!((plain - critical_norm(&bank, &s.coeffs).unwrap()).abs() < 1e-15);
        let v = moment_estimate(&bank, &s, 1, 0, 0).unwrap();
        let mut e1 = SpectralState::zeros(6, 16, 1.0);
        e1.coeffs.row_mut(1).assign(&s.coeffs.row(0));
        assert!((v - critical_norm(&bank, &e1.coeffs).unwrap()).abs() < 1e-14);
        assert!(moment_estimate(&bank, &s, 10, 10, 0).is_err());
    }

    #[test]
    fn factorial_fit_recovers_power() {
        let norms: Vec<f64> = (0..9)
            .map(|k| (0.3 + k as f64 * 1.1f64.ln() + 0.7 * ln_gamma(k as f64 + 1.0)).exp())
            .collect();
        let fit = fit_factorial_growth(&norms).unwrap();
        assert!((fit.factorial_power - 0.7).abs() < 1e-9);
        assert!((fit.log_rate - 1.1f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn index_ordering() {
        for i in 1..1000 {
            let s = i as f64 / 1000.0;
            assert!(predicted_velocity_index(s) < predicted_space_index(s), "{s}");
        }
    }

    #[test]
    fn coercivity_base_cases() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let t = KernelTables::build(p, 64, 0, 0).unwrap();
        let c1 = coercivity_check(t.lambdas(), 0.5, 1).unwrap();
        let l1 = t.lambdas()[1];
        assert!((c1 - ((l1 + 1.0) / 1.5f64.sqrt()).max(1.5f64.sqrt() / (l1 + 1.0))).abs() < 1e-15);
        let c2 = coercivity_check(t.lambdas(), 0.5, 2).unwrap();
        assert!(c2 >= 2.5f64.sqrt());
        assert!(coercivity_check(t.lambdas(), 0.5, 64).is_err());
    }

    #[test]
    fn trilinear_single_modes() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let tables = KernelTables::for_modes(p, 8).unwrap();
        let grid = SpatialGrid::new(8, 1.0).unwrap();
        let nl = Nonlinear::new(8, 8, &tables).unwrap();
        let hg = HermiteGrid::build(8).unwrap();
        for (k, l) in [(0, 3), (2, 2), (4, 1)] {
            let unit = |n: usize| {
                let mut a = Array2::zeros((8, 8));
                a[[n, 0]] = Complex64::new(1.0, 0.0);
                a
            };
            let r = trilinear_quotient(&nl, &grid, &hg, 0.5, &unit(k), &unit(l), &unit(k + l)).unwrap();
            let expected =
                alpha(k, l, &p).unwrap().abs() / ((l as f64 + 0.5).powf(0.25) * ((k + l) as f64 + 0.5).powf(0.25));
            assert!((r / expected - 1.0).abs() < 1e-10, "({k},{l}) {r} {expected}");
        }
        let zero = Array2::zeros((8, 8));
        let g = {
            let mut a = Array2::zeros((8, 8));
            a[[1, 0]] = Complex64::new(1.0, 0.0);
            a
        };
        assert_eq!(trilinear_quotient(&nl, &grid, &hg, 0.5, &zero, &g, &g).unwrap(), 0.0);
    }

    #[test]
    fn trilinear_sampling_is_deterministic() {
        let p = CrossSectionParams::new(0.5).unwrap();
        let tables = KernelTables::for_modes(p, 6).unwrap();
        let grid = SpatialGrid::new(8, 1.0).unwrap();
        let a = trilinear_ratio(&tables, 6, &grid, 12, 5).unwrap();
        let b = trilinear_ratio(&tables, 6, &grid, 12, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.max_ratio.is_finite() && a.max_ratio > 0.0);
    }
}
