//! Dyadic blocks `Δ_q`, low-frequency cuts `S_q`, Besov and Chemin-Lerner
//! norms on the periodic grid.
//!
//! The low-pass profile `χ` equals 1 on `|ξ| ≤ 3/4` and vanishes for
//! `|ξ| ≥ 4/3`; the shell profile is `φ(ξ) = χ(ξ/2) − χ(ξ)`. Block `q ≥ 0`
//! multiplies by `φ(2^{-q}ξ)`, block `−1` by `χ(ξ)`. The sum over
//! `q ≤ q_max` telescopes to `χ(2^{-q_max-1}ξ)`, which is 1 on the whole grid.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::hermite::HermiteGrid;

const CHI_INNER: f64 = 0.75;
const CHI_OUTER: f64 = 4.0 / 3.0;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Low-pass profile, `C^∞`, nonincreasing in `|ξ|`.
pub fn chi(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= CHI_INNER {
        return 1.0;
    }
    if r >= CHI_OUTER {
        return 0.0;
    }
    let a = smooth_step(CHI_OUTER - r);
    let b = smooth_step(r - CHI_INNER);
    a / (a + b)
}

/// Shell profile supported in `3/4 ≤ |ξ| ≤ 8/3`.
pub fn phi(xi: f64) -> f64 {
    let r = xi.abs();
    if !(CHI_INNER..=2.0 * CHI_OUTER).contains(&r) {
        return 0.0;
    }
    (chi(0.5 * xi) - chi(xi)).max(0.0)
}

/// Integrability / summability index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

impl Exponent {
    pub fn from_f64(p: f64) -> Result<Self> {
        match p {
            p if p == 1.0 => Ok(Self::One),
            p if p == 2.0 => Ok(Self::Two),
            p if p == f64::INFINITY => Ok(Self::Infinity),
            _ => Err(Error::InvalidParameter(format!("exponent {p} not in {{1, 2, inf}}"))),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Two => 2.0,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// ℓ^r norm of a nonnegative sequence, summed in index order.
    pub fn sequence_norm(self, values: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Self::One => values.into_iter().sum(),
            Self::Two => values.into_iter().map(|v| v * v).sum::<f64>().sqrt(),
            Self::Infinity => values.into_iter().fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            other => Self::from_f64(
                other
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad exponent {other:?}")))?,
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    grid: SpatialGrid,
    q_max: i32,
    /// `weights[q+1][idx]` is the multiplier of block `q` at FFT slot `idx`.
    weights: Vec<Vec<f64>>,
}

impl DyadicFilterBank {
    pub fn new(grid: &SpatialGrid) -> Result<Self> {
        let xi_max = grid.max_frequency();
        // block 1 starts at 3/2
        if xi_max < 2.0 * CHI_INNER {
            return Err(Error::GridTooCoarse(format!(
                "max |ξ| = {xi_max} cannot host block q = 1"
            )));
        }
        let mut q_max = 1;
        while (2f64).powi(-q_max - 1) * xi_max > CHI_INNER {
            q_max += 1;
        }
        let freqs = grid.frequencies();
        let mut weights = Vec::with_capacity(q_max as usize + 2);
        weights.push(freqs.iter().map(|&x| chi(x)).collect());
        for q in 0..=q_max {
            let scale = (2f64).powi(-q);
            weights.push(
                freqs
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| if grid.is_nyquist(i) { 0.0 } else { phi(scale * x) })
                    .collect(),
            );
        }
        Ok(Self {
            grid: grid.clone(),
            q_max,
            weights,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        -1..=self.q_max
    }

    /// Multiplier of block `q` at each FFT slot.
    pub fn multiplier(&self, q: i32) -> Result<&[f64]> {
        self.check_block(q)?;
        Ok(&self.weights[(q + 1) as usize])
    }

    /// `max_ξ |1 − Σ_q multiplier_q(ξ)|` over the non-Nyquist slots.
    pub fn partition_residual(&self) -> f64 {
        (0..self.grid.n_x())
            .filter(|&i| !self.grid.is_nyquist(i))
            .map(|i| (1.0 - self.weights.iter().map(|w| w[i]).sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }

    /// Blocks whose multiplier is nonzero at frequency `xi`.
    pub fn active_blocks(&self, xi: f64) -> Vec<i32> {
        let mut active = Vec::new();
        if chi(xi) > 0.0 {
            active.push(-1);
        }
        for q in 0..=self.q_max {
            if phi(xi * (2f64).powi(-q)) > 0.0 {
                active.push(q);
            }
        }
        active
    }

    /// `Δ_q` on a coefficient vector in FFT order.
    pub fn block_coeffs(&self, coeffs: &[Complex64], q: i32) -> Result<Vec<Complex64>> {
        let w = self.multiplier(q)?;
        self.check_len(coeffs.len())?;
        Ok(coeffs.iter().zip(w).map(|(c, w)| c * *w).collect())
    }

    /// `Δ_q u` for physical samples `u`.
    pub fn block(&self, samples: &[Complex64], q: i32) -> Result<Vec<Complex64>> {
        let coeffs = self.grid.forward(samples)?;
        self.grid.inverse(&self.block_coeffs(&coeffs, q)?)
    }

    /// `S_q = Σ_{p ≤ q−1} Δ_p` on coefficients.
    pub fn low_cut_coeffs(&self, coeffs: &[Complex64], q: i32) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len()];
        for p in -1..q.min(self.q_max + 1) {
            for ((o, c), w) in out.iter_mut().zip(coeffs).zip(&self.weights[(p + 1) as usize]) {
                *o += c * *w;
            }
        }
        Ok(out)
    }

    /// `‖Δ_q u‖` for a slice `u[n][j]`, in `L²_v L²_x`.
    pub fn block_norm(&self, u: ArrayView2<Complex64>, q: i32) -> Result<f64> {
        let w = self.multiplier(q)?;
        self.check_len(u.ncols())?;
        let mut acc = 0.0;
        for row in u.axis_iter(Axis(0)) {
            for (c, w) in row.iter().zip(w) {
                acc += c.norm_sqr() * w * w;
            }
        }
        Ok(acc.sqrt())
    }

    /// `sup_v ‖Δ_q u(·, v)‖_{L²_x}`, with `u` given in Hermite coefficients
    /// and evaluated at the nodes of `velocity`.
    pub fn block_norm_sup_v(&self, u: ArrayView2<Complex64>, q: i32, velocity: &HermiteGrid) -> Result<f64> {
        let w = self.multiplier(q)?;
        self.check_len(u.ncols())?;
        if u.nrows() > velocity.n_modes() {
            return Err(Error::LengthMismatch {
                expected: velocity.n_modes(),
                got: u.nrows(),
            });
        }
        let basis = velocity.basis();
        let mut best = 0.0f64;
        for m in 0..velocity.n_nodes() {
            let mut acc = 0.0;
            for (j, w) in w.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let mut value = Complex64::new(0.0, 0.0);
                for n in 0..u.nrows() {
                    value += u[[n, j]] * basis[[n, m]];
                }
                acc += value.norm_sqr() * w * w;
            }
            best = best.max(acc.sqrt());
        }
        Ok(best)
    }

    /// `Σ_j |û_j| ≤ C · ‖u‖_{B^{1/2}_{2,1}}` holds with this `C`, by
    /// Cauchy-Schwarz inside each block.
    pub fn embedding_constant(&self) -> f64 {
        self.blocks()
            .map(|q| {
                let count = self.weights[(q + 1) as usize].iter().filter(|w| **w > 0.0).count();
                (count as f64).sqrt() * (2f64).powf(-0.5 * q as f64)
            })
            .fold(0.0, f64::max)
    }

    fn check_block(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            return Err(Error::InvalidParameter(format!(
                "block {q} outside -1..={}",
                self.q_max
            )));
        }
        Ok(())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.grid.n_x() {
            return Err(Error::LengthMismatch {
                expected: self.grid.n_x(),
                got,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovProfile {
    pub sigma: f64,
    pub p: Exponent,
    pub r: Exponent,
    /// `block_norms[q+1] = ‖Δ_q u‖`
    pub block_norms: Vec<f64>,
    pub value: f64,
}

impl BesovProfile {
    pub fn from_block_norms(sigma: f64, p: Exponent, r: Exponent, block_norms: Vec<f64>) -> Self {
        let value = r.sequence_norm(weighted(sigma, &block_norms));
        Self {
            sigma,
            p,
            r,
            block_norms,
            value,
        }
    }

    pub fn weighted(&self) -> Vec<f64> {
        weighted(self.sigma, &self.block_norms).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,block_norm,weighted\n");
        for (i, (b, w)) in self.block_norms.iter().zip(self.weighted()).enumerate() {
            let _ = writeln!(out, "{},{b:.17e},{w:.17e}", i as i32 - 1);
        }
        out
    }
}

fn weighted(sigma: f64, block_norms: &[f64]) -> impl Iterator<Item = f64> + '_ {
    block_norms
        .iter()
        .enumerate()
        .map(move |(i, b)| (2f64).powf(sigma * (i as f64 - 1.0)) * b)
}

fn require_p2(p: Exponent) -> Result<()> {
    if p != Exponent::Two {
        return Err(Error::InvalidParameter(format!(
            "only p = 2 is realized on the grid, got {:?}",
            p
        )));
    }
    Ok(())
}

/// `B^σ_{p,r}` norm of `u[n][j]`, blocks measured in `L²_v L²_x`.
pub fn besov_norm(
    bank: &DyadicFilterBank,
    u: ArrayView2<Complex64>,
    sigma: f64,
    p: Exponent,
    r: Exponent,
) -> Result<BesovProfile> {
    require_p2(p)?;
    let norms = bank
        .blocks()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&q| bank.block_norm(u, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(BesovProfile::from_block_norms(sigma, p, r, norms))
}

/// `B^σ_{2,r}` norm of a single coefficient vector.
pub fn besov_norm_1d(bank: &DyadicFilterBank, coeffs: &[Complex64], sigma: f64, r: Exponent) -> Result<BesovProfile> {
    let view = ArrayView2::from_shape((1, coeffs.len()), coeffs).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    besov_norm(bank, view, sigma, Exponent::Two, r)
}

/// Norm parameters of `L̃^{ρ1}_T L̃^{ρ2}_v (B^σ_{2,r})`.
#[derive(Debug, Clone, Copy)]
pub struct CheminLerner<'a> {
    pub rho1: Exponent,
    pub rho2: Exponent,
    pub sigma: f64,
    pub r: Exponent,
    /// Needed for `ρ2 = ∞`.
    pub velocity: Option<&'a HermiteGrid>,
}

impl<'a> CheminLerner<'a> {
    fn check(&self) -> Result<()> {
        if self.rho1 == Exponent::One || self.rho2 == Exponent::One {
            return Err(Error::InvalidParameter("ρ1, ρ2 must be 2 or ∞".into()));
        }
        if self.rho2 == Exponent::Infinity && self.velocity.is_none() {
            return Err(Error::InvalidParameter("ρ2 = ∞ needs a velocity grid".into()));
        }
        Ok(())
    }

    fn velocity_block_norm(&self, bank: &DyadicFilterBank, u: ArrayView2<Complex64>, q: i32) -> Result<f64> {
        match (self.rho2, self.velocity) {
            (Exponent::Infinity, Some(grid)) => bank.block_norm_sup_v(u, q, grid),
            _ => bank.block_norm(u, q),
        }
    }
}

fn time_norm(rho1: Exponent, series: &[f64], dt: f64) -> f64 {
    match rho1 {
        Exponent::Infinity => series.iter().copied().fold(0.0, f64::max),
        _ => {
            if series.len() < 2 {
                return 0.0;
            }
            let sq: Vec<f64> = series.iter().map(|v| v * v).collect();
            let inner: f64 = sq[1..sq.len() - 1].iter().sum();
            (dt * (0.5 * (sq[0] + sq[sq.len() - 1]) + inner)).sqrt()
        }
    }
}

/// Block-outermost mixed norm: per block, the time norm of the velocity norm
/// of `‖Δ_q u‖_{L²_x}`, then the weighted `ℓ^r` sum.
pub fn chemin_lerner_norm(
    bank: &DyadicFilterBank,
    snapshots: &[Array2<Complex64>],
    dt: f64,
    norm: &CheminLerner,
) -> Result<f64> {
    norm.check()?;
    if snapshots.is_empty() {
        return Err(Error::EmptySeries);
    }
    let per_block = bank
        .blocks()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&q| {
            let series = snapshots
                .iter()
                .map(|u| norm.velocity_block_norm(bank, u.view(), q))
                .collect::<Result<Vec<_>>>()?;
            Ok(time_norm(norm.rho1, &series, dt))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(norm.r.sequence_norm(weighted(norm.sigma, &per_block)))
}

/// Time-outermost counterpart: `‖ ‖u(t)‖_{L̃^{ρ2}_v B^σ_{2,r}} ‖_{L^{ρ1}_T}`.
pub fn time_outer_norm(
    bank: &DyadicFilterBank,
    snapshots: &[Array2<Complex64>],
    dt: f64,
    norm: &CheminLerner,
) -> Result<f64> {
    norm.check()?;
    if snapshots.is_empty() {
        return Err(Error::EmptySeries);
    }
    let series = snapshots
        .iter()
        .map(|u| {
            let blocks = bank
                .blocks()
                .map(|q| norm.velocity_block_norm(bank, u.view(), q))
                .collect::<Result<Vec<_>>>()?;
            Ok(norm.r.sequence_norm(weighted(norm.sigma, &blocks)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(time_norm(norm.rho1, &series, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bank(n_x: usize, l: f64) -> DyadicFilterBank {
        DyadicFilterBank::new(&SpatialGrid::new(n_x, l).unwrap()).unwrap()
    }

    fn random_coeffs(bank: &DyadicFilterBank, seed: u64) -> Vec<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = bank.grid();
        (0..g.n_x())
            .map(|i| {
                if g.is_nyquist(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }
            })
            .collect()
    }

    fn l2(c: &[Complex64]) -> f64 {
        c.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn profiles() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.4), 0.0);
        assert_eq!(phi(0.0), 0.0);
        assert_eq!(phi(0.7), 0.0);
        assert_eq!(phi(2.7), 0.0);
        assert!(phi(1.5) > 0.99);
        for i in 0..=400 {
            let x = i as f64 * 0.01;
            assert!((0.0..=1.0).contains(&chi(x)));
            assert!((0.0..=1.0).contains(&phi(x)));
            assert!(chi(x + 0.01) <= chi(x));
        }
    }

    #[test]
    fn partition_of_unity() {
        for (n_x, l) in [(8, 1.0), (64, 1.0), (128, 3.7), (1024, 0.5)] {
            let b = bank(n_x, l);
            assert!(b.partition_residual() <= 1e-12, "{n_x} {l}");
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = SpatialGrid::new(4, 1.0).unwrap();
        assert!(matches!(DyadicFilterBank::new(&g), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn active_blocks_examples() {
        let b = bank(64, 1.0);
        assert_eq!(b.active_blocks(0.0), vec![-1]);
        assert_eq!(b.active_blocks(2.0), vec![0, 1]);
    }

    #[test]
    fn band_limited_and_constant_inputs() {
        let b = bank(64, 4.0);
        let g = b.grid();
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        for j in -4i64..=4 {
            c[g.slot(j)] = Complex64::new(1.0 / (1 + j.abs()) as f64, 0.0);
        }
        for q in 1..=b.q_max() {
            assert!(l2(&b.block_coeffs(&c, q).unwrap()) == 0.0);
        }
        let constant = vec![Complex64::new(2.5, 0.0); 64];
        let low = b.block(&constant, -1).unwrap();
        assert!(low.iter().all(|v| (v - Complex64::new(2.5, 0.0)).norm() < 1e-13));
        for q in 0..=b.q_max() {
            assert!(b.block(&constant, q).unwrap().iter().all(|v| v.norm() < 1e-13));
        }
    }

    #[test]
    fn blocks_reconstruct_and_localize() {
        let b = bank(256, 2.0);
        for seed in 0..50 {
            let c = random_coeffs(&b, seed);
            let norm = l2(&c);
            let mut sum = vec![Complex64::new(0.0, 0.0); c.len()];
            for q in b.blocks() {
                let d = b.block_coeffs(&c, q).unwrap();
                assert!(l2(&d) <= norm);
                sum.iter_mut().zip(&d).for_each(|(s, d)| *s += d);
                for p in b.blocks() {
                    if (p - q).abs() >= 2 {
                        let dd = b.block_coeffs(&d, p).unwrap();
                        assert!(l2(&dd) <= 1e-12 * norm);
                    }
                }
            }
            let diff: Vec<Complex64> = sum.iter().zip(&c).map(|(a, b)| a - b).collect();
            assert!(l2(&diff) <= 1e-12 * norm);
        }
    }

    #[test]
    fn low_cut_matches_partial_sum() {
        let b = bank(64, 1.0);
        let c = random_coeffs(&b, 7);
        let s2 = b.low_cut_coeffs(&c, 2).unwrap();
        let mut direct = vec![Complex64::new(0.0, 0.0); 64];
        for q in -1..2 {
            let d = b.block_coeffs(&c, q).unwrap();
            direct.iter_mut().zip(&d).for_each(|(s, d)| *s += d);
        }
        assert!(s2.iter().zip(&direct).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn two_two_norm_is_two_sided_equivalent_to_l2() {
        // Σφ = 1 with 0 ≤ φ ≤ 1 and at most two overlapping blocks gives
        // 1/2 ≤ Σφ² ≤ 1 pointwise.
        let b = bank(256, 2.0);
        for seed in 0..20 {
            let c = random_coeffs(&b, 100 + seed);
            let norm = l2(&c);
            let v = besov_norm_1d(&b, &c, 0.0, Exponent::Two).unwrap().value;
            assert!(v <= norm * (1.0 + 1e-12) && v >= norm / 2f64.sqrt() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn shell_mode_at_two_splits_between_blocks() {
        let b = bank(64, 1.0);
        let g = b.grid();
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        c[g.slot(2)] = Complex64::new(1.0, 0.0);
        let w0 = phi(2.0);
        let w1 = phi(1.0);
        assert!((w0 + w1 - 1.0).abs() < 1e-15);
        // regression values of the constructed profile
        assert!((w1 - 0.268_941_421_369_995_3).abs() < 1e-12, "{w1:.16}");
        for sigma in [0.0, 0.5, 1.0] {
            let prof = besov_norm_1d(&b, &c, sigma, Exponent::One).unwrap();
            let expected = w0 + (2f64).powf(sigma) * w1;
            assert!((prof.value - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn unsupported_p_is_rejected() {
        let b = bank(16, 1.0);
        let u = Array2::<Complex64>::zeros((2, 16));
        assert!(besov_norm(&b, u.view(), 0.5, Exponent::One, Exponent::One).is_err());
        let zero = besov_norm(&b, u.view(), 0.5, Exponent::Two, Exponent::One).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn profile_csv_rows() {
        let b = bank(16, 1.0);
        let c = random_coeffs(&b, 3);
        let prof = besov_norm_1d(&b, &c, 0.5, Exponent::One).unwrap();
        let csv = prof.to_csv();
        assert_eq!(csv.lines().count(), prof.block_norms.len() + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("-1,"));
    }

    fn slice_from(bank: &DyadicFilterBank, rows: usize, seed: u64) -> Array2<Complex64> {
        let n = bank.grid().n_x();
        let mut a = Array2::zeros((rows, n));
        for r in 0..rows {
            let c = random_coeffs(bank, seed * 31 + r as u64);
            for j in 0..n {
                a[[r, j]] = c[j] / (1.0 + r as f64);
            }
        }
        a
    }

    #[test]
    fn chemin_lerner_special_cases() {
        let b = bank(64, 1.0);
        let u = slice_from(&b, 3, 5);
        let besov = besov_norm(&b, u.view(), 0.5, Exponent::Two, Exponent::One)
            .unwrap()
            .value;
        let mk = |rho1| CheminLerner {
            rho1,
            rho2: Exponent::Two,
            sigma: 0.5,
            r: Exponent::One,
            velocity: None,
        };
        let single = chemin_lerner_norm(&b, std::slice::from_ref(&u), 0.1, &mk(Exponent::Infinity)).unwrap();
        assert!((single - besov).abs() <= 1e-12 * besov);
        let series = vec![u.clone(); 11];
        let sup = chemin_lerner_norm(&b, &series, 0.1, &mk(Exponent::Infinity)).unwrap();
        assert!((sup - besov).abs() <= 1e-12 * besov);
        let l2t = chemin_lerner_norm(&b, &series, 0.2, &mk(Exponent::Two)).unwrap();
        assert!((l2t - 2f64.sqrt() * besov).abs() <= 1e-12 * besov);
        assert!(matches!(
            chemin_lerner_norm(&b, &[], 0.1, &mk(Exponent::Two)),
            Err(Error::EmptySeries)
        ));
    }

    #[test]
    fn minkowski_ordering() {
        let b = bank(64, 1.0);
        let hg = HermiteGrid::build(4).unwrap();
        for seed in 0..20 {
            let series: Vec<Array2<Complex64>> = (0..6).map(|k| slice_from(&b, 4, 1000 * seed + k)).collect();
            for rho1 in [Exponent::Two, Exponent::Infinity] {
                for rho2 in [Exponent::Two, Exponent::Infinity] {
                    let norm = CheminLerner {
                        rho1,
                        rho2,
                        sigma: 0.5,
                        r: Exponent::One,
                        velocity: Some(&hg),
                    };
                    let outer = chemin_lerner_norm(&b, &series, 0.2, &norm).unwrap();
                    let inner = time_outer_norm(&b, &series, 0.2, &norm).unwrap();
                    assert!(outer >= inner * (1.0 - 1e-12), "{rho1:?} {rho2:?}: {outer} < {inner}");
                }
            }
        }
    }

    #[test]
    fn critical_embedding_ratio_is_bounded() {
        let b = bank(128, 1.0);
        let c_d = b.embedding_constant();
        let mut worst = 0.0f64;
        for seed in 0..100 {
            let c = random_coeffs(&b, 5000 + seed);
            let u = b.grid().inverse(&c).unwrap();
            let sup = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let norm = besov_norm_1d(&b, &c, 0.5, Exponent::One).unwrap().value;
            worst = worst.max(sup / norm);
        }
        assert!(worst <= c_d, "{worst} > {c_d}");
        assert!(worst > 0.0);
    }

    proptest! {
        #[test]
        fn block_norm_never_exceeds_l2(seed in 0u64..10_000, q in -1i32..5) {
            let b = bank(64, 1.0);
            let c = random_coeffs(&b, seed);
            let d = b.block_coeffs(&c, q).unwrap();
            prop_assert!(l2(&d) <= l2(&c));
        }
    }
}
