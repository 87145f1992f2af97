use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// Coefficients `ĝ[n][j]`, Hermite mode `n` by FFT slot `j`, at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub coeffs: Array2<Complex64>,
    pub length: f64,
    pub time: f64,
}

impl SpectralState {
    pub fn zeros(n_v: usize, n_x: usize, length: f64) -> Self {
        Self {
            coeffs: Array2::zeros((n_v, n_x)),
            length,
            time: 0.0,
        }
    }

    pub fn n_v(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn n_x(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.n_x(), self.length)
    }

    /// Frobenius norm, equal to `‖g‖_{L²_{x,v}}` in the normalized measure.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `max |ĝ[n][−j] − conj ĝ[n][j]|`, Nyquist slot included as `|ĝ|`.
    pub fn reality_defect(&self) -> f64 {
        let n_x = self.n_x();
        let mut worst = 0.0f64;
        for row in self.coeffs.rows() {
            for j in 0..n_x {
                let partner = (n_x - j) % n_x;
                let d = if n_x > 1 && j == n_x / 2 {
                    row[j].norm()
                } else {
                    (row[partner] - row[j].conj()).norm()
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Project onto real-valued fluctuations and clear the Nyquist slot.
    pub fn enforce_reality(&mut self) {
        let n_x = self.n_x();
        for mut row in self.coeffs.rows_mut() {
            for j in 0..=n_x / 2 {
                let partner = (n_x - j) % n_x;
                if n_x > 1 && j == n_x / 2 {
                    row[j] = Complex64::new(0.0, 0.0);
                } else {
                    let avg = 0.5 * (row[j] + row[partner].conj());
                    row[j] = avg;
                    row[partner] = avg.conj();
                }
            }
        }
    }

    /// Rows `n, j, re, im` with signed `j`.
    pub fn to_csv(&self) -> String {
        let grid_k = |idx: usize| signed(idx, self.n_x());
        let mut out = String::from("n,j,re,im\n");
        for ((n, idx), c) in self.coeffs.indexed_iter() {
            let _ = writeln!(out, "{n},{},{:.17e},{:.17e}", grid_k(idx), c.re, c.im);
        }
        out
    }

    pub fn read_csv<R: Read>(r: R, n_v: usize, n_x: usize, length: f64, time: f64) -> Result<Self> {
        let mut state = Self::zeros(n_v, n_x, length);
        state.time = time;
        let mut seen = 0usize;
        for line in BufReader::new(r).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('n') {
                continue;
            }
            let bad = || Error::Table(format!("bad snapshot row: {line}"));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let n: usize = f[0].parse().map_err(|_| bad())?;
            let j: i64 = f[1].parse().map_err(|_| bad())?;
            let re: f64 = f[2].parse().map_err(|_| bad())?;
            let im: f64 = f[3].parse().map_err(|_| bad())?;
            if n >= n_v || j.unsigned_abs() as usize > n_x / 2 {
                return Err(bad());
            }
            state.coeffs[[n, j.rem_euclid(n_x as i64) as usize]] = Complex64::new(re, im);
            seen += 1;
        }
        if seen != n_v * n_x {
            return Err(Error::Table(format!(
                "snapshot has {seen} rows, expected {}",
                n_v * n_x
            )));
        }
        Ok(state)
    }
}

fn signed(idx: usize, n_x: usize) -> i64 {
    if idx < n_x.div_ceil(2) || n_x == 1 {
        idx as i64
    } else {
        idx as i64 - n_x as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub n: usize,
    pub j: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Initial fluctuation menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Finitely many Hermite/Fourier modes; each mode at `j ≠ 0` also sets
    /// its conjugate partner at `−j`.
    Modes {
        modes: Vec<ModeSpec>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `|ĝ[n][j]| = amplitude (1+n)^{-a} (1+|j|)^{-b}` with seeded phases.
    Rough { a: f64, b: f64, amplitude: f64, seed: u64 },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    pub fn build(&self, n_v: usize, n_x: usize, length: f64) -> Result<SpectralState> {
        let mut state = SpectralState::zeros(n_v, n_x, length);
        match self {
            InitialData::Modes { modes, amplitude } => {
                for m in modes {
                    if m.n >= n_v || m.j.unsigned_abs() as usize >= n_x.div_ceil(2).max(1) {
                        return Err(Error::InvalidParameter(format!(
                            "mode ({}, {}) outside the {n_v}×{n_x} grid",
                            m.n, m.j
                        )));
                    }
                    let c = Complex64::new(m.re, m.im) * *amplitude;
                    let slot = m.j.rem_euclid(n_x as i64) as usize;
                    if m.j == 0 {
                        state.coeffs[[m.n, 0]] += Complex64::new(c.re, 0.0);
                    } else {
                        state.coeffs[[m.n, slot]] += c;
                        state.coeffs[[m.n, (n_x - slot) % n_x]] += c.conj();
                    }
                }
            }
            InitialData::Rough { a, b, amplitude, seed } => {
                if *a < 0.0 || *b < 0.0 {
                    return Err(Error::InvalidParameter("decay exponents must be ≥ 0".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let half = if n_x == 1 { 0 } else { n_x / 2 - 1 };
                for n in 0..n_v {
                    for j in 0..=half {
                        let size = amplitude * (1.0 + n as f64).powf(-a) * (1.0 + j as f64).powf(-b);
                        let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        if j == 0 {
                            let sign = if angle < std::f64::consts::PI { 1.0 } else { -1.0 };
                            state.coeffs[[n, 0]] = Complex64::new(sign * size, 0.0);
                        } else {
                            let c = Complex64::from_polar(size, angle);
                            state.coeffs[[n, j]] = c;
                            state.coeffs[[n, n_x - j]] = c.conj();
                        }
                    }
                }
            }
        }
        Ok(state)
    }
}
