use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use rayon::prelude::*;

use super::{alpha_estimate, eigenvalue_estimate, CrossSectionParams};
use crate::error::{Error, Result};

/// Cached eigenvalues `λ_n` (`n < n_lambda`) and trilinear coefficients
/// `α_{k,l}` for even `k ≤ k_max` and `l ≤ l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTables {
    params: CrossSectionParams,
    lambdas: Vec<f64>,
    /// `alphas[k/2][l]`
    alphas: Vec<Vec<f64>>,
    k_max: usize,
    l_max: usize,
    quadrature_tol: f64,
}

impl KernelTables {
    pub fn build(params: CrossSectionParams, n_lambda: usize, k_max: usize, l_max: usize) -> Result<Self> {
        let lam: Vec<(f64, f64)> = (0..n_lambda)
            .into_par_iter()
            .map(|k| eigenvalue_estimate(k, &params).map(|e| (e.value, e.rel_error)))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<(f64, f64)>> = (0..=k_max / 2)
            .into_par_iter()
            .map(|half_k| {
                (0..=l_max)
                    .map(|l| alpha_estimate(2 * half_k, l, &params).map(|e| (e.value, e.rel_error)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let tol = lam
            .iter()
            .map(|e| e.1)
            .chain(rows.iter().flatten().map(|e| e.1))
            .fold(0.0, f64::max);
        Ok(Self {
            params,
            lambdas: lam.into_iter().map(|e| e.0).collect(),
            alphas: rows.into_iter().map(|r| r.into_iter().map(|e| e.0).collect()).collect(),
            k_max: 2 * (k_max / 2),
            l_max,
            quadrature_tol: tol,
        })
    }

    /// Tables sufficient for a Hermite truncation of `n_modes` modes.
    pub fn for_modes(params: CrossSectionParams, n_modes: usize) -> Result<Self> {
        Self::build(params, n_modes, n_modes.saturating_sub(1), n_modes.saturating_sub(1))
    }

    pub fn params(&self) -> &CrossSectionParams {
        &self.params
    }

    pub fn s(&self) -> f64 {
        self.params.s()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, n: usize) -> Result<f64> {
        self.lambdas.get(n).copied().ok_or(Error::TableCoverage {
            covered: self.lambdas.len(),
            needed: n + 1,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    /// `α_{k,l}`; odd `k` is identically zero.
    pub fn alpha(&self, k: usize, l: usize) -> Result<f64> {
        if k % 2 == 1 {
            return Ok(0.0);
        }
        if k > self.k_max || l > self.l_max {
            return Err(Error::TableCoverage {
                covered: self.k_max.min(self.l_max) + 1,
                needed: k.max(l) + 1,
            });
        }
        Ok(self.alphas[k / 2][l])
    }

    /// Error unless every `λ_n` and `α_{k,l}` with `k + l < n_modes` is present.
    pub fn check_coverage(&self, n_modes: usize) -> Result<()> {
        let covered = self.lambdas.len().min(self.k_max + 2).min(self.l_max + 1);
        if covered < n_modes {
            return Err(Error::TableCoverage {
                covered,
                needed: n_modes,
            });
        }
        Ok(())
    }

    #[doc(hidden)]
    pub fn set_alpha_unchecked(&mut self, k: usize, l: usize, value: f64) {
        self.alphas[k / 2][l] = value;
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# s={:.17e}", self.s());
        let _ = writeln!(out, "# quadrature_tol={:.6e}", self.quadrature_tol);
        let _ = writeln!(out, "# n_lambda={}", self.lambdas.len());
        let _ = writeln!(out, "# k_max={}", self.k_max);
        let _ = writeln!(out, "# l_max={}", self.l_max);
        out.push_str("table,k,l,value\n");
        for (k, v) in self.lambdas.iter().enumerate() {
            let _ = writeln!(out, "lambda,{k},,{v:.17e}");
        }
        for (half_k, row) in self.alphas.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let _ = writeln!(out, "alpha,{},{l},{v:.17e}", 2 * half_k);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut s = None;
        let mut tol = None;
        let mut n_lambda = None;
        let mut k_max = None;
        let mut l_max = None;
        let mut lambdas: Vec<Option<f64>> = Vec::new();
        let mut alphas: Vec<Vec<Option<f64>>> = Vec::new();
        let bad = |line: &str| Error::Table(format!("unparseable line: {line}"));
        for line in BufReader::new(r).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "table,k,l,value" {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let (key, value) = header.trim().split_once('=').ok_or_else(|| bad(line))?;
                match key.trim() {
                    "s" => s = Some(value.parse::<f64>().map_err(|_| bad(line))?),
                    "quadrature_tol" => tol = Some(value.parse::<f64>().map_err(|_| bad(line))?),
                    "n_lambda" => {
                        let n = value.parse::<usize>().map_err(|_| bad(line))?;
                        lambdas = vec![None; n];
                        n_lambda = Some(n);
                    }
                    "k_max" => k_max = Some(value.parse::<usize>().map_err(|_| bad(line))?),
                    "l_max" => l_max = Some(value.parse::<usize>().map_err(|_| bad(line))?),
                    _ => {}
                }
                if let (Some(k), Some(l), true) = (k_max, l_max, alphas.is_empty()) {
                    alphas = vec![vec![None; l + 1]; k / 2 + 1];
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(bad(line));
            }
            let k: usize = fields[1].parse().map_err(|_| bad(line))?;
            let value: f64 = fields[3].parse().map_err(|_| bad(line))?;
            match fields[0] {
                "lambda" => {
                    let slot = lambdas.get_mut(k).ok_or_else(|| bad(line))?;
                    *slot = Some(value);
                }
                "alpha" => {
                    let l: usize = fields[2].parse().map_err(|_| bad(line))?;
                    if k % 2 == 1 {
                        return Err(bad(line));
                    }
                    let slot = alphas
                        .get_mut(k / 2)
                        .and_then(|row| row.get_mut(l))
                        .ok_or_else(|| bad(line))?;
                    *slot = Some(value);
                }
                _ => return Err(bad(line)),
            }
        }
        let missing = |what: &str| Error::Table(format!("missing header {what}"));
        let params = CrossSectionParams::new(s.ok_or_else(|| missing("s"))?)?;
        n_lambda.ok_or_else(|| missing("n_lambda"))?;
        let k_max = k_max.ok_or_else(|| missing("k_max"))?;
        let l_max = l_max.ok_or_else(|| missing("l_max"))?;
        let lambdas = lambdas
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::Table(format!("missing lambda {k}"))))
            .collect::<Result<Vec<_>>>()?;
        let alphas = alphas
            .into_iter()
            .enumerate()
            .map(|(hk, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(l, v)| v.ok_or_else(|| Error::Table(format!("missing alpha {},{l}", 2 * hk))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            lambdas,
            alphas,
            k_max,
            l_max,
            quadrature_tol: tol.unwrap_or(f64::NAN),
        })
    }
}
