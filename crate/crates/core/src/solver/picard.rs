use ndarray::Array2;
use num_complex::Complex64;

use super::state::SpectralState;
use super::stepper::{Forcing, Solver};
use crate::error::{Error, Result};
use crate::hermite::apply_h_power;
use crate::littlewood_paley::{chemin_lerner_norm, CheminLerner, DyadicFilterBank, Exponent};

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub max_iters: usize,
    /// Damping rate of the seed iterate, in `[0, 1]`.
    pub delta: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            max_iters: 4,
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardReport {
    /// Per iterate (seed first), the state at every step boundary.
    pub iterates: Vec<Vec<Array2<Complex64>>>,
    /// `‖g̃_{k+1} − g̃_k‖` in the energy norm.
    pub differences: Vec<f64>,
    /// `differences[k] / differences[k−1]`
    pub ratios: Vec<f64>,
    pub dt: f64,
}

/// `‖g‖_{L̃^∞_T L̃²_v B^{1/2}_{2,1}} + ‖ℋ^{s/2} g‖_{L̃²_T L̃²_v B^{1/2}_{2,1}}`
pub fn energy_functional(bank: &DyadicFilterBank, series: &[Array2<Complex64>], dt: f64, s: f64) -> Result<f64> {
    let sup = CheminLerner {
        rho1: Exponent::Infinity,
        rho2: Exponent::Two,
        sigma: 0.5,
        r: Exponent::One,
        velocity: None,
    };
    let l2 = CheminLerner {
        rho1: Exponent::Two,
        ..sup
    };
    let weighted: Vec<Array2<Complex64>> = series.iter().map(|g| h_power_rows(g, 0.5 * s)).collect();
    Ok(chemin_lerner_norm(bank, series, dt, &sup)? + chemin_lerner_norm(bank, &weighted, dt, &l2)?)
}

pub(crate) fn h_power_rows(g: &Array2<Complex64>, r: f64) -> Array2<Complex64> {
    let mut out = g.clone();
    for mut col in out.columns_mut() {
        let v = apply_h_power(&col.to_vec(), r);
        col.iter_mut().zip(v).for_each(|(o, c)| *o = c);
    }
    out
}

/// `exp(−δt(√ℋ + ⟨D_x⟩)^{2s/(2s+1)}) g_0` at each time in `times`.
pub fn seed_iterate(g0: &SpectralState, times: &[f64], s: f64, delta: f64) -> Result<Vec<Array2<Complex64>>> {
    let grid = g0.grid()?;
    let freqs = grid.frequencies();
    let power = 2.0 * s / (2.0 * s + 1.0);
    let symbol = Array2::from_shape_fn(g0.coeffs.raw_dim(), |(n, j)| {
        ((n as f64 + 0.5).sqrt() + (1.0 + freqs[j] * freqs[j]).sqrt()).powf(power)
    });
    Ok(times
        .iter()
        .map(|&t| {
            let mut g = g0.coeffs.clone();
            g.zip_mut_with(&symbol, |c, w| *c *= (-delta * t * w).exp());
            g
        })
        .collect())
}

/// Iterates `∂_t g̃_{k+1} + v∂_x g̃_{k+1} + 𝒦g̃_{k+1} = Γ(g̃_k, g̃_{k+1})`,
/// `g̃_{k+1}(0) = g_0`, stopping with [`Error::NonContraction`] when two
/// consecutive difference ratios reach 1.
pub fn picard_solve(
    solver: &Solver,
    bank: &DyadicFilterBank,
    g0: &SpectralState,
    t_final: f64,
    opts: &PicardOptions,
) -> Result<PicardReport> {
    if !(0.0..=1.0).contains(&opts.delta) {
        return Err(Error::InvalidParameter(format!(
            "δ must lie in [0, 1], got {}",
            opts.delta
        )));
    }
    let (steps, dt) = solver.step_count(t_final);
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let s = solver.tables().s();
    let mut iterates = vec![seed_iterate(g0, &times, s, opts.delta)?];
    let mut differences: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut strikes = 0;
    for k in 1..=opts.max_iters {
        let prev = iterates.last().expect("seed present");
        let run = solver.run_frozen(g0, t_final, 1, Forcing::Off, Some(prev))?;
        let series: Vec<Array2<Complex64>> = run.snapshots.into_iter().map(|s| s.coeffs).collect();
        let diff: Vec<Array2<Complex64>> = series.iter().zip(prev).map(|(a, b)| a - b).collect();
        let d = energy_functional(bank, &diff, dt, s)?;
        if let Some(&last) = differences.last() {
            let ratio = if last == 0.0 { 0.0 } else { d / last };
            ratios.push(ratio);
            strikes = if ratio >= 1.0 { strikes + 1 } else { 0 };
            if strikes >= 2 {
                return Err(Error::NonContraction { iterate: k, ratio });
            }
        }
        differences.push(d);
        iterates.push(series);
    }
    Ok(PicardReport {
        iterates,
        differences,
        ratios,
        dt,
    })
}

/// Largest `x ∈ [lo, hi]` (to `iters` halvings) with `accept(x)`, assuming
/// acceptance is monotone decreasing in `x`. `None` if even `lo` fails.
pub fn bisect_largest<F>(lo: f64, hi: f64, iters: usize, mut accept: F) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !accept(lo)? {
        return Ok(None);
    }
    if accept(hi)? {
        return Ok(Some(hi));
    }
    let (mut good, mut bad) = (lo, hi);
    for _ in 0..iters {
        // geometric midpoint: amplitudes span decades
        let mid = if good > 0.0 {
            (good * bad).sqrt()
        } else {
            0.5 * (good + bad)
        };
        if accept(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::kernel::{CrossSectionParams, KernelTables};
    use crate::solver::{InitialData, SchemeKind, StepScheme};

    fn setup(kind: SchemeKind, dt: f64) -> (Solver, DyadicFilterBank) {
        let tables = KernelTables::for_modes(CrossSectionParams::new(0.5).unwrap(), 8).unwrap();
        let grid = SpatialGrid::new(16, 1.0).unwrap();
        let solver = Solver::new(&tables, 8, &grid, StepScheme::new(kind, dt).unwrap()).unwrap();
        (solver, DyadicFilterBank::new(&grid).unwrap())
    }

    fn datum(amp: f64) -> SpectralState {
        InitialData::Rough {
            a: 1.0,
            b: 1.0,
            amplitude: amp,
            seed: 11,
        }
        .build(8, 16, 1.0)
        .unwrap()
    }

    #[test]
    fn zero_datum_gives_zero_iterates() {
        let (solver, bank) = setup(SchemeKind::StrangSplit, 0.05);
        let rep = picard_solve(&solver, &bank, &datum(0.0), 0.5, &PicardOptions::default()).unwrap();
        assert!(rep.differences.iter().all(|d| *d == 0.0));
        assert!(rep.iterates.iter().flatten().all(|g| g.iter().all(|c| c.norm() == 0.0)));
    }

    #[test]
    fn first_iterate_is_the_frozen_linear_evolution() {
        let (strang, bank) = setup(SchemeKind::StrangSplit, 0.01);
        let g0 = datum(0.2);
        let rep = picard_solve(
            &strang,
            &bank,
            &g0,
            0.5,
            &PicardOptions {
                max_iters: 1,
                delta: 1.0,
            },
        )
        .unwrap();
        let rk4 = strang.with_scheme(StepScheme::new(SchemeKind::Rk4Reference, 0.01).unwrap());
        let direct = rk4
            .run_frozen(&g0, 0.5, 1, Forcing::Off, Some(&rep.iterates[0]))
            .unwrap();
        let a = rep.iterates[1].last().unwrap();
        let b = &direct.snapshots.last().unwrap().coeffs;
        let err = (a - b).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-3 * g0.norm(), "{err}");
    }

    #[test]
    fn small_datum_contracts() {
        let (solver, bank) = setup(SchemeKind::StrangSplit, 0.05);
        let rep = picard_solve(&solver, &bank, &datum(0.05), 1.0, &PicardOptions::default()).unwrap();
        assert!(rep.ratios.iter().all(|r| *r <= 0.5), "{:?}", rep.ratios);
    }

    #[test]
    fn bisection_finds_threshold() {
        let x = bisect_largest(0.01, 10.0, 40, |x| Ok(x <= 2.0)).unwrap().unwrap();
        assert!((x - 2.0).abs() < 1e-6);
        assert_eq!(bisect_largest(1.0, 2.0, 5, |_| Ok(false)).unwrap(), None);
    }
}
