use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use kac_spectral::diagnostics::{
    bisect_weight_rate, critical_norm, fit_decay, fit_factorial_growth, moment_estimate, predicted_space_index,
    predicted_velocity_index, weighted_norm_monitor, Axis, FitReport,
};
use kac_spectral::grid::SpatialGrid;
use kac_spectral::kernel::{asymptotic_lambda, CrossSectionParams, KernelTables};
use kac_spectral::littlewood_paley::{besov_norm, DyadicFilterBank, Exponent};
use kac_spectral::solver::{
    bisect_largest, picard_solve, Forcing, PicardOptions, Run, Solver, SpectralState, StepScheme,
};
use kac_spectral::verify::{self, Baselines, Verdict};
use kac_spectral::{Error, Result};
use serde_json::json;

use crate::config::{with_amplitude, RunConfig};
use crate::output::Outputs;

/// Highest `k`, `l`, `q` in the moment fits of `smoothing-fit`.
const MOMENT_ORDER: usize = 8;

/// `Ok(false)` means the command ran but a check failed.
pub type Outcome = Result<bool>;

pub fn eig(cfg: &RunConfig, k_max: usize) -> Outcome {
    let p = CrossSectionParams::new(cfg.s)?;
    let tables = KernelTables::build(p, k_max + 1, 0, 0)?;
    let mut csv = String::from("k,lambda,asymptotic,ratio\n");
    for (k, &lam) in tables.lambdas().iter().enumerate() {
        if k == 0 {
            let _ = writeln!(csv, "0,{lam:.17e},,");
        } else {
            let a = asymptotic_lambda(k as f64, &p);
            let _ = writeln!(csv, "{k},{lam:.17e},{a:.17e},{:.17e}", lam / a);
        }
    }
    let mut out = Outputs::create(&cfg.out, "eig")?;
    out.write("eig.csv", &csv)?;
    out.record("s", cfg.s);
    out.record("k_max", k_max);
    out.record("quadrature_tol", tables.quadrature_tol());
    finish(out)
}

pub fn coeff(cfg: &RunConfig, k_max: usize, l_max: usize) -> Outcome {
    let tables = KernelTables::build(CrossSectionParams::new(cfg.s)?, k_max.max(l_max) + 1, k_max, l_max)?;
    let mut out = Outputs::create(&cfg.out, "coeff")?;
    out.write("tables.csv", &tables.to_csv())?;
    out.record("s", cfg.s);
    out.record("k_max", k_max);
    out.record("l_max", l_max);
    finish(out)
}

pub fn bobylev_check(cfg: &RunConfig, k_max: usize, tol: f64) -> Outcome {
    let rows = verify::bobylev_rows(cfg.s, k_max)?;
    let mut csv = String::from("k,l,table,projected,error\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{:.17e},{:.17e},{:.6e}",
            r.k, r.l, r.table, r.projected, r.error
        );
    }
    let worst = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let passed = worst <= tol;
    println!("worst relative deviation {worst:.3e} (tolerance {tol:.1e})");
    let mut out = Outputs::create(&cfg.out, "bobylev-check")?;
    out.write("bobylev.csv", &csv)?;
    out.record("s", cfg.s);
    out.record("k_max", k_max);
    out.record("worst_error", worst);
    out.record("passed", passed);
    finish(out)?;
    Ok(passed)
}

fn solver_for(cfg: &RunConfig) -> Result<(Solver, SpectralState)> {
    let tables = KernelTables::for_modes(CrossSectionParams::new(cfg.s)?, cfg.n_v)?;
    let grid = SpatialGrid::new(cfg.n_x, cfg.length)?;
    let solver = Solver::new(&tables, cfg.n_v, &grid, StepScheme::new(cfg.scheme, cfg.dt)?)?;
    let g0 = cfg.initial.build(cfg.n_v, cfg.n_x, cfg.length)?;
    Ok((solver, g0))
}

fn forcing(cfg: &RunConfig) -> Forcing<'static> {
    if cfg.diagnostics.nonlinear {
        Forcing::Quadratic
    } else {
        Forcing::Off
    }
}

fn record_run(out: &mut Outputs, run: &Run) {
    out.record("steps", run.steps);
    out.record("dt_effective", run.dt);
    out.record("outflow_total", run.outflow_total);
    out.record("times", run.snapshots.iter().map(|s| s.time).collect::<Vec<_>>());
}

pub fn simulate(cfg: &RunConfig) -> Outcome {
    let (solver, g0) = solver_for(cfg)?;
    let run = solver.run(&g0, cfg.t_final, cfg.diagnostics.snapshot_stride, forcing(cfg))?;
    let mut out = Outputs::create(&cfg.out, "simulate")?;
    std::fs::create_dir_all(out.dir().join("snapshots"))?;
    let mut series = String::from("index,time,l2_norm\n");
    for (i, snap) in run.snapshots.iter().enumerate() {
        out.write(&format!("snapshots/snapshot_{i:05}.csv"), &snap.to_csv())?;
        let _ = writeln!(series, "{i},{:.17e},{:.17e}", snap.time, snap.norm());
    }
    out.write("series.csv", &series)?;
    out.record_config(cfg);
    record_run(&mut out, &run);
    finish(out)
}

pub fn picard(cfg: &RunConfig, max_iters: usize, delta: f64, amplitude: Option<f64>) -> Outcome {
    let (solver, _) = solver_for(cfg)?;
    let bank = DyadicFilterBank::new(solver.grid())?;
    let opts = PicardOptions { max_iters, delta };
    let build = |a: f64| with_amplitude(&cfg.initial, a).build(cfg.n_v, cfg.n_x, cfg.length);
    let mut out = Outputs::create(&cfg.out, "picard")?;
    let amplitude = match amplitude {
        Some(a) => a,
        None => {
            let tune = PicardOptions {
                max_iters: verify::PICARD_ITERS,
                delta,
            };
            let threshold = bisect_largest(1e-3, 10.0, 16, |a| {
                match picard_solve(&solver, &bank, &build(a)?, cfg.t_final, &tune) {
                    Ok(rep) => Ok(verify::contracts_after_three(&rep)),
                    Err(e) if e.is_numerical() => Ok(false),
                    Err(e) => Err(e),
                }
            })?
            .ok_or(Error::NonContraction {
                iterate: 0,
                ratio: f64::NAN,
            })?;
            out.record("amplitude_threshold", threshold);
            0.5 * threshold
        }
    };
    let rep = picard_solve(&solver, &bank, &build(amplitude)?, cfg.t_final, &opts)?;
    let mut csv = String::from("iterate,difference,ratio\n");
    for (i, d) in rep.differences.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            format!("{:.17e}", rep.ratios[i - 1])
        };
        let _ = writeln!(csv, "{},{d:.17e},{ratio}", i + 1);
    }
    out.write("picard.csv", &csv)?;
    out.record_config(cfg);
    out.record("amplitude", amplitude);
    out.record("delta", delta);
    out.record("max_iters", max_iters);
    out.record("dt_effective", rep.dt);
    out.record("differences", &rep.differences);
    out.record("ratios", &rep.ratios);
    finish(out)
}

pub fn smoothing_fit(cfg: &RunConfig) -> Outcome {
    let (solver, g0) = solver_for(cfg)?;
    let bank = DyadicFilterBank::new(solver.grid())?;
    let run = solver.run(&g0, cfg.t_final, cfg.diagnostics.snapshot_stride, forcing(cfg))?;
    let mut fits = format!("index,time,{}\n", FitReport::CSV_HEADER);
    let mut last: Vec<FitReport> = Vec::new();
    for (i, snap) in run.snapshots.iter().enumerate() {
        last.clear();
        for axis in [Axis::Fourier, Axis::Hermite] {
            let f = fit_decay(snap, axis)?;
            let _ = writeln!(fits, "{i},{:.17e},{}", snap.time, f.to_csv_row());
            last.push(f);
        }
    }
    let c = match cfg.diagnostics.weight_rate {
        Some(c) => Some(c),
        None => bisect_weight_rate(&bank, &run.snapshots, cfg.s, cfg.diagnostics.weight_factor, 8.0, 30)?,
    };
    let mut weight = String::from("index,time,critical_norm,weighted_norm\n");
    let monitor = match c {
        Some(c) => weighted_norm_monitor(&bank, &run.snapshots, cfg.s, c)?,
        None => vec![None; run.snapshots.len()],
    };
    for (i, (snap, w)) in run.snapshots.iter().zip(&monitor).enumerate() {
        let plain = critical_norm(&bank, &snap.coeffs)?;
        let w = w.map_or(String::new(), |w| format!("{w:.17e}"));
        let _ = writeln!(weight, "{i},{:.17e},{plain:.17e},{w}", snap.time);
    }
    let final_state = run.snapshots.last().expect("initial snapshot present");
    let mut moments = String::from("kind,order,norm\n");
    let mut moment_fits = serde_json::Map::new();
    for kind in ["v", "dv", "dx"] {
        let norms = (0..=MOMENT_ORDER)
            .map(|m| match kind {
                "v" => moment_estimate(&bank, final_state, m, 0, 0),
                "dv" => moment_estimate(&bank, final_state, 0, m, 0),
                _ => moment_estimate(&bank, final_state, 0, 0, m as u32),
            })
            .collect::<Result<Vec<f64>>>()?;
        for (m, v) in norms.iter().enumerate() {
            let _ = writeln!(moments, "{kind},{m},{v:.17e}");
        }
        moment_fits.insert(kind.into(), serde_json::to_value(fit_factorial_growth(&norms)?)?);
    }
    let mut out = Outputs::create(&cfg.out, "smoothing-fit")?;
    out.write("fits.csv", &fits)?;
    out.write("weight.csv", &weight)?;
    out.write("moments.csv", &moments)?;
    out.record("moment_fits", moment_fits);
    out.record_config(cfg);
    record_run(&mut out, &run);
    out.record("weight_rate", c);
    out.record("final_fits", &last);
    out.record(
        "predicted",
        json!({
            "x_exponent": 2.0 * cfg.s / (2.0 * cfg.s + 1.0),
            "v_exponent": 1.0 / predicted_velocity_index(cfg.s),
            "velocity_index": predicted_velocity_index(cfg.s),
            "space_index": predicted_space_index(cfg.s),
        }),
    );
    finish(out)
}

pub fn kolmogorov_check(cfg: &RunConfig) -> Outcome {
    let verdict = verify::kolmogorov_oracle_at(&Baselines::recorded(), &[cfg.s])?;
    let slices = verify::kolmogorov_x_slices(cfg.s)?;
    let mut csv = String::from("xi,l2_norm\n");
    for (k, v) in slices.iter().enumerate() {
        let _ = writeln!(csv, "{k},{v:.17e}");
    }
    println!("{}", verdict.line());
    let mut out = Outputs::create(&cfg.out, "kolmogorov-check")?;
    out.write("kolmogorov.csv", &csv)?;
    out.record("s", cfg.s);
    out.record("verdict", &verdict);
    finish(out)?;
    Ok(verdict.passed)
}

pub fn besov(cfg: &RunConfig, input: Option<&Path>, sigma: f64, r: Exponent) -> Outcome {
    let state = match input {
        Some(p) => SpectralState::read_csv(File::open(p)?, cfg.n_v, cfg.n_x, cfg.length, 0.0)?,
        None => cfg.initial.build(cfg.n_v, cfg.n_x, cfg.length)?,
    };
    let grid = SpatialGrid::new(cfg.n_x, cfg.length)?;
    let bank = DyadicFilterBank::new(&grid)?;
    let profile = besov_norm(&bank, state.coeffs.view(), sigma, Exponent::Two, r)?;
    println!("B^{sigma}_{{2,{}}} norm {:.12e}", r.as_f64(), profile.value);
    let mut out = Outputs::create(&cfg.out, "besov")?;
    out.write("besov.csv", &profile.to_csv())?;
    out.record_config(cfg);
    out.record("input", input.map(|p| p.display().to_string()));
    out.record("profile", &profile);
    finish(out)
}

pub fn verify(cfg: &RunConfig, suite: &str, tables: Option<&Path>) -> Outcome {
    let cached = match tables {
        Some(p) => Some(KernelTables::read_csv(File::open(p)?)?),
        None => None,
    };
    let verdicts: Vec<Verdict> = verify::run_suite(suite, cached.as_ref())?;
    for v in &verdicts {
        println!("{}", v.line());
    }
    let passed = verdicts.iter().all(|v| v.passed);
    let mut out = Outputs::create(&cfg.out, "verify")?;
    out.write("verify.json", &(serde_json::to_string_pretty(&verdicts)? + "\n"))?;
    out.record("suite", suite);
    out.record("tables", tables.map(|p| p.display().to_string()));
    out.record("passed", passed);
    finish(out)?;
    Ok(passed)
}

fn finish(out: Outputs) -> Outcome {
    let path = out.finish()?;
    eprintln!("wrote {}", path.display());
    Ok(true)
}
