use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{apply_collision, apply_transport, CollisionMode, Nonlinear, TransportPropagator};
use super::state::SpectralState;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::kernel::KernelTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    StrangSplit,
    Rk4Reference,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" | "strang-split" => Ok(Self::StrangSplit),
            "rk4" | "rk4-reference" => Ok(Self::Rk4Reference),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepScheme {
    pub kind: SchemeKind,
    pub dt: f64,
}

impl StepScheme {
    pub fn new(kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { kind, dt })
    }
}

/// Right-hand side of the nonlinear part.
#[derive(Debug, Clone, Copy)]
pub enum Forcing<'a> {
    /// Linear run.
    Off,
    /// `Γ(g, g)`
    Quadratic,
    /// `Γ(f, g)` with `f` known at the start and end of the step and
    /// interpolated linearly in between.
    Frozen {
        start: &'a Array2<Complex64>,
        end: &'a Array2<Complex64>,
    },
}

impl Forcing<'_> {
    fn frozen_at(start: &Array2<Complex64>, end: &Array2<Complex64>, theta: f64) -> Array2<Complex64> {
        if theta == 0.0 {
            start.clone()
        } else if theta == 1.0 {
            end.clone()
        } else {
            start * Complex64::new(1.0 - theta, 0.0) + end * Complex64::new(theta, 0.0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solver {
    tables: KernelTables,
    grid: SpatialGrid,
    n_v: usize,
    transport: TransportPropagator,
    nonlinear: Nonlinear,
    scheme: StepScheme,
}

/// A time series of snapshots, the first at `t = 0`.
#[derive(Debug, Clone)]
pub struct Run {
    pub snapshots: Vec<SpectralState>,
    /// Effective step used (the requested one shrunk to divide `T`).
    pub dt: f64,
    pub steps: usize,
    /// Sum over steps of `dt·‖discarded Γ part‖`.
    pub outflow_total: f64,
}

impl Solver {
    pub fn new(tables: &KernelTables, n_v: usize, grid: &SpatialGrid, scheme: StepScheme) -> Result<Self> {
        tables.check_coverage(n_v)?;
        Ok(Self {
            tables: tables.clone(),
            grid: grid.clone(),
            n_v,
            transport: TransportPropagator::new(n_v, grid)?,
            nonlinear: Nonlinear::new(n_v, grid.n_x(), tables)?,
            scheme,
        })
    }

    pub fn scheme(&self) -> StepScheme {
        self.scheme
    }

    pub fn with_scheme(&self, scheme: StepScheme) -> Self {
        Self { scheme, ..self.clone() }
    }

    pub fn tables(&self) -> &KernelTables {
        &self.tables
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn nonlinear(&self) -> &Nonlinear {
        &self.nonlinear
    }

    fn check_state(&self, state: &SpectralState) -> Result<()> {
        if state.n_v() != self.n_v || state.n_x() != self.grid.n_x() || state.length != self.grid.length() {
            return Err(Error::InvalidParameter(format!(
                "state {}×{} (L = {}) does not match solver {}×{} (L = {})",
                state.n_v(),
                state.n_x(),
                state.length,
                self.n_v,
                self.grid.n_x(),
                self.grid.length()
            )));
        }
        Ok(())
    }

    /// Nonlinear right-hand side at fraction `theta ∈ [0,1]` of the step.
    fn forcing(&self, forcing: Forcing, g: ArrayView2<Complex64>, theta: f64) -> Result<(Array2<Complex64>, f64)> {
        match forcing {
            Forcing::Off => Ok((Array2::zeros(g.raw_dim()), 0.0)),
            Forcing::Quadratic => {
                let out = self.nonlinear.gamma(g, g)?;
                Ok((out.value, out.outflow))
            }
            Forcing::Frozen { start, end } => {
                let f = Forcing::frozen_at(start, end, theta);
                let out = self.nonlinear.gamma(f.view(), g)?;
                Ok((out.value, out.outflow))
            }
        }
    }

    fn rhs(&self, forcing: Forcing, g: &Array2<Complex64>, theta: f64) -> Result<(Array2<Complex64>, f64)> {
        let (mut d, outflow) = self.forcing(forcing, g.view(), theta)?;
        d += &apply_collision(g.view(), &self.tables, CollisionMode::Derivative)?;
        d += &apply_transport(g.view(), &self.grid)?;
        Ok((d, outflow))
    }

    /// One step of length `dt`; returns the new state and the discarded
    /// nonlinear outflow rate (maximum over stages).
    pub fn step_with(&self, state: &SpectralState, dt: f64, forcing: Forcing) -> Result<(SpectralState, f64)> {
        self.check_state(state)?;
        let g = &state.coeffs;
        let c = |x: f64| Complex64::new(x, 0.0);
        let (next, outflow) = match self.scheme.kind {
            SchemeKind::StrangSplit => {
                let mut h = apply_collision(g.view(), &self.tables, CollisionMode::Exponential(0.5 * dt))?;
                self.transport.apply(&mut h, 0.5 * dt);
                let (outflow, h) = if matches!(forcing, Forcing::Off) {
                    (0.0, h)
                } else {
                    let (k1, o1) = self.forcing(forcing, h.view(), 0.0)?;
                    let mid = &h + &(k1 * c(0.5 * dt));
                    let (k2, o2) = self.forcing(forcing, mid.view(), 0.5)?;
                    (o1.max(o2), &h + &(k2 * c(dt)))
                };
                let mut h = h;
                self.transport.apply(&mut h, 0.5 * dt);
                (
                    apply_collision(h.view(), &self.tables, CollisionMode::Exponential(0.5 * dt))?,
                    outflow,
                )
            }
            SchemeKind::Rk4Reference => {
                let (k1, o1) = self.rhs(forcing, g, 0.0)?;
                let g2 = g + &(&k1 * c(0.5 * dt));
                let (k2, o2) = self.rhs(forcing, &g2, 0.5)?;
                let g3 = g + &(&k2 * c(0.5 * dt));
                let (k3, o3) = self.rhs(forcing, &g3, 0.5)?;
                let g4 = g + &(&k3 * c(dt));
                let (k4, o4) = self.rhs(forcing, &g4, 1.0)?;
                let incr = (k1 + &(k2 * c(2.0)) + &(k3 * c(2.0)) + &k4) * c(dt / 6.0);
                (g + &incr, o1.max(o2).max(o3).max(o4))
            }
        };
        let out = SpectralState {
            coeffs: next,
            length: state.length,
            time: state.time + dt,
        };
        if !out.is_finite() {
            return Err(Error::NonFinite {
                time: out.time,
                detail: format!(
                    "{:?} step of dt = {dt} from ‖g‖ = {:.6e}",
                    self.scheme.kind,
                    state.norm()
                ),
            });
        }
        Ok((out, outflow))
    }

    pub fn step(&self, state: &SpectralState, forcing: Forcing) -> Result<SpectralState> {
        self.step_with(state, self.scheme.dt, forcing).map(|r| r.0)
    }

    /// Number of steps and effective step for a horizon `t_final`.
    pub fn step_count(&self, t_final: f64) -> (usize, f64) {
        if t_final <= 0.0 {
            return (0, self.scheme.dt);
        }
        let steps = (t_final / self.scheme.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, t_final / steps as f64)
    }

    /// Evolve to `t_final`, keeping every `stride`-th snapshot (and the last).
    pub fn run(&self, initial: &SpectralState, t_final: f64, stride: usize, forcing: Forcing) -> Result<Run> {
        self.run_frozen(initial, t_final, stride, forcing, None)
    }

    /// As [`Solver::run`], with `Γ(f, ·)` frozen at the per-step series `frozen`
    /// (one entry per step boundary) when given.
    pub fn run_frozen(
        &self,
        initial: &SpectralState,
        t_final: f64,
        stride: usize,
        forcing: Forcing,
        frozen: Option<&[Array2<Complex64>]>,
    ) -> Result<Run> {
        self.check_state(initial)?;
        if t_final < 0.0 || !t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("T must be ≥ 0, got {t_final}")));
        }
        let (steps, dt) = self.step_count(t_final);
        if let Some(f) = frozen {
            if f.len() != steps + 1 {
                return Err(Error::LengthMismatch {
                    expected: steps + 1,
                    got: f.len(),
                });
            }
        }
        let stride = stride.max(1);
        let mut snapshots = vec![initial.clone()];
        let mut current = initial.clone();
        let mut outflow_total = 0.0;
        for k in 0..steps {
            let forcing_k = match frozen {
                Some(f) => Forcing::Frozen {
                    start: &f[k],
                    end: &f[k + 1],
                },
                None => forcing,
            };
            let (next, outflow) = self.step_with(&current, dt, forcing_k)?;
            outflow_total += dt * outflow;
            current = next;
            if (k + 1) % stride == 0 || k + 1 == steps {
                snapshots.push(current.clone());
            }
        }
        Ok(Run {
            snapshots,
            dt,
            steps,
            outflow_total,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::CrossSectionParams;
    use crate::solver::{InitialData, ModeSpec};

    fn setup(n_v: usize, n_x: usize, kind: SchemeKind, dt: f64) -> Solver {
        let tables = KernelTables::for_modes(CrossSectionParams::new(0.5).unwrap(), n_v).unwrap();
        let grid = SpatialGrid::new(n_x, 1.0).unwrap();
        Solver::new(&tables, n_v, &grid, StepScheme::new(kind, dt).unwrap()).unwrap()
    }

    fn smooth_datum(n_v: usize, n_x: usize, amp: f64) -> SpectralState {
        InitialData::Modes {
            modes: vec![
                ModeSpec {
                    n: 0,
                    j: 1,
                    re: 1.0,
                    im: 0.0,
                },
                ModeSpec {
                    n: 1,
                    j: 0,
                    re: 0.5,
                    im: 0.0,
                },
                ModeSpec {
                    n: 2,
                    j: 2,
                    re: 0.3,
                    im: 0.4,
                },
                ModeSpec {
                    n: 3,
                    j: 1,
                    re: -0.2,
                    im: 0.1,
                },
            ],
            amplitude: amp,
        }
        .build(n_v, n_x, 1.0)
        .unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = setup(8, 8, SchemeKind::StrangSplit, 0.01);
        let z = SpectralState::zeros(8, 8, 1.0);
        let out = s.step(&z, Forcing::Quadratic).unwrap();
        assert!(out.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)));
        assert!((out.time - 0.01).abs() < 1e-15);
    }

    #[test]
    fn kernel_mode_is_stationary_in_linear_runs() {
        let s = setup(8, 8, SchemeKind::StrangSplit, 0.05);
        let mut g = SpectralState::zeros(8, 8, 1.0);
        g.coeffs[[2, 0]] = Complex64::new(0.8, 0.0);
        let run = s.run(&g, 1.0, 1, Forcing::Off).unwrap();
        let last = run.snapshots.last().unwrap();
        assert!((&last.coeffs - &g.coeffs).iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn strang_agrees_with_rk4_to_second_order() {
        let n_v = 10;
        let n_x = 8;
        let g0 = smooth_datum(n_v, n_x, 0.1);
        let reference = setup(n_v, n_x, SchemeKind::Rk4Reference, 1e-3)
            .run(&g0, 0.4, 400, Forcing::Quadratic)
            .unwrap();
        let r = reference.snapshots.last().unwrap();
        let err = |dt: f64| {
            let run = setup(n_v, n_x, SchemeKind::StrangSplit, dt)
                .run(&g0, 0.4, 1000, Forcing::Quadratic)
                .unwrap();
            let d = &run.snapshots.last().unwrap().coeffs - &r.coeffs;
            d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
        };
        let (e1, e2) = (err(0.04), err(0.02));
        let slope = (e1 / e2).log2();
        assert!((slope - 2.0).abs() < 0.25, "{e1} {e2} {slope}");
    }

    #[test]
    fn reality_is_preserved() {
        let s = setup(8, 16, SchemeKind::StrangSplit, 0.02);
        let g0 = InitialData::Rough {
            a: 1.0,
            b: 1.0,
            amplitude: 0.05,
            seed: 4,
        }
        .build(8, 16, 1.0)
        .unwrap();
        let run = s.run(&g0, 0.5, 5, Forcing::Quadratic).unwrap();
        for snap in &run.snapshots {
            assert!(snap.reality_defect() < 1e-12);
        }
    }

    #[test]
    fn linear_energy_dissipates_monotonically() {
        let s = setup(10, 8, SchemeKind::StrangSplit, 0.05);
        let g0 = smooth_datum(10, 8, 1.0);
        let run = s.run(&g0, 1.0, 1, Forcing::Off).unwrap();
        for w in run.snapshots.windows(2) {
            assert!(w[1].norm() <= w[0].norm() * (1.0 + 1e-13));
        }
    }

    #[test]
    fn non_finite_state_is_reported() {
        let s = setup(4, 8, SchemeKind::StrangSplit, 0.1);
        let mut g = SpectralState::zeros(4, 8, 1.0);
        g.coeffs[[0, 0]] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(s.step(&g, Forcing::Off), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn step_count_divides_horizon() {
        let s = setup(4, 8, SchemeKind::StrangSplit, 0.3);
        let (n, dt) = s.step_count(1.0);
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
        assert_eq!(s.step_count(0.0).0, 0);
        let (n, _) = setup(4, 8, SchemeKind::StrangSplit, 0.1).step_count(1.0);
        assert_eq!(n, 10);
    }
}
