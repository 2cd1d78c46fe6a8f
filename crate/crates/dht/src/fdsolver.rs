//! Method-of-lines finite-difference solver on a bounded interval, used as
//! the independent PDE oracle.
//!
//! Space: second-order central Laplacian. Time: explicit classical
//! Runge-Kutta with the parabolic step `dt = cfl dx^2 / max(1, d)`. The
//! solver fails hard when the prey field drops below its floor; an oracle
//! must never clamp away a blow-up.

use crate::core_model::{reaction_rhs, FieldSample, ModelParams};
use crate::error::{Error, Result};
use crate::solutions::ExactSolution;
use crate::verify::GridSpec;

/// Boundary handling at both interval ends.
#[derive(Debug, Clone)]
pub enum BoundaryCondition {
    /// Boundary nodes re-sampled from an exact solution at every stage time.
    DirichletFromExact(ExactSolution),
    /// Zero-flux via symmetric ghost-node reflection (second order).
    NeumannZero,
}

/// Solver tuning knobs.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Parabolic step factor, `0 < cfl < 1`.
    pub cfl: f64,
    /// Hard failure threshold for the prey field.
    pub u_floor: f64,
    pub max_steps: usize,
    /// Test hook: integrate the pure diffusion part only.
    pub reaction_off: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.4,
            u_floor: 1e-12,
            max_steps: 50_000_000,
            reaction_off: false,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must be in (0, 1), got {}", self.cfl)));
        }
        if !(self.u_floor > 0.0) {
            return Err(Error::Config(format!(
                "u_floor must be > 0, got {}",
                self.u_floor
            )));
        }
        Ok(())
    }
}

/// Initial data: either sampled from a solution at the grid's start time or
/// given directly as node arrays.
#[derive(Debug, Clone)]
pub enum InitialData {
    FromExact(ExactSolution),
    Profile { u: Vec<f64>, v: Vec<f64> },
}

/// Snapshots of both fields at every grid time level.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub grid: GridSpec,
    /// Row per time level, `grid.nt` rows of `grid.nx` nodes.
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub scheme: String,
    /// Interior time step actually used.
    pub dt: f64,
    pub boundary: String,
}

struct Stepper<'a> {
    params: ModelParams,
    bc: &'a BoundaryCondition,
    cfg: SolverConfig,
    dx: f64,
    x: Vec<f64>,
}

impl Stepper<'_> {
    /// Time derivative of the full state at a stage; Dirichlet boundaries
    /// are overwritten in `state` with exact values at the stage time first.
    fn rhs(&self, t: f64, u: &mut [f64], v: &mut [f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = u.len();
        if let BoundaryCondition::DirichletFromExact(sol) = self.bc {
            let a = sol.evaluate(t, self.x[0])?;
            let b = sol.evaluate(t, self.x[n - 1])?;
            u[0] = a.u;
            v[0] = a.v;
            u[n - 1] = b.u;
            v[n - 1] = b.v;
        }
        let lap = |f: &[f64], i: usize| -> f64 {
            let (fm, fp) = match (i, self.bc) {
                (0, BoundaryCondition::NeumannZero) => (f[1], f[1]),
                (i, BoundaryCondition::NeumannZero) if i == n - 1 => (f[n - 2], f[n - 2]),
                _ => (f[i - 1], f[i + 1]),
            };
            (fp - 2.0 * f[i] + fm) / (self.dx * self.dx)
        };
        let interior = |i: usize| -> bool {
            matches!(self.bc, BoundaryCondition::NeumannZero) || (i > 0 && i < n - 1)
        };
        let mut du = vec![0.0; n];
        let mut dv = vec![0.0; n];
        for i in 0..n {
            if !interior(i) {
                continue;
            }
            let (fu, fv) = if self.cfg.reaction_off {
                (0.0, 0.0)
            } else {
                reaction_rhs(&self.params, u[i], v[i]).map_err(|e| Error::SolverFailure {
                    t,
                    x: self.x[i],
                    reason: e.to_string(),
                })?
            };
            du[i] = lap(u, i) + fu;
            dv[i] = self.params.d * lap(v, i) + fv;
        }
        Ok((du, dv))
    }

    /// One classical Runge-Kutta step of size `dt` from time `t`.
    fn rk4_step(&self, t: f64, dt: f64, u: &mut Vec<f64>, v: &mut Vec<f64>) -> Result<()> {
        let n = u.len();
        let stage = |base_u: &[f64],
                     base_v: &[f64],
                     ku: &[f64],
                     kv: &[f64],
                     frac: f64|
         -> (Vec<f64>, Vec<f64>) {
            let su = (0..n).map(|i| base_u[i] + frac * dt * ku[i]).collect();
            let sv = (0..n).map(|i| base_v[i] + frac * dt * kv[i]).collect();
            (su, sv)
        };
        let (k1u, k1v) = {
            let (mut su, mut sv) = (u.clone(), v.clone());
            self.rhs(t, &mut su, &mut sv)?
        };
        let (mut s2u, mut s2v) = stage(u, v, &k1u, &k1v, 0.5);
        let (k2u, k2v) = self.rhs(t + 0.5 * dt, &mut s2u, &mut s2v)?;
        let (mut s3u, mut s3v) = stage(u, v, &k2u, &k2v, 0.5);
        let (k3u, k3v) = self.rhs(t + 0.5 * dt, &mut s3u, &mut s3v)?;
        let (mut s4u, mut s4v) = stage(u, v, &k3u, &k3v, 1.0);
        let (k4u, k4v) = self.rhs(t + dt, &mut s4u, &mut s4v)?;
        for i in 0..n {
            u[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if let BoundaryCondition::DirichletFromExact(sol) = self.bc {
            let a = sol.evaluate(t + dt, self.x[0])?;
            let b = sol.evaluate(t + dt, self.x[n - 1])?;
            u[0] = a.u;
            v[0] = a.v;
            u[n - 1] = b.u;
            v[n - 1] = b.v;
        }
        Ok(())
    }
}

/// Runs the method-of-lines solver over the grid's time window, recording a
/// snapshot at every grid time level.
pub fn simulate(
    params: &ModelParams,
    init: &InitialData,
    bc: &BoundaryCondition,
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<FieldGrid> {
    cfg.validate()?;
    let x = grid.x_nodes();
    let n = x.len();
    let dx = (grid.x1 - grid.x0) / (grid.nx - 1) as f64;
    let (mut u, mut v) = match init {
        InitialData::FromExact(sol) => {
            let mut u = Vec::with_capacity(n);
            let mut v = Vec::with_capacity(n);
            for &xi in &x {
                let s = sol.evaluate(grid.t0, xi)?;
                u.push(s.u);
                v.push(s.v);
            }
            (u, v)
        }
        InitialData::Profile { u, v } => {
            if u.len() != n || v.len() != n {
                return Err(Error::Config(format!(
                    "initial profile length {} does not match nx = {n}",
                    u.len()
                )));
            }
            (u.clone(), v.clone())
        }
    };
    let dt = cfg.cfl * dx * dx / params.d.max(1.0);
    let stepper = Stepper {
        params: *params,
        bc,
        cfg: *cfg,
        dx,
        x: x.clone(),
    };
    let floor_check = |t: f64, u: &[f64]| -> Result<()> {
        for (i, &ui) in u.iter().enumerate() {
            if ui < cfg.u_floor {
                return Err(Error::SolverFailure {
                    t,
                    x: x[i],
                    reason: format!("u = {ui:e} fell below the floor {:e}", cfg.u_floor),
                });
            }
        }
        Ok(())
    };
    floor_check(grid.t0, &u)?;
    let mut rows_u = vec![u.clone()];
    let mut rows_v = vec![v.clone()];
    let mut t = grid.t0;
    let mut steps = 0usize;
    for target in grid.t_nodes().into_iter().skip(1) {
        while t < target - 1e-12 * target.abs().max(1.0) {
            let step = dt.min(target - t);
            if steps >= cfg.max_steps {
                return Err(Error::SolverFailure {
                    t,
                    x: grid.x0,
                    reason: format!("step limit {} exhausted", cfg.max_steps),
                });
            }
            stepper.rk4_step(t, step, &mut u, &mut v)?;
            t += step;
            steps += 1;
            floor_check(t, &u)?;
            if u.iter().chain(v.iter()).any(|w| !w.is_finite()) {
                return Err(Error::SolverFailure {
                    t,
                    x: grid.x0,
                    reason: "non-finite field value".into(),
                });
            }
        }
        t = target;
        rows_u.push(u.clone());
        rows_v.push(v.clone());
    }
    Ok(FieldGrid {
        grid: *grid,
        u: rows_u,
        v: rows_v,
        scheme: "central-2 space, explicit RK4 time".into(),
        dt,
        boundary: match bc {
            BoundaryCondition::DirichletFromExact(_) => "Dirichlet from exact".into(),
            BoundaryCondition::NeumannZero => "zero Neumann (ghost reflection)".into(),
        },
    })
}

/// Discrete error norms of one time level.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LevelError {
    pub t: f64,
    pub linf_u: f64,
    pub l2_u: f64,
    pub linf_v: f64,
    pub l2_v: f64,
}

/// Difference between a numeric run and an exact solution, per time level.
pub fn compare(numeric: &FieldGrid, exact: &ExactSolution) -> Result<Vec<LevelError>> {
    let x = numeric.grid.x_nodes();
    let mut out = Vec::with_capacity(numeric.u.len());
    for (row, t) in numeric.grid.t_nodes().into_iter().enumerate() {
        let mut linf_u = 0.0_f64;
        let mut linf_v = 0.0_f64;
        let mut s_u = 0.0_f64;
        let mut s_v = 0.0_f64;
        for (i, &xi) in x.iter().enumerate() {
            let FieldSample { u, v } = exact.evaluate(t, xi)?;
            let eu = (numeric.u[row][i] - u).abs();
            let ev = (numeric.v[row][i] - v).abs();
            linf_u = linf_u.max(eu);
            linf_v = linf_v.max(ev);
            s_u += eu * eu;
            s_v += ev * ev;
        }
        let n = x.len() as f64;
        out.push(LevelError {
            t,
            linf_u,
            l2_u: (s_u / n).sqrt(),
            linf_v,
            l2_v: (s_v / n).sqrt(),
        });
    }
    Ok(out)
}

/// Outcome of one refinement-ratio fit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum ObservedOrder {
    Order(f64),
    /// Both errors sit at the machine floor; no order can be fitted.
    FloorReached,
}

/// Nested-refinement convergence study against an exact solution.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceStudy {
    /// Final-time worst-component Linf error per level, coarsest first.
    pub errors: Vec<f64>,
    /// log2 of successive error ratios.
    pub orders: Vec<ObservedOrder>,
}

/// Error floor below which ratios measure roundoff, not truncation.
const ORDER_FLOOR: f64 = 1e-12;

pub fn convergence_study(
    params: &ModelParams,
    sol: &ExactSolution,
    base: &GridSpec,
    levels: usize,
    bc: &BoundaryCondition,
    cfg: &SolverConfig,
) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(Error::Config(format!("need at least 2 levels, got {levels}")));
    }
    let mut errors = Vec::with_capacity(levels);
    for k in 0..levels {
        let nx = (base.nx - 1) * (1 << k) + 1;
        let grid = GridSpec::new(base.t0, base.t1, base.nt, base.x0, base.x1, nx)?;
        let run = simulate(
            params,
            &InitialData::FromExact(sol.clone()),
            bc,
            &grid,
            cfg,
        )?;
        let levels_err = compare(&run, sol)?;
        let last = levels_err.last().expect("at least one time level");
        errors.push(last.linf_u.max(last.linf_v));
    }
    let orders = errors
        .windows(2)
        .map(|w| {
            if w[0] < ORDER_FLOOR && w[1] < ORDER_FLOOR {
                ObservedOrder::FloorReached
            } else {
                ObservedOrder::Order((w[0] / w[1]).log2())
            }
        })
        .collect();
    Ok(ConvergenceStudy { errors, orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::ModelParams;
    use crate::solutions::{Domain, SolutionSpec};

    fn grid(t0: f64, t1: f64, nt: usize, x0: f64, x1: f64, nx: usize) -> GridSpec {
        GridSpec::new(t0, t1, nt, x0, x1, nx).unwrap()
    }

    #[test]
    fn equilibrium_is_preserved() {
        // u = v = A/(R-1) = 1 for A = 1, R = 2 is a steady state.
        let params = ModelParams::new(1.0, 2.0, 3.0, 1.0).unwrap();
        let g = grid(0.0, 0.5, 6, -2.0, 2.0, 21);
        let init = InitialData::Profile {
            u: vec![1.0; 21],
            v: vec![1.0; 21],
        };
        let run = simulate(
            &params,
            &init,
            &BoundaryCondition::NeumannZero,
            &g,
            &SolverConfig::default(),
        )
        .unwrap();
        for row in run.u.iter().chain(run.v.iter()) {
            for &w in row {
                assert!((w - 1.0).abs() < 1e-12, "drifted to {w}");
            }
        }
    }

    #[test]
    fn uniform_exponential_growth_tracks_the_ode() {
        let params = ModelParams::new(0.0, 1.5, 2.0, 1.0).unwrap();
        let t0 = 0.0;
        let g = grid(t0, 1.0, 3, -1.0, 1.0, 11);
        let init = InitialData::Profile {
            u: vec![1.0; 11],
            v: vec![0.0; 11],
        };
        let run = simulate(
            &params,
            &init,
            &BoundaryCondition::NeumannZero,
            &g,
            &SolverConfig::default(),
        )
        .unwrap();
        let end = run.u.last().unwrap();
        for &w in end {
            assert!((w - 1.0_f64.exp()).abs() < 1e-7, "u(1) = {w}");
        }
    }

    #[test]
    fn zero_reaction_conserves_mass_under_zero_flux() {
        let params = ModelParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        let g = grid(0.0, 0.2, 3, -3.0, 3.0, 31);
        let x = g.x_nodes();
        let u0: Vec<f64> = x.iter().map(|&xi: &f64| (-xi * xi).exp() + 0.5).collect();
        let v0: Vec<f64> = x.iter().map(|&xi: &f64| (-(xi - 0.5).powi(2)).exp()).collect();
        let mass = |row: &[f64]| -> f64 {
            // Trapezoid weights: interior 1, edges 1/2.
            let inner: f64 = row[1..row.len() - 1].iter().sum();
            inner + 0.5 * (row[0] + row[row.len() - 1])
        };
        let cfg = SolverConfig {
            reaction_off: true,
            ..SolverConfig::default()
        };
        let run = simulate(
            &params,
            &InitialData::Profile {
                u: u0.clone(),
                v: v0.clone(),
            },
            &BoundaryCondition::NeumannZero,
            &g,
            &cfg,
        )
        .unwrap();
        let drift_u = (mass(run.u.last().unwrap()) - mass(&u0)).abs() / mass(&u0);
        let drift_v = (mass(run.v.last().unwrap()) - mass(&v0)).abs() / mass(&v0);
        assert!(drift_u < 1e-10, "u mass drift {drift_u}");
        assert!(drift_v < 1e-10, "v mass drift {drift_v}");
    }

    #[test]
    fn prey_floor_failure_is_hard() {
        let params = ModelParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        let g = grid(0.0, 0.5, 3, -1.0, 1.0, 11);
        let init = InitialData::Profile {
            u: vec![0.0; 11],
            v: vec![0.0; 11],
        };
        let err = simulate(
            &params,
            &init,
            &BoundaryCondition::NeumannZero,
            &g,
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("floor"), "{err}");
    }

    #[test]
    fn compare_is_zero_against_the_sampled_field() {
        let params = ModelParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        let sol = ExactSolution::from_parts(
            SolutionSpec::Derived {
                params,
                label: "constant field".into(),
            },
            params,
            Domain::all(),
            vec!["constant field".into()],
            |_, _| FieldSample { u: 2.0, v: 1.0 },
        );
        let g = grid(0.0, 0.1, 2, -1.0, 1.0, 5);
        let numeric = FieldGrid {
            grid: g,
            u: vec![vec![2.0; 5]; 2],
            v: vec![vec![1.0; 5]; 2],
            scheme: String::new(),
            dt: 0.0,
            boundary: String::new(),
        };
        let rep = compare(&numeric, &sol).unwrap();
        assert!(rep.iter().all(|l| l.linf_u == 0.0 && l.linf_v == 0.0));
    }
}
