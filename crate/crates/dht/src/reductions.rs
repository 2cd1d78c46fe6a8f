//! ODE reductions of the system, their closed-form log-derivative solutions,
//! and adaptive numerical integration used as an independent oracle.
//!
//! Each reduction case is the first-order rewrite of one reduced system; the
//! `chi` branches are the closed forms of the log-derivative
//! `chi = phi'/phi`, lifted back to `(u, v)` through the matching ansatz.

use crate::core_model::{FieldSample, ModelParams, DENOMINATOR_FLOOR};
use crate::error::{Error, Result};
use crate::ode::{integrate as ode_integrate, OdeOptions, Trajectory};
use crate::solutions::{Domain, ExactSolution, SolutionSpec};
use std::fmt;
use std::sync::Arc;

/// `f(t)` with derivative, for the first conditional reduction.
pub type FOfT = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
/// `(g, g', g'', h, h')` at a time, for the second conditional reduction.
pub type GhOfT = Arc<dyn Fn(f64) -> (f64, f64, f64, f64, f64) + Send + Sync>;

/// One reduced ODE system in first-order form.
#[derive(Clone)]
pub enum ReductionCase {
    /// Travelling profile in `w = x - alpha t`:
    /// `phi'' + alpha phi' + (1-beta) phi - R psi = 0`,
    /// `d psi'' + alpha psi' + (S-beta) psi - S psi^2/phi = 0`.
    /// State `[phi, phi', psi, psi']`.
    TravellingSystem { alpha: f64, beta: f64 },
    /// The same reduction collapsed to one fourth-order scalar ODE via
    /// `psi = (phi'' + alpha phi' + (1-beta) phi)/R`.
    /// State `[phi, phi', phi'', phi''']`.
    TravellingScalar { alpha: f64, beta: f64 },
    /// Plane exponential ansatz `(u, v) = (phi, psi)(t) e^{beta x}`:
    /// `phi' = (1+beta^2) phi - R psi`,
    /// `psi' = (S + d beta^2) psi - S psi^2/phi`. State `[phi, psi]`.
    PlaneExponential { beta: f64 },
    /// Quadratic travelling argument `y = t^2 - alpha x`:
    /// `a^4 phi'' + (a^2 - y) phi - R a^2 psi = 0`,
    /// `a^4 psi'' + (S a^2 - y) psi - S a^2 psi^2/phi = 0`.
    /// State `[phi, phi', psi, psi']`.
    QuadraticTravelling { alpha: f64 },
    /// Gaussian kernel ansatz `(u, v) = (phi, psi)(t) e^{-x^2/(4t)}` (d = 1):
    /// `phi' = (1 - 1/(2t)) phi - R psi`,
    /// `psi' = (S - 1/(2t)) psi - S psi^2/phi`. State `[phi, psi]`.
    GaussianKernel,
    /// First conditional reduction in `t`, driven by a supplied `f(t)`:
    /// `phi' = (1+f^2) phi - S psi`,
    /// `psi' = (S + d f^2) psi - S psi^2/phi - (2 d f f'/S) phi`.
    /// State `[phi, psi]`.
    ConditionalI { f: FOfT },
    /// Second conditional reduction in `t`, driven by a supplied `(g, h)`:
    /// `phi' = (1 + h^2/g^2 - g'/(2g)) phi - S psi`,
    /// `psi' = (S + h^2/g^2 - g'/(2g)) psi - S psi^2/phi
    ///         + (g g'' - 4 h h')/(2 S g^2) phi`.
    /// State `[phi, psi]`.
    ConditionalII { gh: GhOfT },
}

impl fmt::Debug for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionCase::TravellingSystem { alpha, beta } => {
                write!(f, "TravellingSystem(alpha = {alpha}, beta = {beta})")
            }
            ReductionCase::TravellingScalar { alpha, beta } => {
                write!(f, "TravellingScalar(alpha = {alpha}, beta = {beta})")
            }
            ReductionCase::PlaneExponential { beta } => {
                write!(f, "PlaneExponential(beta = {beta})")
            }
            ReductionCase::QuadraticTravelling { alpha } => {
                write!(f, "QuadraticTravelling(alpha = {alpha})")
            }
            ReductionCase::GaussianKernel => write!(f, "GaussianKernel"),
            ReductionCase::ConditionalI { .. } => write!(f, "ConditionalI(f supplied)"),
            ReductionCase::ConditionalII { .. } => write!(f, "ConditionalII(g, h supplied)"),
        }
    }
}

impl ReductionCase {
    pub fn state_dim(&self) -> usize {
        match self {
            ReductionCase::TravellingSystem { .. }
            | ReductionCase::TravellingScalar { .. }
            | ReductionCase::QuadraticTravelling { .. } => 4,
            _ => 2,
        }
    }
}

fn guard_phi(phi: f64) -> Result<()> {
    if phi.abs() < DENOMINATOR_FLOOR {
        return Err(Error::SingularDenominator {
            what: "phi",
            value: phi.abs(),
            floor: DENOMINATOR_FLOOR,
        });
    }
    Ok(())
}

/// Right-hand side of a reduction case at one abscissa.
pub fn reduced_rhs(
    case: &ReductionCase,
    params: &ModelParams,
    w: f64,
    state: &[f64],
) -> Result<Vec<f64>> {
    if state.len() != case.state_dim() {
        return Err(Error::Config(format!(
            "state dimension {} does not match case {:?}",
            state.len(),
            case
        )));
    }
    let (r, s, d) = (params.r, params.s, params.d);
    match case {
        ReductionCase::TravellingSystem { alpha, beta } => {
            let [phi, phip, psi, psip] = [state[0], state[1], state[2], state[3]];
            guard_phi(phi)?;
            Ok(vec![
                phip,
                -alpha * phip - (1.0 - beta) * phi + r * psi,
                psip,
                (-alpha * psip - (s - beta) * psi + s * psi * psi / phi) / d,
            ])
        }
        ReductionCase::TravellingScalar { alpha, beta } => {
            let [p0, p1, p2, p3] = [state[0], state[1], state[2], state[3]];
            guard_phi(p0)?;
            let c2 = 2.0 * s * (beta - 1.0) + r * (alpha * alpha + d + s - beta - d * beta);
            let c1 = alpha * (2.0 * s * (beta - 1.0) + r * (1.0 + s - 2.0 * beta));
            let c0 = (1.0 - beta) * (s * (beta - 1.0) + r * (s - beta));
            let p4 = (s * p2 * p2 / p0 + 2.0 * alpha * s * p1 * p2 / p0
                + alpha * alpha * s * p1 * p1 / p0
                - c2 * p2
                - c1 * p1
                - c0 * p0
                - alpha * (1.0 + d) * r * p3)
                / (d * r);
            Ok(vec![p1, p2, p3, p4])
        }
        ReductionCase::PlaneExponential { beta } => {
            let [phi, psi] = [state[0], state[1]];
            guard_phi(phi)?;
            let b2 = beta * beta;
            Ok(vec![
                (1.0 + b2) * phi - r * psi,
                (s + d * b2) * psi - s * psi * psi / phi,
            ])
        }
        ReductionCase::QuadraticTravelling { alpha } => {
            let [phi, phip, psi, psip] = [state[0], state[1], state[2], state[3]];
            guard_phi(phi)?;
            let a2 = alpha * alpha;
            let a4 = a2 * a2;
            Ok(vec![
                phip,
                (-(a2 - w) * phi + r * a2 * psi) / a4,
                psip,
                (-(s * a2 - w) * psi + s * a2 * psi * psi / phi) / a4,
            ])
        }
        ReductionCase::GaussianKernel => {
            let [phi, psi] = [state[0], state[1]];
            guard_phi(phi)?;
            if w.abs() < DENOMINATOR_FLOOR {
                return Err(Error::SingularDenominator {
                    what: "t",
                    value: w.abs(),
                    floor: DENOMINATOR_FLOOR,
                });
            }
            Ok(vec![
                (1.0 - 0.5 / w) * phi - r * psi,
                (s - 0.5 / w) * psi - s * psi * psi / phi,
            ])
        }
        ReductionCase::ConditionalI { f } => {
            let [phi, psi] = [state[0], state[1]];
            guard_phi(phi)?;
            let (fv, fpv) = f(w);
            Ok(vec![
                (1.0 + fv * fv) * phi - s * psi,
                (s + d * fv * fv) * psi - s * psi * psi / phi - 2.0 * d * fv * fpv / s * phi,
            ])
        }
        ReductionCase::ConditionalII { gh } => {
            let [phi, psi] = [state[0], state[1]];
            guard_phi(phi)?;
            let (g, gp, gpp, hh, hhp) = gh(w);
            if g.abs() < DENOMINATOR_FLOOR {
                return Err(Error::SingularDenominator {
                    what: "g",
                    value: g.abs(),
                    floor: DENOMINATOR_FLOOR,
                });
            }
            let q = hh * hh / (g * g) - gp / (2.0 * g);
            Ok(vec![
                (1.0 + q) * phi - s * psi,
                (s + q) * psi - s * psi * psi / phi
                    + (g * gpp - 4.0 * hh * hhp) / (2.0 * s * g * g) * phi,
            ])
        }
    }
}

/// Integrated reduction trajectory with dense output.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub traj: Trajectory,
    /// Relative tolerance the run was driven with.
    pub reltol: f64,
}

impl OdeTrajectory {
    pub fn sample(&self, w: f64) -> Result<Vec<f64>> {
        self.traj.sample(w)
    }

    pub fn final_state(&self) -> &[f64] {
        self.traj.final_state()
    }
}

/// Interpolation between accepted nodes is one order below the integrator,
/// so internal solves run well under the tolerances they back.
fn tight_opts() -> OdeOptions {
    OdeOptions {
        reltol: 1e-12,
        abstol: 1e-14,
        ..OdeOptions::default()
    }
}

/// Adaptive integration of a reduction case over a span.
pub fn integrate(
    case: &ReductionCase,
    params: &ModelParams,
    y0: &[f64],
    span: (f64, f64),
    reltol: f64,
) -> Result<OdeTrajectory> {
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state".into()));
    }
    if span.0 == span.1 {
        return Err(Error::Config("degenerate integration span".into()));
    }
    let opts = OdeOptions {
        reltol,
        ..OdeOptions::default()
    };
    let case = case.clone();
    let params = *params;
    let traj = ode_integrate(
        move |w, y, dy| {
            let rhs = reduced_rhs(&case, &params, w, y)?;
            dy.copy_from_slice(&rhs);
            Ok(())
        },
        span.0,
        y0,
        span.1,
        &opts,
    )?;
    Ok(OdeTrajectory { traj, reltol })
}

/// Closed-form branches of the log-derivative `chi = phi'/phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChiBranch {
    /// Plane-exponential reduction, `R != S`, `gamma != 0`:
    /// `chi = 1 + beta^2 - gamma R / ((R-S)(1 + C1 e^{gamma t}))`.
    General { beta: f64, c1: f64 },
    /// Plane-exponential reduction, `R = S`, `gamma != 0`:
    /// `chi = 1 + beta^2 + C1 e^{-gamma t}`.
    EqualRates { beta: f64, c1: f64 },
    /// Plane-exponential reduction at `gamma = 0`:
    /// `chi = 1 + beta^2 + R/(C1 + (R - S) t)`.
    DegenerateGamma { beta: f64, c1: f64 },
    /// Gaussian-kernel reduction, `R != S`:
    /// `chi = 1 - 1/(2t) + R(S-1) / ((R-S)(1 + C e^{(1-S)t}))`.
    GaussianGeneral { c: f64 },
    /// Gaussian-kernel reduction, `R = S`:
    /// `chi = 1 - 1/(2t) + C e^{(S-1)t}`.
    GaussianEqualRates { c: f64 },
}

fn gamma_of(params: &ModelParams, beta: f64) -> f64 {
    1.0 - params.s + (1.0 - params.d) * beta * beta
}

fn check_branch(branch: &ChiBranch, params: &ModelParams) -> Result<()> {
    let fail = |msg: String| Err(Error::Constraint(msg));
    match *branch {
        ChiBranch::General { beta, .. } => {
            if params.r == params.s {
                return fail("chi general branch requires R != S".into());
            }
            if gamma_of(params, beta).abs() < 1e-12 {
                return fail("chi general branch requires gamma != 0".into());
            }
        }
        ChiBranch::EqualRates { beta, .. } => {
            if params.r != params.s {
                return fail("chi equal-rates branch requires R = S".into());
            }
            if gamma_of(params, beta).abs() < 1e-12 {
                return fail("chi equal-rates branch requires gamma != 0".into());
            }
        }
        ChiBranch::DegenerateGamma { beta, c1 } => {
            if gamma_of(params, beta).abs() > 1e-12 {
                return fail(format!(
                    "chi degenerate branch requires gamma = 0, got {}",
                    gamma_of(params, beta)
                ));
            }
            if c1 == 0.0 {
                return fail("chi degenerate branch requires C1 != 0".into());
            }
        }
        ChiBranch::GaussianGeneral { .. } => {
            if params.d != 1.0 {
                return fail("Gaussian-kernel branches require d = 1".into());
            }
            if params.r == params.s {
                return fail("chi Gaussian general branch requires R != S".into());
            }
        }
        ChiBranch::GaussianEqualRates { .. } => {
            if params.d != 1.0 {
                return fail("Gaussian-kernel branches require d = 1".into());
            }
            if params.r != params.s {
                return fail("chi Gaussian equal-rates branch requires R = S".into());
            }
        }
    }
    Ok(())
}

/// Evaluates a closed-form `chi` branch at a time.
pub fn chi_closed_form(branch: &ChiBranch, params: &ModelParams, t: f64) -> Result<f64> {
    check_branch(branch, params)?;
    let (r, s) = (params.r, params.s);
    let pole = |den: f64| -> Result<()> {
        if den.abs() < DENOMINATOR_FLOOR {
            Err(Error::Pole { t })
        } else {
            Ok(())
        }
    };
    match *branch {
        ChiBranch::General { beta, c1 } => {
            let g = gamma_of(params, beta);
            let den = (r - s) * (1.0 + c1 * (g * t).exp());
            pole(den)?;
            Ok(1.0 + beta * beta - g * r / den)
        }
        ChiBranch::EqualRates { beta, c1 } => {
            let g = gamma_of(params, beta);
            Ok(1.0 + beta * beta + c1 * (-g * t).exp())
        }
        ChiBranch::DegenerateGamma { beta, c1 } => {
            let den = c1 + (r - s) * t;
            pole(den)?;
            Ok(1.0 + beta * beta + r / den)
        }
        ChiBranch::GaussianGeneral { c } => {
            pole(t)?;
            let den = 1.0 + c * ((1.0 - s) * t).exp();
            pole(den)?;
            Ok(1.0 - 0.5 / t + r * (s - 1.0) / ((r - s) * den))
        }
        ChiBranch::GaussianEqualRates { c } => {
            pole(t)?;
            Ok(1.0 - 0.5 / t + c * ((s - 1.0) * t).exp())
        }
    }
}

/// The exact antiderivative of `chi`, normalized to 0 at the branch's base
/// point (t = 0 for the plane-exponential branches, t = 1 for the
/// Gaussian-kernel branches).
fn chi_integral(branch: &ChiBranch, params: &ModelParams, t: f64) -> f64 {
    let (r, s) = (params.r, params.s);
    match *branch {
        ChiBranch::General { beta, c1 } => {
            let g = gamma_of(params, beta);
            (1.0 + beta * beta) * t
                - r / (r - s) * (g * t - ((1.0 + c1 * (g * t).exp()) / (1.0 + c1)).ln())
        }
        ChiBranch::EqualRates { beta, c1 } => {
            let g = gamma_of(params, beta);
            (1.0 + beta * beta) * t + c1 / g * (1.0 - (-g * t).exp())
        }
        ChiBranch::DegenerateGamma { beta, c1 } => {
            let m = r - s;
            if m.abs() < 1e-12 {
                (1.0 + beta * beta + r / c1) * t
            } else {
                (1.0 + beta * beta) * t + r / m * ((c1 + m * t) / c1).ln()
            }
        }
        ChiBranch::GaussianGeneral { c } => {
            let g = 1.0 - s;
            let tail = if c == 0.0 {
                t - 1.0
            } else {
                (t - 1.0) - ((1.0 + c * (g * t).exp()) / (1.0 + c * g.exp())).ln() / g
            };
            (t - 1.0) - 0.5 * t.ln() + r * (s - 1.0) / (r - s) * tail
        }
        ChiBranch::GaussianEqualRates { c } => {
            (t - 1.0) - 0.5 * t.ln() + c / (s - 1.0) * (((s - 1.0) * t).exp() - (s - 1.0).exp())
        }
    }
}

/// Lifts a `chi` branch to an exact `(u, v)` pair through its ansatz:
/// `phi = phi0 exp(int chi)`, `psi` from the first reduced equation, then
/// `(u, v) = (phi, psi) e^{beta x}` or `(phi, psi) e^{-x^2/(4t)}`.
pub fn chi_to_solution(
    branch: &ChiBranch,
    params: &ModelParams,
    phi0: f64,
) -> Result<ExactSolution> {
    check_branch(branch, params)?;
    if !(phi0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "phi0",
            reason: format!("must be > 0, got {phi0}"),
        });
    }
    let branch = *branch;
    let p = *params;
    let label = format!("chi lift {branch:?}");
    let spec = SolutionSpec::Derived {
        params: p,
        label: label.clone(),
    };
    match branch {
        ChiBranch::General { beta, c1 }
        | ChiBranch::EqualRates { beta, c1 }
        | ChiBranch::DegenerateGamma { beta, c1 } => {
            let eval = move |t: f64, x: f64| {
                let chi = chi_closed_form(&branch, &p, t).expect("pole outside domain");
                let phi = phi0 * chi_integral(&branch, &p, t).exp();
                let psi = (1.0 + beta * beta - chi) * phi / p.r;
                let e = (beta * x).exp();
                FieldSample {
                    u: phi * e,
                    v: psi * e,
                }
            };
            // Keep the pole of the chi denominator out of the domain.
            let domain = match branch {
                ChiBranch::General { beta, .. } => {
                    let g = gamma_of(&p, beta);
                    Domain::new(
                        format!("1 + C1 e^(gamma t) > 0 with C1 = {c1}"),
                        move |t, _| 1.0 + c1 * (g * t).exp() > 0.0,
                    )
                }
                ChiBranch::DegenerateGamma { .. } => {
                    let m = p.r - p.s;
                    if m.abs() < 1e-12 {
                        Domain::all()
                    } else {
                        Domain::new(
                            format!("(C1 + (R-S) t)/C1 > 0 with C1 = {c1}"),
                            move |t, _| (c1 + m * t) / c1 > 0.0,
                        )
                    }
                }
                _ => Domain::all(),
            };
            Ok(ExactSolution::from_parts(spec, p, domain, vec![label], eval))
        }
        ChiBranch::GaussianGeneral { c } | ChiBranch::GaussianEqualRates { c } => {
            let eval = move |t: f64, x: f64| {
                let chi = chi_closed_form(&branch, &p, t).expect("pole outside domain");
                let phi = phi0 * chi_integral(&branch, &p, t).exp();
                let psi = ((1.0 - 0.5 / t) - chi) * phi / p.r;
                let e = (-x * x / (4.0 * t)).exp();
                FieldSample {
                    u: phi * e,
                    v: psi * e,
                }
            };
            let s = p.s;
            let gaussian_general = matches!(branch, ChiBranch::GaussianGeneral { .. });
            let domain = Domain::new(
                format!("t > 0 and 1 + C e^((1-S)t) > 0 with C = {c}"),
                move |t, _| {
                    t > 0.0
                        && (!gaussian_general || 1.0 + c * ((1.0 - s) * t).exp() > 0.0)
                },
            );
            Ok(ExactSolution::from_parts(spec, p, domain, vec![label], eval))
        }
    }
}

/// Integrates the first integral `f' = (d-1)/3 f^3 + (S-1) f + C1` of the
/// conditional-symmetry coefficient equation.
pub fn f_solve(
    params: &ModelParams,
    c1: f64,
    f0: f64,
    t0: f64,
    span: (f64, f64),
) -> Result<OdeTrajectory> {
    if params.d == 1.0 {
        return Err(Error::Constraint(
            "the conditional coefficient equation requires d != 1".into(),
        ));
    }
    if t0 != span.0 {
        return Err(Error::Config(format!(
            "initial time {t0} must equal the span start {}",
            span.0
        )));
    }
    let (d, s) = (params.d, params.s);
    let opts = tight_opts();
    let traj = ode_integrate(
        move |_, y, dy| {
            dy[0] = (d - 1.0) / 3.0 * y[0].powi(3) + (s - 1.0) * y[0] + c1;
            Ok(())
        },
        t0,
        &[f0],
        span.1,
        &opts,
    )?;
    Ok(OdeTrajectory {
        traj,
        reltol: opts.reltol,
    })
}

/// Full conditional-symmetry pipeline: integrates `f`, then the linear
/// log-derivative equation `chi' + K1 chi + K0 = 0` together with
/// `ln phi' = chi`, recovers `psi`, and lifts through the ansatz
/// `u = phi e^{x f}`, `v = (psi - x f' phi/S) e^{x f}`.
///
/// `chi0` fixes the free integration constant of the chi equation at `t0`
/// (the closed-form family corresponds to one particular choice).
#[allow(clippy::too_many_arguments)]
pub fn case_i_pipeline(
    params: &ModelParams,
    c1: f64,
    f0: f64,
    t0: f64,
    span: (f64, f64),
    phi0: f64,
    chi0: f64,
) -> Result<ExactSolution> {
    if params.d == 1.0 {
        return Err(Error::Constraint(
            "the conditional pipeline requires d != 1".into(),
        ));
    }
    if !(phi0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "phi0",
            reason: format!("must be > 0, got {phi0}"),
        });
    }
    let (d, s) = (params.d, params.s);
    let fprime = move |f: f64| (d - 1.0) / 3.0 * f * f * f + (s - 1.0) * f + c1;
    // Joint state [f, chi, ln phi].
    let opts = tight_opts();
    let traj = ode_integrate(
        move |_, y, dy| {
            let f = y[0];
            let fp = fprime(f);
            let k1 = 1.0 - s + (1.0 - d) * f * f;
            let k0 = s - 1.0
                + (d + s - 2.0) * f * f
                + (d - 1.0) * f.powi(4)
                - 2.0 * (d + 1.0) * f * fp;
            dy[0] = fp;
            dy[1] = -k1 * y[1] - k0;
            dy[2] = y[1];
            Ok(())
        },
        t0,
        &[f0, chi0, phi0.ln()],
        span.1,
        &opts,
    )?;
    let traj = Arc::new(traj);
    let p = *params;
    let label = format!(
        "conditional pipeline (C1 = {c1}, f0 = {f0}, chi0 = {chi0}) on [{}, {}]",
        span.0, span.1
    );
    let spec = SolutionSpec::Derived {
        params: p,
        label: label.clone(),
    };
    let t_lo = span.0.min(span.1);
    let t_hi = span.0.max(span.1);
    let eval_traj = traj.clone();
    let eval = move |t: f64, x: f64| {
        let y = eval_traj.sample(t).expect("inside the integrated span");
        let f = y[0];
        let chi = y[1];
        let phi = y[2].exp();
        let psi = (1.0 + f * f - chi) * phi / s;
        let e = (x * f).exp();
        FieldSample {
            u: phi * e,
            v: (psi - x * fprime(f) * phi / s) * e,
        }
    };
    Ok(ExactSolution::from_parts(
        spec,
        p,
        Domain::new(format!("t in [{t_lo}, {t_hi}]"), move |t, _| {
            (t_lo..=t_hi).contains(&t)
        }),
        vec![label],
        eval,
    ))
}

/// Integrates the coefficient system `g g'' = C e^{(S-1)t}`,
/// `h g'' + g (h'' + (1-S) h') = 0`, state `[g, g', h, h']`.
#[allow(clippy::too_many_arguments)]
pub fn gh_solve(
    s: f64,
    c: f64,
    g0: f64,
    g0p: f64,
    h0: f64,
    h0p: f64,
    span: (f64, f64),
) -> Result<OdeTrajectory> {
    let opts = tight_opts();
    let traj = ode_integrate(
        move |t, y, dy| {
            let g = y[0];
            if g.abs() < DENOMINATOR_FLOOR {
                return Err(Error::SingularDenominator {
                    what: "g",
                    value: g.abs(),
                    floor: DENOMINATOR_FLOOR,
                });
            }
            let gpp = c * ((s - 1.0) * t).exp() / g;
            dy[0] = y[1];
            dy[1] = gpp;
            dy[2] = y[3];
            dy[3] = (s - 1.0) * y[3] - y[2] * gpp / g;
            Ok(())
        },
        span.0,
        &[g0, g0p, h0, h0p],
        span.1,
        &opts,
    )?;
    Ok(OdeTrajectory {
        traj,
        reltol: opts.reltol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, r: f64, s: f64, d: f64) -> ModelParams {
        ModelParams::new(a, r, s, d).unwrap()
    }

    #[test]
    fn plane_exponential_rhs_at_a_simple_state() {
        let p = params(0.0, 2.0, 3.0, 0.5);
        let rhs = reduced_rhs(
            &ReductionCase::PlaneExponential { beta: 0.0 },
            &p,
            0.0,
            &[1.0, 0.0],
        )
        .unwrap();
        assert_eq!(rhs, vec![1.0, 0.0]);
    }

    #[test]
    fn travelling_scalar_forces_the_degenerate_identity() {
        // With S = dR and beta = d(R-1)/(1-d), alpha = 0, the scalar ODE
        // collapses to phi * phi'''' = (phi'')^2; both phi = w and
        // phi = w^(3/2) satisfy it.
        let (d, r) = (0.5, 3.0);
        let p = params(0.0, r, d * r, d);
        let beta = d * (r - 1.0) / (1.0 - d);
        let case = ReductionCase::TravellingScalar { alpha: 0.0, beta };
        let w = 2.0_f64;
        // phi = w^(3/2): derivatives 3/2 w^(1/2), 3/4 w^(-1/2), -3/8 w^(-3/2).
        let state = [
            w.powf(1.5),
            1.5 * w.sqrt(),
            0.75 / w.sqrt(),
            -0.375 * w.powf(-1.5),
        ];
        let rhs = reduced_rhs(&case, &p, w, &state).unwrap();
        let expected_p4 = state[2] * state[2] / state[0];
        assert!((rhs[3] - expected_p4).abs() < 1e-12 * expected_p4.abs());
        // phi = w: all higher derivatives vanish.
        let rhs = reduced_rhs(&case, &p, w, &[w, 1.0, 0.0, 0.0]).unwrap();
        assert!(rhs[3].abs() < 1e-12);
    }

    #[test]
    fn singular_phi_is_rejected() {
        let p = params(0.0, 2.0, 3.0, 1.0);
        let err = reduced_rhs(
            &ReductionCase::PlaneExponential { beta: 1.0 },
            &p,
            0.0,
            &[0.0, 1.0],
        )
        .unwrap_err();
        assert!(err.to_string().contains("phi"), "{err}");
    }

    #[test]
    fn constant_rhs_gives_a_constant_trajectory() {
        // The cubic equilibrium of the coefficient equation stays put.
        let p = params(0.0, 2.0, 2.0, 0.5);
        let c1 = 0.7;
        // Solve (d-1)/3 f^3 + (S-1) f + C1 = 0 by bisection.
        let g = |f: f64| (p.d - 1.0) / 3.0 * f * f * f + (p.s - 1.0) * f + c1;
        let (mut lo, mut hi) = (-2.0, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let froot = 0.5 * (lo + hi);
        let traj = f_solve(&p, c1, froot, 0.0, (0.0, 2.0)).unwrap();
        assert!((traj.final_state()[0] - froot).abs() < 1e-8);
    }

    #[test]
    fn chi_general_with_zero_constant_is_constant_in_time() {
        let p = params(0.0, 2.0, 3.0, 0.5);
        let beta = 1.0;
        let g = 1.0 - p.s + (1.0 - p.d) * beta * beta;
        let expect = 1.0 + beta * beta - g * p.r / (p.r - p.s);
        for &t in &[0.0, 0.5, 2.0] {
            let chi = chi_closed_form(&ChiBranch::General { beta, c1: 0.0 }, &p, t).unwrap();
            assert!((chi - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn chi_gaussian_general_limit_at_large_time() {
        // With S > 1 the exponential in the denominator dies off and
        // chi -> 1 - 1/(2t) + R(S-1)/(R-S).
        let p = params(0.0, 1.5, 3.0, 1.0);
        let chi = chi_closed_form(&ChiBranch::GaussianGeneral { c: 1.0 }, &p, 50.0).unwrap();
        let tail = p.r * (p.s - 1.0) / (p.r - p.s);
        assert!((chi - (1.0 - 1.0 / 100.0 + tail)).abs() < 1e-10);
    }

    #[test]
    fn branch_constraints_are_enforced() {
        let p = params(0.0, 2.0, 2.0, 1.0);
        assert!(chi_closed_form(&ChiBranch::General { beta: 1.0, c1: 0.5 }, &p, 0.0).is_err());
        let p = params(0.0, 2.0, 3.0, 1.0);
        assert!(
            chi_closed_form(&ChiBranch::GaussianEqualRates { c: 0.5 }, &p, 1.0).is_err()
        );
        let p = params(0.0, 2.0, 3.0, 0.5);
        assert!(chi_closed_form(&ChiBranch::GaussianGeneral { c: 0.5 }, &p, 1.0).is_err());
    }

    #[test]
    fn degenerate_gh_branch_keeps_g_linear() {
        // C = 0 forces g'' = 0; with h = 0 the h-equation is inert.
        let traj = gh_solve(2.0, 0.0, 1.0, 0.5, 0.0, 0.0, (0.0, 2.0)).unwrap();
        let y = traj.final_state();
        assert!((y[0] - 2.0).abs() < 1e-10, "g(2) = {}", y[0]);
        assert!((y[1] - 0.5).abs() < 1e-12);
        assert!(y[2].abs() < 1e-12 && y[3].abs() < 1e-12);
    }
}
