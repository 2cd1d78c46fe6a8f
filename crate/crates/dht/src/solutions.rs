//! Catalogue of closed-form exact solution families.
//!
//! Every family is a pair `(u, v)` of closed-form fields satisfying the
//! system for a constrained parameter set, together with a validity-domain
//! predicate. Constructors reject constraint violations with an error naming
//! the constraint; evaluation outside the domain is an error, never a silent
//! NaN.

use crate::core_model::{FieldSample, ModelParams};
use crate::error::{Error, Result};
use crate::special_fn::{airy, arcsinh};
use std::fmt;
use std::sync::Arc;

/// Exponent choice for the power-law family F1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F1Exponent {
    One,
    ThreeHalves,
}

/// Sign branch carried explicitly where the closed form has a `+/-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    pub fn factor(self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }
}

/// Family tag plus family parameters. The embedded [`ModelParams`] are the
/// coefficients the family is a solution for.
#[derive(Debug, Clone)]
pub enum SolutionSpec {
    /// `u = x^g e^{bt}` with `g` in {1, 3/2}, `b = d(R-1)/(1-d)`;
    /// requires `S = dR`, `d != 1`, `A = 0`; domain `x > 0`.
    F1PowerLaw {
        params: ModelParams,
        exponent: F1Exponent,
    },
    /// Equal-diffusivity travelling profile `u = phi(x - a t) e^{bt}`,
    /// `v = (1-S)/(R-S) u`, with a three-branch `phi` selected by the sign of
    /// `b - ((R-1)S/(R-S) - a^2/4)`; requires `d = 1`, `R != S`, `A = 0`.
    F2Travelling {
        params: ModelParams,
        alpha: f64,
        beta: f64,
        c0: f64,
        c1: f64,
        c2: f64,
    },
    /// Stationary-profile lift `u = phi(x) e^{bt}`,
    /// `v = (d-S+(1-d)b)/(dR-S) u`, three-branch `phi`; requires `dR != S`,
    /// `d != 1`, `A = 0`.
    F3StationaryLift {
        params: ModelParams,
        beta: f64,
        c0: f64,
        c1: f64,
        c2: f64,
    },
    /// Exponentially separable branch
    /// `u = (C + e^{-g t})^{R/(R-S)} e^{(1+b^2)t + bx}` with
    /// `g = 1 - S + (1-d) b^2`; requires `g != 0`, `R != S`, `A = 0`.
    F4ExpSeparable {
        params: ModelParams,
        beta: f64,
        c: f64,
    },
    /// Sub-branch of F4 for `R = S` built from the log-derivative
    /// `chi = 1 + b^2 + C1 e^{-g t}`; requires `g != 0`, `A = 0`.
    F4EqualRS {
        params: ModelParams,
        beta: f64,
        c1: f64,
    },
    /// Sub-branch of F4 for `g = 0` built from
    /// `chi = 1 + b^2 + R/(C1 + (R-S) t)`; requires `S = 1 + (1-d) b^2`,
    /// `A = 0`.
    F4GammaZero {
        params: ModelParams,
        beta: f64,
        c1: f64,
    },
    /// Airy family `u = (C1 Ai(z) + C2 Bi(z)) exp(2t^3/(3 a^2) - tx/a)`,
    /// `z = a^{-4/3}(t^2 - a x) + a^{2/3} (1-R)S/(R-S)`,
    /// `v = (S-1)/(S-R) u`; requires `d = 1`, `a != 0`, `R != S`, `A = 0`.
    F5Airy {
        params: ModelParams,
        alpha: f64,
        c1: f64,
        c2: f64,
    },
    /// Gaussian source solution
    /// `u = t^{-1/2} e^{t - x^2/(4t)} (C + e^{(S-1)t})^{R/(R-S)}`;
    /// requires `d = 1`, `R != S`, `S != 1`, `A = 0`; domain `t > 0`.
    F6Gaussian { params: ModelParams, c: f64 },
    /// Time-shifted `cosh`/`tanh` form of the Gaussian source solution with
    /// parameter `t0 > 0`; domain `t > -t0`.
    F6Shifted { params: ModelParams, t0: f64 },
    /// Conditional-symmetry solution for `d != 1` built from the explicit
    /// `f(t)` (sign branch) and the `arcsinh` (d < 1) or `arcsin` (d > 1)
    /// quadrature `G(t)`; requires `d != 1`, `R = S`, `S > 1`, `A = 0`.
    /// With `printed_v` the literature variant of the v-component (cube root,
    /// no 1/S) is evaluated instead; it fails the residual gate and marks the
    /// solution unverified.
    F7ConditionalI {
        params: ModelParams,
        c: f64,
        sign: SignBranch,
        printed_v: bool,
    },
    /// Three-parameter conditional-symmetry family for `d = 1`, in
    /// `w = 4 C3 t - x`; requires `d = 1`, `R = S`, `A = 0`.
    F8Family {
        params: ModelParams,
        c: f64,
        c2: f64,
        c3: f64,
    },
    /// `C2 = C3 = 0` member of the F8 family.
    F8Special { params: ModelParams, c: f64 },
    /// Space/time-shifted F8 special form with parameters `(t0, x0)`.
    F8Shifted {
        params: ModelParams,
        c: f64,
        t0: f64,
        x0: f64,
    },
    /// Galilei-simplified variant of the F8 family with parameters `(C2, C)`.
    F8Simplified {
        params: ModelParams,
        c: f64,
        c2: f64,
    },
    /// Solutions built outside the closed-form catalogue (reduction lifts,
    /// numeric pipelines, superpositions); `label` says how.
    Derived { params: ModelParams, label: String },
}

impl SolutionSpec {
    /// Family tag F1..F8 for catalogue listing.
    pub fn family(&self) -> &'static str {
        match self {
            SolutionSpec::F1PowerLaw { .. } => "F1",
            SolutionSpec::F2Travelling { .. } => "F2",
            SolutionSpec::F3StationaryLift { .. } => "F3",
            SolutionSpec::F4ExpSeparable { .. }
            | SolutionSpec::F4EqualRS { .. }
            | SolutionSpec::F4GammaZero { .. } => "F4",
            SolutionSpec::F5Airy { .. } => "F5",
            SolutionSpec::F6Gaussian { .. } | SolutionSpec::F6Shifted { .. } => "F6",
            SolutionSpec::F7ConditionalI { .. } => "F7",
            SolutionSpec::F8Family { .. }
            | SolutionSpec::F8Special { .. }
            | SolutionSpec::F8Shifted { .. }
            | SolutionSpec::F8Simplified { .. } => "F8",
            SolutionSpec::Derived { .. } => "derived",
        }
    }

    pub fn params(&self) -> ModelParams {
        match self {
            SolutionSpec::F1PowerLaw { params, .. }
            | SolutionSpec::F2Travelling { params, .. }
            | SolutionSpec::F3StationaryLift { params, .. }
            | SolutionSpec::F4ExpSeparable { params, .. }
            | SolutionSpec::F4EqualRS { params, .. }
            | SolutionSpec::F4GammaZero { params, .. }
            | SolutionSpec::F5Airy { params, .. }
            | SolutionSpec::F6Gaussian { params, .. }
            | SolutionSpec::F6Shifted { params, .. }
            | SolutionSpec::F7ConditionalI { params, .. }
            | SolutionSpec::F8Family { params, .. }
            | SolutionSpec::F8Special { params, .. }
            | SolutionSpec::F8Shifted { params, .. }
            | SolutionSpec::F8Simplified { params, .. }
            | SolutionSpec::Derived { params, .. } => *params,
        }
    }
}

/// Validity-domain predicate with a printable description.
#[derive(Clone)]
pub struct Domain {
    desc: String,
    pred: Arc<dyn Fn(f64, f64) -> bool + Send + Sync>,
}

impl Domain {
    pub fn new(desc: impl Into<String>, pred: impl Fn(f64, f64) -> bool + Send + Sync + 'static) -> Self {
        Domain {
            desc: desc.into(),
            pred: Arc::new(pred),
        }
    }

    pub fn all() -> Self {
        Domain::new("all (t, x)", |_, _| true)
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        (self.pred)(t, x)
    }

    pub fn describe(&self) -> &str {
        &self.desc
    }

    /// Domain of the pullback `(t, x) -> (map_t(t,x), map_x(t,x))`.
    pub fn pulled_back(
        &self,
        desc: impl Into<String>,
        map: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        let inner = self.clone();
        Domain::new(desc, move |t, x| {
            let (tt, xx) = map(t, x);
            inner.contains(tt, xx)
        })
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain({})", self.desc)
    }
}

type EvalFn = Arc<dyn Fn(f64, f64) -> FieldSample + Send + Sync>;

/// An evaluable closed-form `(u, v)` pair.
#[derive(Clone)]
pub struct ExactSolution {
    pub spec: SolutionSpec,
    pub params: ModelParams,
    pub domain: Domain,
    /// Seed family plus any transform chain, for reporting.
    pub provenance: Vec<String>,
    /// Set on catalogue variants known not to pass the residual gate.
    pub unverified: bool,
    /// Set on superpositions; sticky through transforms.
    pub approximate: bool,
    eval: EvalFn,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactSolution")
            .field("provenance", &self.provenance)
            .field("domain", &self.domain)
            .field("unverified", &self.unverified)
            .field("approximate", &self.approximate)
            .finish()
    }
}

impl ExactSolution {
    /// Assembles a solution from parts; used by transforms, reductions, and
    /// superpositions in addition to [`instantiate`].
    pub fn from_parts(
        spec: SolutionSpec,
        params: ModelParams,
        domain: Domain,
        provenance: Vec<String>,
        eval: impl Fn(f64, f64) -> FieldSample + Send + Sync + 'static,
    ) -> Self {
        ExactSolution {
            spec,
            params,
            domain,
            provenance,
            unverified: false,
            approximate: false,
            eval: Arc::new(eval),
        }
    }

    pub fn eval_fn(&self) -> EvalFn {
        self.eval.clone()
    }

    /// Evaluates `(u, v)` at a point of the validity domain.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<FieldSample> {
        if !self.domain.contains(t, x) {
            return Err(Error::OutOfDomain {
                t,
                x,
                predicate: self.domain.describe().to_string(),
            });
        }
        let s = (self.eval)(t, x);
        if !(s.u.is_finite() && s.v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "evaluation at ({t}, {x}) produced (u, v) = ({}, {})",
                s.u, s.v
            )));
        }
        Ok(s)
    }

    /// Scans a grid for componentwise nonnegativity; reports the first
    /// violating node if any.
    pub fn positivity_scan(&self, grid: &crate::verify::GridSpec) -> Result<PositivityScan> {
        for t in grid.t_nodes() {
            for x in grid.x_nodes() {
                let s = self.evaluate(t, x)?;
                if s.u < 0.0 {
                    return Ok(PositivityScan {
                        ok: false,
                        first_violation: Some((t, x, Component::U)),
                    });
                }
                if s.v < 0.0 {
                    return Ok(PositivityScan {
                        ok: false,
                        first_violation: Some((t, x, Component::V)),
                    });
                }
            }
        }
        Ok(PositivityScan {
            ok: true,
            first_violation: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityScan {
    pub ok: bool,
    pub first_violation: Option<(f64, f64, Component)>,
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Constraint(msg.to_string()))
    }
}

/// Builds the evaluable solution for a spec, rejecting constraint violations.
pub fn instantiate(spec: &SolutionSpec) -> Result<ExactSolution> {
    let params = spec.params();
    let provenance = vec![format!("{:?}", spec)];
    match spec.clone() {
        SolutionSpec::F1PowerLaw { params: p, exponent } => {
            require(p.a == 0.0, "F1 requires A = 0")?;
            require(p.d != 1.0, "F1 requires d != 1")?;
            require((p.s - p.d * p.r).abs() < 1e-12, "F1 requires S = dR")?;
            let beta = p.d * (p.r - 1.0) / (1.0 - p.d);
            let eval = move |t: f64, x: f64| -> FieldSample {
                let e = (beta * t).exp();
                match exponent {
                    F1Exponent::One => FieldSample {
                        u: x * e,
                        v: (1.0 - beta) / p.r * x * e,
                    },
                    F1Exponent::ThreeHalves => FieldSample {
                        u: x.powf(1.5) * e,
                        v: (0.75 / p.r * x.powf(-0.5)
                            + (1.0 - p.d * p.r) / ((1.0 - p.d) * p.r) * x.powf(1.5))
                            * e,
                    },
                }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::new("x > 0", |_, x| x > 0.0),
                provenance,
                eval,
            ))
        }
        SolutionSpec::F2Travelling {
            params: p,
            alpha,
            beta,
            c0,
            c1,
            c2,
        } => {
            require(p.a == 0.0, "F2 requires A = 0")?;
            require(p.d == 1.0, "F2 requires d = 1")?;
            require(p.r != p.s, "F2 requires R != S")?;
            let threshold = (p.r - 1.0) * p.s / (p.r - p.s) - alpha * alpha / 4.0;
            let kappa = (beta - threshold).abs().sqrt();
            let ratio = (1.0 - p.s) / (p.r - p.s);
            let phi: Arc<dyn Fn(f64) -> f64 + Send + Sync> = if beta > threshold {
                Arc::new(move |w: f64| {
                    c1 * (-(2.0 * kappa + alpha) / 2.0 * w).exp()
                        + c2 * ((2.0 * kappa - alpha) / 2.0 * w).exp()
                })
            } else if beta < threshold {
                Arc::new(move |w: f64| c1 * (kappa * w + c0).sin() * (-alpha / 2.0 * w).exp())
            } else {
                Arc::new(move |w: f64| (c1 + c2 * w) * (-alpha / 2.0 * w).exp())
            };
            let eval = move |t: f64, x: f64| {
                let u = phi(x - alpha * t) * (beta * t).exp();
                FieldSample { u, v: ratio * u }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::all(),
                provenance,
                eval,
            ))
        }
        SolutionSpec::F3StationaryLift {
            params: p,
            beta,
            c0,
            c1,
            c2,
        } => {
            require(p.a == 0.0, "F3 requires A = 0")?;
            require(p.d != 1.0, "F3 requires d != 1")?;
            require(p.d * p.r != p.s, "F3 requires dR != S")?;
            let disc = ((p.r - p.s) * beta + (1.0 - p.r) * p.s) / (p.d * p.r - p.s);
            let kappa = disc.abs().sqrt();
            let ratio = (p.d - p.s + (1.0 - p.d) * beta) / (p.d * p.r - p.s);
            let phi: Arc<dyn Fn(f64) -> f64 + Send + Sync> = if disc > 0.0 {
                Arc::new(move |x: f64| c1 * (-kappa * x).exp() + c2 * (kappa * x).exp())
            } else if disc < 0.0 {
                Arc::new(move |x: f64| c1 * (kappa * x + c0).sin())
            } else {
                Arc::new(move |x: f64| c1 + c2 * x)
            };
            let eval = move |t: f64, x: f64| {
                let u = phi(x) * (beta * t).exp();
                FieldSample { u, v: ratio * u }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::all(),
                provenance,
                eval,
            ))
        }
        SolutionSpec::F4ExpSeparable { params: p, beta, c } => {
            require(p.a == 0.0, "F4 requires A = 0")?;
            require(p.r != p.s, "F4 primary branch requires R != S")?;
            let gamma = 1.0 - p.s + (1.0 - p.d) * beta * beta;
            require(
                gamma != 0.0,
                "F4 primary branch requires gamma = 1 - S + (1-d) beta^2 != 0; use the gamma-zero sub-branch",
            )?;
            let er = p.r / (p.r - p.s);
            let es = p.s / (p.r - p.s);
            let eval = move |t: f64, x: f64| {
                let base = c + (-gamma * t).exp();
                FieldSample {
                    u: base.powf(er) * ((1.0 + beta * beta) * t + beta * x).exp(),
                    v: gamma / (p.r - p.s)
                        * base.powf(es)
                        * ((p.s + p.d * beta * beta) * t + beta * x).exp(),
                }
            };
            // Fractional powers require a positive base.
            let domain = Domain::new(format!("C + e^(-gamma t) > 0 with C = {c}"), move |t, _| {
                c + (-gamma * t).exp() > 0.0
            });
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                domain,
                provenance,
                eval,
            ))
        }
        SolutionSpec::F4EqualRS { params: p, beta, c1 } => {
            require(p.a == 0.0, "F4 equal-RS sub-branch requires A = 0")?;
            require(p.r == p.s, "F4 equal-RS sub-branch requires R = S")?;
            let gamma = 1.0 - p.s + (1.0 - p.d) * beta * beta;
            require(gamma != 0.0, "F4 equal-RS sub-branch requires gamma != 0")?;
            // chi = 1 + beta^2 + C1 e^{-gamma t}; phi = exp(int chi),
            // psi = -C1 e^{-gamma t} phi / R.
            let eval = move |t: f64, x: f64| {
                let int_chi =
                    (1.0 + beta * beta) * t + c1 / gamma * (1.0 - (-gamma * t).exp());
                let phi = int_chi.exp();
                let psi = -c1 * (-gamma * t).exp() * phi / p.r;
                let e = (beta * x).exp();
                FieldSample {
                    u: phi * e,
                    v: psi * e,
                }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::all(),
                provenance,
                eval,
            ))
        }
        SolutionSpec::F4GammaZero { params: p, beta, c1 } => {
            require(p.a == 0.0, "F4 gamma-zero sub-branch requires A = 0")?;
            let gamma = 1.0 - p.s + (1.0 - p.d) * beta * beta;
            require(
                gamma.abs() < 1e-12,
                "F4 gamma-zero sub-branch requires S = 1 + (1-d) beta^2",
            )?;
            require(c1 != 0.0, "F4 gamma-zero sub-branch requires C1 != 0")?;
            let m = p.r - 1.0 + (p.d - 1.0) * beta * beta; // equals R - S here
            let eval = move |t: f64, x: f64| {
                let e = (beta * x).exp();
                if m.abs() < 1e-12 {
                    // chi is the constant 1 + beta^2 + R/C1.
                    let phi = ((1.0 + beta * beta + p.r / c1) * t).exp();
                    FieldSample {
                        u: phi * e,
                        v: -phi / c1 * e,
                    }
                } else {
                    let lin = c1 + m * t;
                    let phi =
                        ((1.0 + beta * beta) * t).exp() * (lin / c1).powf(p.r / m);
                    FieldSample {
                        u: phi * e,
                        v: -phi / lin * e,
                    }
                }
            };
            let domain = if m.abs() < 1e-12 {
                Domain::all()
            } else {
                Domain::new(
                    format!("(C1 + (R-S) t)/C1 > 0 with C1 = {c1}"),
                    move |t, _| (c1 + m * t) / c1 > 0.0,
                )
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                domain,
                provenance,
                eval,
            ))
        }
        SolutionSpec::F5Airy {
            params: p,
            alpha,
            c1,
            c2,
        } => {
            require(p.a == 0.0, "F5 requires A = 0")?;
            require(p.d == 1.0, "F5 requires d = 1")?;
            require(alpha != 0.0, "F5 requires alpha != 0")?;
            require(p.r != p.s, "F5 requires R != S")?;
            let cbrt = alpha.cbrt();
            let shift = cbrt * cbrt * (1.0 - p.r) * p.s / (p.r - p.s);
            let ratio = (p.s - 1.0) / (p.s - p.r);
            let z_of = move |t: f64, x: f64| (t * t - alpha * x) / cbrt.powi(4) + shift;
            let eval = move |t: f64, x: f64| {
                let pair = airy(z_of(t, x)).expect("finite Airy argument inside domain");
                let u = (c1 * pair.ai + c2 * pair.bi)
                    * (2.0 * t * t * t / (3.0 * alpha * alpha) - t * x / alpha).exp();
                FieldSample { u, v: ratio * u }
            };
            // When C2 != 0 the Bi term overflows for large argument; the
            // domain keeps the argument in the representable range.
            let domain = if c2 == 0.0 {
                Domain::all()
            } else {
                Domain::new("Airy argument z < 100 (Bi representable)", move |t, x| {
                    z_of(t, x) < 100.0
                })
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                domain,
                provenance,
                eval,
            ))
        }
        SolutionSpec::F6Gaussian { params: p, c } => {
            require(p.a == 0.0, "F6 requires A = 0")?;
            require(p.d == 1.0, "F6 requires d = 1")?;
            require(p.r != p.s, "F6 requires R != S")?;
            require(p.s != 1.0, "F6 requires S != 1")?;
            let er = p.r / (p.r - p.s);
            let es = p.s / (p.r - p.s);
            let eval = move |t: f64, x: f64| {
                let base = c + ((p.s - 1.0) * t).exp();
                let gauss = (-x * x / (4.0 * t)).exp() / t.sqrt();
                FieldSample {
                    u: t.exp() * gauss * base.powf(er),
                    v: (p.s - 1.0) / (p.s - p.r) * (p.s * t).exp() * gauss * base.powf(es),
                }
            };
            let domain = Domain::new(
                format!("t > 0 and C + e^((S-1)t) > 0 with C = {c}"),
                move |t, _| t > 0.0 && c + ((p.s - 1.0) * t).exp() > 0.0,
            );
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                domain,
                provenance,
                eval,
            ))
        }
        SolutionSpec::F6Shifted { params: p, t0 } => {
            require(p.a == 0.0, "F6 requires A = 0")?;
            require(p.d == 1.0, "F6 requires d = 1")?;
            require(p.r != p.s, "F6 requires R != S")?;
            require(p.s != 1.0, "F6 requires S != 1")?;
            require(t0 > 0.0, "F6 shifted form requires t0 > 0")?;
            let er = p.r / (p.r - p.s);
            let eval = move |t: f64, x: f64| {
                let tt = t + t0;
                let u = tt.powf(-0.5)
                    * ((p.s - 1.0) / 2.0 * tt).cosh().powf(er)
                    * ((2.0 * p.s - p.r - p.r * p.s) / (2.0 * (p.s - p.r)) * t
                        - x * x / (4.0 * tt))
                        .exp();
                let v = (p.s - 1.0) / (2.0 * (p.s - p.r))
                    * (1.0 + ((p.s - 1.0) / 2.0 * tt).tanh())
                    * u;
                FieldSample { u, v }
            };
            let domain = Domain::new(format!("t > -t0 with t0 = {t0}"), move |t, _| t > -t0);
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                domain,
                provenance,
                eval,
            ))
        }
        SolutionSpec::F7ConditionalI {
            params: p,
            c,
            sign,
            printed_v,
        } => {
            require(p.a == 0.0, "F7 requires A = 0")?;
            require(p.d != 1.0, "F7 requires d != 1")?;
            require(p.r == p.s, "F7 requires R = S")?;
            // The square roots in f(t) and G(t) force S > 1, which is
            // stricter than the S != 1 the closed form is quoted with.
            require(p.s > 1.0, "F7 requires S > 1")?;
            let d = p.d;
            let s = p.s;
            let sg = sign.factor();
            let parts = move |t: f64| -> (f64, f64, f64, f64, f64) {
                let e = ((s - 1.0) * t).exp();
                let den = 3.0 + (1.0 - d) * e * e;
                let f = sg * (3.0 * (s - 1.0) / den).sqrt() * e;
                let fp = sg * 3.0 * (s - 1.0) * (3.0 * (s - 1.0)).sqrt() * e / den.powf(1.5);
                let g = if d < 1.0 {
                    e / den.sqrt()
                        * (c + 6.0 * d / (1.0 - d).sqrt()
                            * arcsinh(((1.0 - d) / 3.0).sqrt() * e))
                } else {
                    e / den.sqrt()
                        * (c + 6.0 * d / (d - 1.0).sqrt()
                            * (((d - 1.0) / 3.0).sqrt() * e).asin())
                };
                let phi = (g + t).exp() * den.powf(3.0 * (2.0 * d - 1.0) / (2.0 * (d - 1.0)));
                let psi = 3.0 * (1.0 - s) * g / (s * den) * phi;
                (f, fp, g, phi, psi)
            };
            let eval = move |t: f64, x: f64| {
                let (f, fp, g, phi, psi) = parts(t);
                let e = (x * f).exp();
                let u = phi * e;
                let v = if printed_v {
                    // Literature variant: cube root, no 1/S division.
                    let den = 3.0 + (1.0 - d) * ((s - 1.0) * t).exp().powi(2);
                    let ee = ((s - 1.0) * t).exp();
                    (3.0 * (1.0 - s) / s / den * g
                        - sg * x * ee * (3.0 * (s - 1.0) / den).cbrt())
                        * u
                } else {
                    (psi - x * fp * phi / s) * e
                };
                FieldSample { u, v }
            };
            let domain = if d < 1.0 {
                Domain::all()
            } else {
                // e^{2(S-1)t} < 3/(d-1) keeps den > 0 and the arcsin argument
                // inside [-1, 1].
                let t_max = (3.0 / (d - 1.0)).ln() / (2.0 * (s - 1.0));
                Domain::new(format!("t < {t_max:.6} (d > 1 window)"), move |t, _| {
                    t < t_max
                })
            };
            let mut sol = ExactSolution::from_parts(spec.clone(), params, domain, provenance, eval);
            sol.unverified = printed_v;
            Ok(sol)
        }
        SolutionSpec::F8Family {
            params: p,
            c,
            c2,
            c3,
        } => {
            require(p.a == 0.0, "F8 requires A = 0")?;
            require(p.d == 1.0, "F8 requires d = 1")?;
            require(p.r == p.s, "F8 requires R = S")?;
            let s = p.s;
            let eval = move |t: f64, x: f64| {
                let w = 4.0 * c3 * t - x;
                let grow = c * ((s - 1.0) * t).exp();
                let u = (((9.0 - s) / 8.0 - 4.0 * c3 * c3) * t + (2.0 * c3 - c2) * w
                    - (s - 1.0) / 8.0 * w * w
                    + grow)
                    .exp();
                let v = 1.0 / (16.0 * s)
                    * ((4.0 * c2 + (s - 1.0) * w).powi(2) - 2.0 * (s - 1.0) * (1.0 + 8.0 * grow))
                    * u;
                FieldSample { u, v }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::all(),
                provenance,
                eval,
            ))
        }
        SolutionSpec::F8Special { params: p, c } => instantiate_f8_shifted(spec, p, c, 0.0, 0.0),
        SolutionSpec::F8Shifted {
            params: p,
            c,
            t0,
            x0,
        } => instantiate_f8_shifted(spec, p, c, t0, x0),
        SolutionSpec::Derived { label, .. } => Err(Error::Constraint(format!(
            "derived solutions are built by their originating module, not instantiated: {label}"
        ))),
        SolutionSpec::F8Simplified { params: p, c, c2 } => {
            require(p.a == 0.0, "F8 requires A = 0")?;
            require(p.d == 1.0, "F8 requires d = 1")?;
            require(p.r == p.s, "F8 requires R = S")?;
            let s = p.s;
            let eval = move |t: f64, x: f64| {
                let grow = c * ((s - 1.0) * t).exp();
                let u = ((9.0 - s) / 8.0 * t + c2 * x - (s - 1.0) / 8.0 * x * x + grow).exp();
                let v = 1.0 / (16.0 * s)
                    * ((4.0 * c2 - (s - 1.0) * x).powi(2) - 2.0 * (s - 1.0) * (1.0 + 8.0 * grow))
                    * u;
                FieldSample { u, v }
            };
            Ok(ExactSolution::from_parts(
                spec.clone(),
                params,
                Domain::all(),
                provenance,
                eval,
            ))
        }
    }
}

fn instantiate_f8_shifted(
    spec: &SolutionSpec,
    p: ModelParams,
    c: f64,
    t0: f64,
    x0: f64,
) -> Result<ExactSolution> {
    require(p.a == 0.0, "F8 requires A = 0")?;
    require(p.d == 1.0, "F8 requires d = 1")?;
    require(p.r == p.s, "F8 requires R = S")?;
    let s = p.s;
    let eval = move |t: f64, x: f64| {
        let tt = t + t0;
        let xx = x + x0;
        let grow = c * ((s - 1.0) * tt).exp();
        let u = ((9.0 - s) / 8.0 * tt + grow - (s - 1.0) / 8.0 * xx * xx).exp();
        let v = (s - 1.0) / (16.0 * s) * (-2.0 - 16.0 * grow + (s - 1.0) * xx * xx) * u;
        FieldSample { u, v }
    };
    Ok(ExactSolution::from_parts(
        spec.clone(),
        p,
        Domain::all(),
        vec![format!("{:?}", spec)],
        eval,
    ))
}

/// Whether the F8 special/shifted positivity regime `C <= -(1/8) e^{(1-S)t0}`,
/// `S > 1` holds.
pub fn f8_positivity_regime(s: f64, c: f64, t0: f64) -> bool {
    s > 1.0 && c <= -0.125 * ((1.0 - s) * t0).exp()
}

/// Catalogue row used by the CLI listing.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CatalogueRow {
    pub family: &'static str,
    pub description: &'static str,
    pub constraints: &'static str,
    pub domain: &'static str,
}

/// Static catalogue of the eight families.
pub fn catalogue() -> Vec<CatalogueRow> {
    vec![
        CatalogueRow {
            family: "F1",
            description: "power-law profile u = x^g e^(bt), g in {1, 3/2}",
            constraints: "A = 0, S = dR, d != 1",
            domain: "x > 0",
        },
        CatalogueRow {
            family: "F2",
            description: "equal-diffusivity travelling profile, three branches",
            constraints: "A = 0, d = 1, R != S",
            domain: "all (t, x)",
        },
        CatalogueRow {
            family: "F3",
            description: "stationary profile lifted by e^(bt), three branches",
            constraints: "A = 0, d != 1, dR != S",
            domain: "all (t, x)",
        },
        CatalogueRow {
            family: "F4",
            description: "exponentially separable branch plus R = S and gamma = 0 sub-branches",
            constraints: "A = 0, R != S and gamma != 0 (primary)",
            domain: "C + e^(-gamma t) > 0",
        },
        CatalogueRow {
            family: "F5",
            description: "Airy-function family in z = a^(-4/3)(t^2 - a x) + shift",
            constraints: "A = 0, d = 1, alpha != 0, R != S",
            domain: "all (t, x); Bi-representable when C2 != 0",
        },
        CatalogueRow {
            family: "F6",
            description: "Gaussian source solution; general and time-shifted forms",
            constraints: "d = 1, R != S, S != 1, t0 > 0 (shifted)",
            domain: "t > 0 (general) / t > -t0 (shifted)",
        },
        CatalogueRow {
            family: "F7",
            description: "conditional-symmetry solution for unequal diffusivities",
            constraints: "A = 0, d != 1, R = S, S > 1",
            domain: "all t (d < 1) / t below the arcsin window bound (d > 1)",
        },
        CatalogueRow {
            family: "F8",
            description: "conditional-symmetry Gaussian family; three-parameter, special, shifted, and simplified forms",
            constraints: "A = 0, d = 1, R = S; positivity for C <= -(1/8)e^((1-S)t0), S > 1",
            domain: "all (t, x)",
        },
    ]
}
