//! Finite symmetry transformations mapping solutions to solutions.
//!
//! Only the transforms with simple finite flows are implemented: time and
//! space translations, the scaling of both fields (A = 0), the Galilei boost
//! (d = 1), and the exponential gauge factor (A = 0, S = 1). The remaining
//! generators are covered by the infinitesimal order check in [`crate::verify`].

use crate::core_model::FieldSample;
use crate::error::{Error, Result};
use crate::solutions::ExactSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeDirection {
    Forward,
    Inverse,
}

/// One finite transformation with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformSpec {
    /// `(u, v)(t, x) -> (u, v)(t + t0, x)`.
    TimeShift(f64),
    /// `(u, v)(t, x) -> (u, v)(t, x + x0)`.
    SpaceShift(f64),
    /// `(u, v) -> (C u, C v)`; requires `A = 0`.
    Scale(f64),
    /// `(u, v)(t, x) -> (u, v)(t, x + eps t) * exp((eps/2)(x + eps t/2))`;
    /// requires `d = 1`.
    Galilei(f64),
    /// Forward: `(u, v) -> (e^t u, e^t v)`; inverse reverses it.
    /// Requires `A = 0` and `S = 1`.
    GaugeExp(GaugeDirection),
}

impl TransformSpec {
    fn check_param(&self) -> Result<()> {
        let p = match self {
            TransformSpec::TimeShift(p)
            | TransformSpec::SpaceShift(p)
            | TransformSpec::Scale(p)
            | TransformSpec::Galilei(p) => *p,
            TransformSpec::GaugeExp(_) => return Ok(()),
        };
        if !p.is_finite() {
            return Err(Error::Constraint(format!(
                "transform parameter must be finite, got {p}"
            )));
        }
        if matches!(self, TransformSpec::Scale(_)) && p == 0.0 {
            return Err(Error::Constraint("Scale requires C != 0".into()));
        }
        Ok(())
    }

    fn check_compatible(&self, sol: &ExactSolution) -> Result<()> {
        let params = sol.params;
        match self {
            TransformSpec::Scale(_) => {
                if params.a != 0.0 {
                    return Err(Error::Constraint(format!(
                        "Scale requires A = 0, target has A = {}",
                        params.a
                    )));
                }
            }
            TransformSpec::Galilei(_) => {
                if params.d != 1.0 {
                    return Err(Error::Constraint(format!(
                        "Galilei requires d = 1, target has d = {}",
                        params.d
                    )));
                }
            }
            TransformSpec::GaugeExp(_) => {
                if params.a != 0.0 || params.s != 1.0 {
                    return Err(Error::Constraint(format!(
                        "GaugeExp requires A = 0 and S = 1, target has A = {}, S = {}",
                        params.a, params.s
                    )));
                }
            }
            TransformSpec::TimeShift(_) | TransformSpec::SpaceShift(_) => {}
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self {
            TransformSpec::TimeShift(p) => format!("TimeShift({p})"),
            TransformSpec::SpaceShift(p) => format!("SpaceShift({p})"),
            TransformSpec::Scale(p) => format!("Scale({p})"),
            TransformSpec::Galilei(p) => format!("Galilei({p})"),
            TransformSpec::GaugeExp(GaugeDirection::Forward) => "GaugeExp(forward)".into(),
            TransformSpec::GaugeExp(GaugeDirection::Inverse) => "GaugeExp(inverse)".into(),
        }
    }
}

/// Wraps a solution with one transform. Provenance records the chain; the
/// `unverified` and `approximate` flags of the seed are preserved.
pub fn apply(tr: &TransformSpec, sol: &ExactSolution) -> Result<ExactSolution> {
    tr.check_param()?;
    tr.check_compatible(sol)?;
    let inner = sol.eval_fn();
    let desc = tr.describe();
    let (eval, domain): (Box<dyn Fn(f64, f64) -> FieldSample + Send + Sync>, _) = match *tr {
        TransformSpec::TimeShift(t0) => (
            Box::new(move |t, x| inner(t + t0, x)),
            sol.domain.pulled_back(
                format!("{} shifted by t0 = {t0}", sol.domain.describe()),
                move |t, x| (t + t0, x),
            ),
        ),
        TransformSpec::SpaceShift(x0) => (
            Box::new(move |t, x| inner(t, x + x0)),
            sol.domain.pulled_back(
                format!("{} shifted by x0 = {x0}", sol.domain.describe()),
                move |t, x| (t, x + x0),
            ),
        ),
        TransformSpec::Scale(c) => (
            Box::new(move |t, x| {
                let s = inner(t, x);
                FieldSample {
                    u: c * s.u,
                    v: c * s.v,
                }
            }),
            sol.domain.clone(),
        ),
        TransformSpec::Galilei(eps) => (
            Box::new(move |t, x| {
                let s = inner(t, x + eps * t);
                let phase = (eps / 2.0 * (x + eps * t / 2.0)).exp();
                FieldSample {
                    u: phase * s.u,
                    v: phase * s.v,
                }
            }),
            sol.domain.pulled_back(
                format!("{} boosted by eps = {eps}", sol.domain.describe()),
                move |t, x| (t, x + eps * t),
            ),
        ),
        TransformSpec::GaugeExp(dir) => {
            let sign = match dir {
                GaugeDirection::Forward => 1.0,
                GaugeDirection::Inverse => -1.0,
            };
            (
                Box::new(move |t, x| {
                    let s = inner(t, x);
                    let g = (sign * t).exp();
                    FieldSample {
                        u: g * s.u,
                        v: g * s.v,
                    }
                }),
                sol.domain.clone(),
            )
        }
    };
    let mut provenance = sol.provenance.clone();
    provenance.push(desc);
    let mut out = ExactSolution::from_parts(
        sol.spec.clone(),
        sol.params,
        domain,
        provenance,
        move |t, x| eval(t, x),
    );
    out.unverified = sol.unverified;
    out.approximate = sol.approximate;
    Ok(out)
}

/// Order-preserving transform sequence; applying it equals applying each
/// element in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformChain(pub Vec<TransformSpec>);

pub fn compose(list: Vec<TransformSpec>) -> TransformChain {
    TransformChain(list)
}

impl TransformChain {
    pub fn apply(&self, sol: &ExactSolution) -> Result<ExactSolution> {
        let mut cur = sol.clone();
        for tr in &self.0 {
            cur = apply(tr, &cur)?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::ModelParams;
    use crate::solutions::{instantiate, SolutionSpec};

    fn seed() -> ExactSolution {
        // F8 special member: d = 1, R = S, A = 0, S = 1 allowed too.
        let params = ModelParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        instantiate(&SolutionSpec::F8Special { params, c: -0.25 }).unwrap()
    }

    #[test]
    fn galilei_with_zero_velocity_is_the_identity() {
        let s = seed();
        let t = apply(&TransformSpec::Galilei(0.0), &s).unwrap();
        for &(tt, xx) in &[(0.1, -2.0), (1.0, 0.5), (2.3, 3.0)] {
            let a = s.evaluate(tt, xx).unwrap();
            let b = t.evaluate(tt, xx).unwrap();
            assert_eq!((a.u, a.v), (b.u, b.v));
        }
    }

    #[test]
    fn time_shifts_compose_additively() {
        let s = seed();
        let chain = compose(vec![TransformSpec::TimeShift(1.0), TransformSpec::TimeShift(2.0)]);
        let a = chain.apply(&s).unwrap();
        let b = apply(&TransformSpec::TimeShift(3.0), &s).unwrap();
        for &(tt, xx) in &[(0.0, 0.0), (0.7, -1.2)] {
            let ya = a.evaluate(tt, xx).unwrap();
            let yb = b.evaluate(tt, xx).unwrap();
            assert!((ya.u - yb.u).abs() < 1e-15 * ya.u.abs().max(1.0));
            assert!((ya.v - yb.v).abs() < 1e-15 * ya.v.abs().max(1.0));
        }
    }

    #[test]
    fn scale_inverse_pair_is_the_identity() {
        let s = seed();
        let chain = compose(vec![TransformSpec::Scale(2.0), TransformSpec::Scale(0.5)]);
        let t = chain.apply(&s).unwrap();
        let a = s.evaluate(0.4, 1.1).unwrap();
        let b = t.evaluate(0.4, 1.1).unwrap();
        assert_eq!((a.u, a.v), (b.u, b.v));
    }

    #[test]
    fn gauge_round_trip_is_the_identity() {
        let params = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let s = instantiate(&SolutionSpec::F8Special { params, c: -0.25 }).unwrap();
        let chain = compose(vec![
            TransformSpec::GaugeExp(GaugeDirection::Forward),
            TransformSpec::GaugeExp(GaugeDirection::Inverse),
        ]);
        let t = chain.apply(&s).unwrap();
        let a = s.evaluate(0.9, -0.3).unwrap();
        let b = t.evaluate(0.9, -0.3).unwrap();
        assert!((a.u - b.u).abs() < 1e-15 * a.u.abs());
        assert!((a.v - b.v).abs() < 1e-14 * a.v.abs().max(1.0));
    }

    #[test]
    fn incompatible_parameters_are_rejected_by_name() {
        // S = dR as the power-law family requires; d != 1 and S != 1.
        let params = ModelParams::new(0.0, 2.0, 4.0, 2.0).unwrap();
        let s = instantiate(&SolutionSpec::F1PowerLaw {
            params,
            exponent: crate::solutions::F1Exponent::One,
        })
        .unwrap();
        let err = apply(&TransformSpec::Galilei(0.5), &s).unwrap_err();
        assert!(err.to_string().contains("d = 1"), "{err}");
        let err = apply(&TransformSpec::GaugeExp(GaugeDirection::Forward), &s).unwrap_err();
        assert!(err.to_string().contains("S = 1"), "{err}");
    }

    #[test]
    fn provenance_records_the_chain() {
        let s = seed();
        let t = compose(vec![TransformSpec::TimeShift(0.5), TransformSpec::Scale(2.0)])
            .apply(&s)
            .unwrap();
        assert!(t.provenance.last().unwrap().contains("Scale(2)"));
        assert!(t.provenance[t.provenance.len() - 2].contains("TimeShift(0.5)"));
    }
}
