//! Approximate multi-peak solutions built from shifted copies of the
//! Gaussian-decaying closed form.
//!
//! The system is nonlinear, so a sum of solutions is not a solution; but the
//! Gaussian spatial decay makes every cross term exponentially small in the
//! peak spacing. The builder therefore flags multi-peak sums as approximate
//! and the residual is quantified rather than assumed.

use crate::core_model::{FieldSample, ModelParams};
use crate::error::{Error, Result};
use crate::solutions::{instantiate, Domain, ExactSolution, SolutionSpec};
use crate::verify::{residual_report, GridSpec, DEFAULT_FD_STEP};

/// Peaks of one superposition: shared `(S, C)` plus per-peak shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionSpec {
    pub s: f64,
    pub c: f64,
    /// `(t_i, x_i)` shift per peak.
    pub shifts: Vec<(f64, f64)>,
}

impl SuperpositionSpec {
    /// Whether `C <= -(1/8) e^{(1-S) max t_i}` holds, the regime in which
    /// every term is componentwise positive.
    pub fn positivity_regime(&self) -> bool {
        let t_max = self
            .shifts
            .iter()
            .map(|&(t, _)| t)
            .fold(f64::NEG_INFINITY, f64::max);
        self.s > 1.0 && self.c <= -0.125 * ((1.0 - self.s) * t_max).exp()
    }
}

/// A built superposition with its positivity diagnosis.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub solution: ExactSolution,
    pub positivity_regime: bool,
}

/// Builds `U = sum_i u(t + t_i, x + x_i)` (likewise `V`) from the
/// single-peak closed form. Sums of more than one peak carry the sticky
/// `approximate` flag; a one-term sum is the exact shifted solution.
pub fn build(spec: &SuperpositionSpec) -> Result<Superposition> {
    if !(spec.s > 1.0) {
        return Err(Error::Constraint(format!(
            "superposition requires S > 1, got {}",
            spec.s
        )));
    }
    if spec.shifts.is_empty() {
        return Err(Error::Constraint("superposition needs at least one peak".into()));
    }
    if spec
        .shifts
        .iter()
        .any(|(t, x)| !(t.is_finite() && x.is_finite()))
    {
        return Err(Error::Constraint("peak shifts must be finite".into()));
    }
    let params = ModelParams::new(0.0, spec.s, spec.s, 1.0)?;
    let peak = instantiate(&SolutionSpec::F8Special {
        params,
        c: spec.c,
    })?;
    let inner = peak.eval_fn();
    let shifts = spec.shifts.clone();
    let label = format!(
        "superposition of {} Gaussian peaks (S = {}, C = {}) at {:?}",
        shifts.len(),
        spec.s,
        spec.c,
        shifts
    );
    let eval = move |t: f64, x: f64| {
        let mut acc = FieldSample { u: 0.0, v: 0.0 };
        for &(ti, xi) in &shifts {
            let s = inner(t + ti, x + xi);
            acc.u += s.u;
            acc.v += s.v;
        }
        acc
    };
    let mut solution = ExactSolution::from_parts(
        SolutionSpec::Derived {
            params,
            label: label.clone(),
        },
        params,
        Domain::all(),
        vec![label],
        eval,
    );
    solution.approximate = spec.shifts.len() > 1;
    Ok(Superposition {
        positivity_regime: spec.positivity_regime(),
        solution,
    })
}

/// Residual as a function of peak spacing.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SpacingResidualCurve {
    /// `(min pairwise spacing, residual linf)` per probe, in input order.
    pub points: Vec<(f64, f64)>,
}

/// For each spacing, builds a symmetric two-peak superposition and records
/// its finite-difference residual on the grid.
pub fn spacing_residual_curve(
    s: f64,
    c: f64,
    spacings: &[f64],
    grid: &GridSpec,
) -> Result<SpacingResidualCurve> {
    if spacings.iter().any(|&sp| !(sp > 0.0)) {
        return Err(Error::Constraint("spacings must be positive".into()));
    }
    let params = ModelParams::new(0.0, s, s, 1.0)?;
    let mut points = Vec::with_capacity(spacings.len());
    for &sp in spacings {
        let sup = build(&SuperpositionSpec {
            s,
            c,
            shifts: vec![(0.0, -sp / 2.0), (0.0, sp / 2.0)],
        })?;
        let rep = residual_report(&sup.solution, &params, grid, DEFAULT_FD_STEP)?;
        points.push((sp, rep.linf()));
    }
    Ok(SpacingResidualCurve { points })
}

/// Counts strict interior local maxima of a sampled curve.
pub fn count_local_maxima(values: &[f64]) -> usize {
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_term_sum_equals_the_shifted_closed_form() {
        let sup = build(&SuperpositionSpec {
            s: 2.0,
            c: -0.35,
            shifts: vec![(1.0, 30.0)],
        })
        .unwrap();
        assert!(!sup.solution.approximate);
        let params = ModelParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        let shifted = instantiate(&SolutionSpec::F8Shifted {
            params,
            c: -0.35,
            t0: 1.0,
            x0: 30.0,
        })
        .unwrap();
        for &(t, x) in &[(0.0, 0.0), (0.5, -2.0), (2.0, 1.3)] {
            let a = sup.solution.evaluate(t, x).unwrap();
            let b = shifted.evaluate(t, x).unwrap();
            assert!((a.u - b.u).abs() <= 1e-14 * b.u.abs().max(1.0));
            assert!((a.v - b.v).abs() <= 1e-14 * b.v.abs().max(1.0));
        }
    }

    #[test]
    fn multi_peak_sums_are_flagged_approximate() {
        let sup = build(&SuperpositionSpec {
            s: 2.0,
            c: -0.35,
            shifts: vec![(-1.0, -30.0), (0.0, 0.0), (1.0, 30.0)],
        })
        .unwrap();
        assert!(sup.solution.approximate);
        assert!(sup.positivity_regime);
    }

    #[test]
    fn positivity_regime_boundary() {
        // C must be at or below -(1/8) e^{(1-S) max t_i}.
        let spec = SuperpositionSpec {
            s: 2.0,
            c: -0.05,
            shifts: vec![(0.0, 0.0)],
        };
        assert!(!spec.positivity_regime());
        let spec = SuperpositionSpec {
            s: 2.0,
            c: -0.125,
            shifts: vec![(0.0, 0.0)],
        };
        assert!(spec.positivity_regime());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(build(&SuperpositionSpec {
            s: 1.0,
            c: -0.35,
            shifts: vec![(0.0, 0.0)],
        })
        .is_err());
        assert!(build(&SuperpositionSpec {
            s: 2.0,
            c: -0.35,
            shifts: vec![],
        })
        .is_err());
    }

    #[test]
    fn local_maximum_counting() {
        assert_eq!(count_local_maxima(&[0.0, 1.0, 0.0, 2.0, 0.0]), 2);
        assert_eq!(count_local_maxima(&[0.0, 1.0, 2.0, 3.0]), 0);
    }
}
