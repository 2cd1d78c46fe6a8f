//! The nondimensional prey-predator model, its pointwise residual operators,
//! and the dimensional parameter map.
//!
//! The system under study is
//!
//! ```text
//! u_t = u_xx + u (1 - R v / (u + A))
//! v_t = d v_xx + S v (1 - v / u)
//! ```
//!
//! with nondimensional coefficients `A >= 0` and `R, S, d > 0`. A candidate
//! field is a solution exactly when both pointwise residuals
//! `S1 = u_xx - u_t + u (1 - R v / (u + A))` and
//! `S2 = d v_xx - v_t + S v (1 - v / u)` vanish.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Denominators with magnitude below this floor are treated as singular.
/// A hard error is preferred over clamping: masking a singularity would
/// defeat the purpose of a verification tool.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Parameters of the dimensional model: two diffusivities, the prey growth
/// rate, the predation rate, the saturation constant, the predator growth
/// rate, and the carrying ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    pub d1: f64,
    pub d2: f64,
    pub r: f64,
    pub q: f64,
    pub a0: f64,
    pub s: f64,
    pub h: f64,
}

/// Nondimensional model coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Saturation constant, `A >= 0`.
    pub a: f64,
    /// Predation coefficient, `R > 0`.
    pub r: f64,
    /// Predator growth coefficient, `S > 0`.
    pub s: f64,
    /// Diffusivity ratio, `d > 0`.
    pub d: f64,
}

impl ModelParams {
    pub fn new(a: f64, r: f64, s: f64, d: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64, allow_zero: bool| -> Result<()> {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
            if value < 0.0 || (!allow_zero && value == 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!(
                        "must be {} , got {value}",
                        if allow_zero { ">= 0" } else { "> 0" }
                    ),
                });
            }
            Ok(())
        };
        check("A", a, true)?;
        check("R", r, false)?;
        check("S", s, false)?;
        check("d", d, false)?;
        Ok(ModelParams { a, r, s, d })
    }
}

/// Scale factors of the nondimensionalizing substitution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    pub t_scale: f64,
    pub x_scale: f64,
    pub u_scale: f64,
    pub v_scale: f64,
}

/// One field sample: prey density `u` and predator density `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub u: f64,
    pub v: f64,
}

/// Field values and the partial derivatives needed by the residual operators
/// at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub v: f64,
    pub ut: f64,
    pub vt: f64,
    pub ux: f64,
    pub vx: f64,
    pub uxx: f64,
    pub vxx: f64,
}

impl Jet {
    pub fn is_finite(&self) -> bool {
        [
            self.u, self.v, self.ut, self.vt, self.ux, self.vx, self.uxx, self.vxx,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Maps dimensional parameters to the nondimensional coefficients
/// `A = A0`, `R = h q / r`, `S = s / r`, `d = d2 / d1` and the scale factors
/// `t_scale = 1/r`, `x_scale = sqrt(d1/r)`, `u_scale = 1`, `v_scale = h`.
pub fn nondimensionalize(p: &DimensionalParams) -> Result<(ModelParams, ScalingFactors)> {
    let positive = |name: &'static str, value: f64| -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be > 0, got {value}"),
            });
        }
        Ok(())
    };
    positive("d1", p.d1)?;
    positive("d2", p.d2)?;
    positive("r", p.r)?;
    positive("q", p.q)?;
    positive("s", p.s)?;
    positive("h", p.h)?;
    if !(p.a0.is_finite() && p.a0 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "A0",
            reason: format!("must be >= 0, got {}", p.a0),
        });
    }
    let params = ModelParams::new(p.a0, p.h * p.q / p.r, p.s / p.r, p.d2 / p.d1)?;
    let scales = ScalingFactors {
        t_scale: 1.0 / p.r,
        x_scale: (p.d1 / p.r).sqrt(),
        u_scale: 1.0,
        v_scale: p.h,
    };
    Ok((params, scales))
}

/// Pointwise residuals `(S1, S2)` of the system evaluated on a jet.
pub fn residual(params: &ModelParams, jet: &Jet) -> Result<(f64, f64)> {
    if !jet.is_finite() {
        return Err(Error::NonFinite("jet entry".into()));
    }
    guard_denominators(params, jet.u)?;
    let s1 = jet.uxx - jet.ut + jet.u * (1.0 - params.r * jet.v / (jet.u + params.a));
    let s2 = params.d * jet.vxx - jet.vt + params.s * jet.v * (1.0 - jet.v / jet.u);
    Ok((s1, s2))
}

/// Reaction terms `f = u (1 - R v/(u+A))`, `g = S v (1 - v/u)` used by the
/// method-of-lines solver.
pub fn reaction_rhs(params: &ModelParams, u: f64, v: f64) -> Result<(f64, f64)> {
    guard_denominators(params, u)?;
    Ok((
        u * (1.0 - params.r * v / (u + params.a)),
        params.s * v * (1.0 - v / u),
    ))
}

fn guard_denominators(params: &ModelParams, u: f64) -> Result<()> {
    if u.abs() < DENOMINATOR_FLOOR {
        return Err(Error::SingularDenominator {
            what: "u",
            value: u.abs(),
            floor: DENOMINATOR_FLOOR,
        });
    }
    if (u + params.a).abs() < DENOMINATOR_FLOOR {
        return Err(Error::SingularDenominator {
            what: "u + A",
            value: (u + params.a).abs(),
            floor: DENOMINATOR_FLOOR,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_parameters_map_to_identity() {
        let p = DimensionalParams {
            d1: 1.0,
            d2: 1.0,
            r: 1.0,
            q: 1.0,
            a0: 0.0,
            s: 1.0,
            h: 1.0,
        };
        let (m, sc) = nondimensionalize(&p).unwrap();
        assert_eq!((m.a, m.r, m.s, m.d), (0.0, 1.0, 1.0, 1.0));
        assert_eq!(
            (sc.t_scale, sc.x_scale, sc.u_scale, sc.v_scale),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn mixed_parameters_map_correctly() {
        let p = DimensionalParams {
            d1: 4.0,
            d2: 2.0,
            r: 2.0,
            q: 3.0,
            a0: 1.0,
            s: 1.0,
            h: 2.0,
        };
        let (m, sc) = nondimensionalize(&p).unwrap();
        assert_eq!((m.a, m.r, m.s, m.d), (1.0, 3.0, 0.5, 0.5));
        assert_abs_diff_eq!(sc.t_scale, 0.5);
        assert_abs_diff_eq!(sc.x_scale, 2.0_f64.sqrt());
        assert_eq!(sc.v_scale, 2.0);
    }

    #[test]
    fn zero_growth_rate_is_rejected() {
        let p = DimensionalParams {
            d1: 1.0,
            d2: 1.0,
            r: 0.0,
            q: 1.0,
            a0: 0.0,
            s: 1.0,
            h: 1.0,
        };
        let err = nondimensionalize(&p).unwrap_err();
        assert!(err.to_string().contains("`r`"), "{err}");
    }

    #[test]
    fn steady_state_has_zero_residual() {
        // u = v = A/(R-1) is a spatially constant equilibrium.
        let params = ModelParams::new(1.0, 2.0, 3.0, 1.0).unwrap();
        let jet = Jet {
            u: 1.0,
            v: 1.0,
            ut: 0.0,
            vt: 0.0,
            ux: 0.0,
            vx: 0.0,
            uxx: 0.0,
            vxx: 0.0,
        };
        assert_eq!(residual(&params, &jet).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn pure_exponential_growth_is_exact_for_zero_saturation() {
        // u = e^t, v = 0 solves the system with A = 0.
        let params = ModelParams::new(0.0, 1.5, 2.0, 3.0).unwrap();
        let et = 0.37_f64.exp();
        let jet = Jet {
            u: et,
            v: 0.0,
            ut: et,
            vt: 0.0,
            ux: 0.0,
            vx: 0.0,
            uxx: 0.0,
            vxx: 0.0,
        };
        let (s1, s2) = residual(&params, &jet).unwrap();
        assert_eq!((s1, s2), (0.0, 0.0));
    }

    #[test]
    fn residual_is_additive_in_derivative_entries() {
        let params = ModelParams::new(0.5, 2.0, 3.0, 0.7).unwrap();
        let base = Jet {
            u: 1.3,
            v: 0.4,
            ut: 0.2,
            vt: -0.1,
            ux: 0.5,
            vx: 0.6,
            uxx: -0.3,
            vxx: 0.9,
        };
        let mut doubled = base;
        doubled.ut *= 2.0;
        doubled.vt *= 2.0;
        doubled.uxx *= 2.0;
        doubled.vxx *= 2.0;
        let mut frozen = base;
        frozen.ut = 0.0;
        frozen.vt = 0.0;
        frozen.uxx = 0.0;
        frozen.vxx = 0.0;
        let (s1, s2) = residual(&params, &base).unwrap();
        let (d1, d2) = residual(&params, &doubled).unwrap();
        let (z1, z2) = residual(&params, &frozen).unwrap();
        // Doubling the derivative entries doubles the derivative part.
        assert_abs_diff_eq!(d1 - z1, 2.0 * (s1 - z1), epsilon = 1e-14);
        assert_abs_diff_eq!(d2 - z2, 2.0 * (s2 - z2), epsilon = 1e-14);
    }

    #[test]
    fn singular_denominator_is_an_error() {
        let params = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let jet = Jet {
            u: 0.0,
            v: 1.0,
            ut: 0.0,
            vt: 0.0,
            ux: 0.0,
            vx: 0.0,
            uxx: 0.0,
            vxx: 0.0,
        };
        assert!(residual(&params, &jet).is_err());
        assert!(reaction_rhs(&params, 0.0, 1.0).is_err());
        // u = -A also hits a singular denominator.
        let params = ModelParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert!(reaction_rhs(&params, -2.0, 1.0).is_err());
    }

    #[test]
    fn reaction_rhs_matches_direct_substitution() {
        let params = ModelParams::new(1.0, 2.0, 3.0, 1.0).unwrap();
        assert_eq!(reaction_rhs(&params, 1.0, 1.0).unwrap(), (0.0, 0.0));
        let params = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(reaction_rhs(&params, 2.0, 0.0).unwrap(), (2.0, 0.0));
        let params = ModelParams::new(0.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(reaction_rhs(&params, 1.0, 1.0).unwrap(), (-1.0, 0.0));
    }
}
