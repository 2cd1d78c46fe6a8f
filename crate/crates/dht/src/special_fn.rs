//! Self-contained Airy function evaluation.
//!
//! `Ai` and `Bi` (with first derivatives) are computed from the Maclaurin
//! series about 0 on a central window and from the standard asymptotic
//! expansions outside it. The switch points are asymmetric: the Maclaurin
//! series loses relative accuracy for `Ai` much earlier on the positive axis
//! (catastrophic cancellation against the dominant `Bi`-like growth) than the
//! oscillatory series does on the negative axis.

use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Ai(0) = 3^{-2/3} / Gamma(2/3).
const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai'(0) = -3^{-1/3} / Gamma(1/3).
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Maclaurin window: [-MACLAURIN_NEG, MACLAURIN_POS]; asymptotics outside.
const MACLAURIN_NEG: f64 = 7.0;
const MACLAURIN_POS: f64 = 6.0;

/// Ai, Bi, and their derivatives at one argument.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AiryPair {
    pub ai: f64,
    pub bi: f64,
    pub ai_prime: f64,
    pub bi_prime: f64,
    /// True when `bi`/`bi_prime` overflowed to +infinity for large positive
    /// argument; `ai`/`ai_prime` stay accurate.
    pub saturated: bool,
}

/// Evaluates the Airy functions of the first and second kind.
///
/// Accuracy target on `z` in `[-12, 8]`: absolute error <= 1e-10 where the
/// result magnitude is <= 1, relative error <= 1e-9 otherwise.
pub fn airy(z: f64) -> Result<AiryPair> {
    if !z.is_finite() {
        return Err(Error::NonFinite(format!("airy argument {z}")));
    }
    if (-MACLAURIN_NEG..=MACLAURIN_POS).contains(&z) {
        Ok(airy_maclaurin(z))
    } else if z > 0.0 {
        Ok(airy_asymptotic_pos(z))
    } else {
        Ok(airy_asymptotic_neg(z))
    }
}

/// `arcsinh(z) = ln(z + sqrt(z^2 + 1))`.
pub fn arcsinh(z: f64) -> f64 {
    z.asinh()
}

/// Maclaurin series: with `f`, `g` the two standard solutions of `w'' = z w`
/// normalized by `f(0)=1, f'(0)=0` and `g(0)=0, g'(0)=1`,
/// `Ai = Ai(0) f + Ai'(0) g` and `Bi = sqrt(3) (Ai(0) f - Ai'(0) g)`.
fn airy_maclaurin(z: f64) -> AiryPair {
    let z3 = z * z * z;
    // Terms of f, g and of their derivatives.
    let mut tf = 1.0;
    let mut tg = z;
    let mut tfp = 0.0;
    let mut tgp = 1.0;
    let (mut f, mut g, mut fp, mut gp) = (tf, tg, tfp, tgp);
    for k in 0..200usize {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        // d/dz of the f-series term; the k = 0 term of f' vanishes, so the
        // first derivative term is seeded directly.
        if k == 0 {
            tfp = z * z / 2.0;
        } else {
            tfp *= z3 * (kf + 1.0) / (kf * (3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        }
        tgp *= z3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let scale = f.abs().max(g.abs()).max(1.0);
        if tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs()) < 1e-18 * scale {
            break;
        }
    }
    let sq3 = 3.0_f64.sqrt();
    AiryPair {
        ai: AI0 * f + AIP0 * g,
        bi: sq3 * (AI0 * f - AIP0 * g),
        ai_prime: AI0 * fp + AIP0 * gp,
        bi_prime: sq3 * (AI0 * fp - AIP0 * gp),
        saturated: false,
    }
}

/// Coefficients u_k, v_k of the large-argument expansions; u_0 = v_0 = 1,
/// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)), v_k = u_k (6k+1)/(1-6k).
fn asymptotic_coeffs(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..=n {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * kf * (2.0 * kf - 1.0));
        u.push(uk);
        v.push(uk * (6.0 * kf + 1.0) / (1.0 - 6.0 * kf));
    }
    (u, v)
}

/// Sums `sum_k coeff_k sign^k / zeta^k`, truncating at the smallest term.
fn asymptotic_sum(coeffs: &[f64], zeta: f64, sign: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            term *= sign / zeta;
        }
        let t = c * term;
        if t.abs() > prev {
            break;
        }
        sum += t;
        prev = t.abs();
        if t.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

fn airy_asymptotic_pos(z: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (u, v) = asymptotic_coeffs(40);
    let root = z.powf(0.25);
    let pre_ai = (-zeta).exp() / (2.0 * PI.sqrt() * root);
    let ai = pre_ai * asymptotic_sum(&u, zeta, -1.0);
    let ai_prime = -root * (-zeta).exp() / (2.0 * PI.sqrt()) * asymptotic_sum(&v, zeta, -1.0);
    // Bi grows like e^zeta and overflows near zeta ~ 709.
    let (bi, bi_prime, saturated) = if zeta > 700.0 {
        (f64::INFINITY, f64::INFINITY, true)
    } else {
        (
            zeta.exp() / (PI.sqrt() * root) * asymptotic_sum(&u, zeta, 1.0),
            root * zeta.exp() / PI.sqrt() * asymptotic_sum(&v, zeta, 1.0),
            false,
        )
    };
    AiryPair {
        ai,
        bi,
        ai_prime,
        bi_prime,
        saturated,
    }
}

fn airy_asymptotic_neg(z: f64) -> AiryPair {
    let t = -z;
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let (u, v) = asymptotic_coeffs(40);
    // Even/odd split with alternating signs: sum_k (-1)^k c_{2k} / zeta^{2k}
    // and sum_k (-1)^k c_{2k+1} / zeta^{2k+1}.
    let split = |c: &[f64]| -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        let mut pow = 1.0;
        let mut prev = f64::INFINITY;
        for (k, &ck) in c.iter().enumerate() {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * ck * pow;
            if term.abs() > prev {
                break;
            }
            if k % 2 == 0 {
                even += term;
            } else {
                odd += term;
            }
            prev = term.abs();
            pow /= zeta;
            if term.abs() < 1e-18 {
                break;
            }
        }
        (even, odd)
    };
    let (ue, uo) = split(&u);
    let (ve, vo) = split(&v);
    let root = t.powf(0.25);
    let (sin_p, cos_p) = (zeta + PI / 4.0).sin_cos();
    let pre = 1.0 / (PI.sqrt() * root);
    AiryPair {
        ai: pre * (sin_p * ue - cos_p * uo),
        bi: pre * (cos_p * ue + sin_p * uo),
        ai_prime: -root / PI.sqrt() * (cos_p * ve + sin_p * vo),
        bi_prime: root / PI.sqrt() * (sin_p * ve - cos_p * vo),
        saturated: false,
    }
}
