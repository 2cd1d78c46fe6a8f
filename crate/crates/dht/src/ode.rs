//! Adaptive explicit Runge-Kutta integration for the ODE reductions.
//!
//! Dormand-Prince 5(4) with PI-free step control and a stored trajectory
//! that supports cubic Hermite dense output. Integration runs in either
//! direction; the step sign follows `t_end - t0`.

use crate::error::{Error, Result};

/// Tolerances and limits. Defaults: reltol 1e-9, abstol 1e-12.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub reltol: f64,
    pub abstol: f64,
    pub max_steps: usize,
    /// Solution-magnitude bound treated as finite-time blow-up.
    pub blowup: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            reltol: 1e-9,
            abstol: 1e-12,
            max_steps: 1_000_000,
            blowup: 1e12,
        }
    }
}

/// One accepted step endpoint: abscissa, state, and derivative.
#[derive(Debug, Clone)]
struct Node {
    t: f64,
    y: Vec<f64>,
    f: Vec<f64>,
}

/// Accepted integration path with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    nodes: Vec<Node>,
    forward: bool,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.nodes.first().expect("nonempty trajectory").t
    }

    pub fn end(&self) -> f64 {
        self.nodes.last().expect("nonempty trajectory").t
    }

    pub fn final_state(&self) -> &[f64] {
        &self.nodes.last().expect("nonempty trajectory").y
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Cubic Hermite interpolation between the accepted nodes.
    pub fn sample(&self, t: f64) -> Result<Vec<f64>> {
        let (lo, hi) = if self.forward {
            (self.start(), self.end())
        } else {
            (self.end(), self.start())
        };
        // Tolerate round-off at the span ends.
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if t < lo - pad || t > hi + pad {
            return Err(Error::IntegrationFailure {
                at: t,
                reason: format!("sample point outside the integrated span [{lo}, {hi}]"),
            });
        }
        let idx = self
            .nodes
            .windows(2)
            .position(|w| {
                if self.forward {
                    t <= w[1].t
                } else {
                    t >= w[1].t
                }
            })
            .unwrap_or(self.nodes.len() - 2);
        let a = &self.nodes[idx];
        let b = &self.nodes[idx + 1];
        let h = b.t - a.t;
        if h == 0.0 {
            return Ok(a.y.clone());
        }
        let s = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok((0..a.y.len())
            .map(|i| h00 * a.y[i] + h10 * h * a.f[i] + h01 * b.y[i] + h11 * h * b.f[i])
            .collect())
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order weights (same as the last A row; FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// 4th-order embedded weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end` (either direction).
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], t_end: f64, opts: &OdeOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let forward = t_end >= t0;
    let dir = if forward { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut f0 = vec![0.0; n];
    rhs(t0, y0, &mut f0)?;
    let mut nodes = vec![Node {
        t: t0,
        y: y0.to_vec(),
        f: f0,
    }];
    if span == 0.0 {
        return Ok(Trajectory { nodes, forward });
    }
    let mut h = dir * (span / 100.0).min(1e-2).max(1e-10);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(&nodes[0].f);
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                at: t,
                reason: format!("step limit {} exhausted", opts.max_steps),
            });
        }
        steps += 1;
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        // Stages; stage 0 reuses the stored derivative (FSAL).
        let mut stage_fail = false;
        for s in 1..7 {
            let ts = t + C[s] * h;
            let mut ys = y.clone();
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *yi += h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if rhs(ts, &ys, &mut tail[0]).is_err() {
                stage_fail = true;
                break;
            }
            if tail[0].iter().any(|v| !v.is_finite()) {
                stage_fail = true;
                break;
            }
        }
        if stage_fail {
            h *= 0.25;
            if h.abs() < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::IntegrationFailure {
                    at: t,
                    reason: "right-hand side failed at a vanishing step (pole or domain edge)"
                        .into(),
                });
            }
            continue;
        }
        let mut y5 = y.clone();
        let mut err = 0.0_f64;
        for i in 0..n {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for s in 0..7 {
                acc5 += B5[s] * k[s][i];
                acc4 += B4[s] * k[s][i];
            }
            y5[i] += h * acc5;
            let sc = opts.abstol + opts.reltol * y[i].abs().max(y5[i].abs());
            let e = h * (acc5 - acc4) / sc;
            err += e * e;
        }
        let err = (err / n as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y = y5;
            if y.iter().any(|v| !v.is_finite() || v.abs() > opts.blowup) {
                return Err(Error::IntegrationFailure {
                    at: t,
                    reason: format!("solution magnitude exceeded {:e} (blow-up)", opts.blowup),
                });
            }
            // FSAL: stage 6 derivative is the derivative at the new point.
            let f_new = k[6].clone();
            nodes.push(Node {
                t,
                y: y.clone(),
                f: f_new.clone(),
            });
            k[0] = f_new;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::IntegrationFailure {
                at: t,
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(Trajectory { nodes, forward })
}
