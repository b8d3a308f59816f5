//! Dormand–Prince 5(4) for autonomous complex systems `y' = f(y)`.

use super::C64;
use crate::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Per-step error bound. Component `i` of the local error estimate must
    /// satisfy `|e_i| <= tol * (1 + max(|y_i|, |y_new_i|))`.
    pub tol: f64,
    pub max_steps: usize,
    /// Optional cap on the step size.
    pub max_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_steps: 2_000_000,
            max_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Advance `y0` by time `t` under `y' = f(y)`.
///
/// `rhs(y, dy)` must overwrite `dy` with `f(y)`. The map is expected to be
/// linear or affine and time independent.
pub fn integrate_linear<F>(
    rhs: F,
    y0: &[C64],
    t: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<C64>, IntegratorStats)>
where
    F: Fn(&[C64], &mut [C64]),
{
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integrator tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration time must be finite and >= 0, got {t}"
        )));
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut stats = IntegratorStats::default();
    if t == 0.0 || dim == 0 {
        return Ok((y, stats));
    }

    let mut k = vec![vec![C64::default(); dim]; 7];
    let mut ytmp = vec![C64::default(); dim];
    let mut ynew = vec![C64::default(); dim];

    rhs(&y, &mut k[0]);
    stats.evaluations += 1;

    let mut h = initial_step(&y, &k[0], t, opts);
    let h_min = 1e-14 * t.max(1.0);
    let mut elapsed = 0.0;
    let mut last_accepted = true;

    while elapsed < t {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepLimit(opts.max_steps));
        }
        let remaining = t - elapsed;
        let final_step = h >= remaining;
        if final_step {
            h = remaining;
        }

        stage(&y, &[(A21, &k[0])], h, &mut ytmp);
        rhs(&ytmp, &mut k[1]);
        stage(&y, &[(A31, &k[0]), (A32, &k[1])], h, &mut ytmp);
        rhs(&ytmp, &mut k[2]);
        stage(
            &y,
            &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])],
            h,
            &mut ytmp,
        );
        rhs(&ytmp, &mut k[3]);
        stage(
            &y,
            &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])],
            h,
            &mut ytmp,
        );
        rhs(&ytmp, &mut k[4]);
        stage(
            &y,
            &[
                (A61, &k[0]),
                (A62, &k[1]),
                (A63, &k[2]),
                (A64, &k[3]),
                (A65, &k[4]),
            ],
            h,
            &mut ytmp,
        );
        rhs(&ytmp, &mut k[5]);
        stage(
            &y,
            &[
                (A71, &k[0]),
                (A73, &k[2]),
                (A74, &k[3]),
                (A75, &k[4]),
                (A76, &k[5]),
            ],
            h,
            &mut ynew,
        );
        rhs(&ynew, &mut k[6]);
        stats.evaluations += 6;

        let mut err = 0.0f64;
        for i in 0..dim {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let scale = opts.tol * (1.0 + y[i].norm().max(ynew[i].norm()));
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Divergence { t: elapsed });
        }

        if err <= 1.0 {
            elapsed = if final_step { t } else { elapsed + h };
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            stats.accepted += 1;
            if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Divergence { t: elapsed });
            }
            let mut factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last_accepted {
                factor = factor.min(1.0);
            }
            h *= factor;
            last_accepted = true;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            last_accepted = false;
            if h < h_min {
                return Err(Error::StepUnderflow {
                    t: elapsed,
                    step: h,
                });
            }
        }
        if let Some(cap) = opts.max_step {
            h = h.min(cap);
        }
    }
    Ok((y, stats))
}

fn stage(y: &[C64], terms: &[(f64, &Vec<C64>)], h: f64, out: &mut [C64]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        let w = a * h;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += w * ki;
        }
    }
}

fn initial_step(y: &[C64], f0: &[C64], t: f64, opts: &IntegratorOptions) -> f64 {
    let scale = |z: &C64| opts.tol * (1.0 + z.norm());
    let d0 = y.iter().map(|z| z.norm() / scale(z)).fold(0.0, f64::max);
    let d1 = y
        .iter()
        .zip(f0)
        .map(|(z, f)| f.norm() / scale(z))
        .fold(0.0, f64::max);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h = h.max(1e-3 * opts.tol.powf(0.2)).min(t);
    match opts.max_step {
        Some(cap) => h.min(cap),
        None => h,
    }
}
