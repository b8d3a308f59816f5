use crate::{Error, Result};

const MAX_ORDER: u32 = 60;
const MAX_ARG: f64 = 50.0;
const SERIES_LIMIT: f64 = 2.0;
const RESCALE_ABOVE: f64 = 1e200;

/// Bessel function of the first kind `J_n(x)` for integer `0 <= n <= 60`
/// and `|x| <= 50`.
///
/// Small arguments use the ascending series; everything else uses Miller's
/// downward recurrence normalised by `J_0 + 2 Σ J_2k = 1`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "bessel order {order} exceeds {MAX_ORDER}"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_ARG {
        return Err(Error::InvalidArgument(format!(
            "bessel argument {x} outside [-{MAX_ARG}, {MAX_ARG}]"
        )));
    }
    let sign = if x < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let value = if ax == 0.0 {
        if order == 0 {
            1.0
        } else {
            0.0
        }
    } else if ax <= SERIES_LIMIT {
        ascending_series(order, ax)
    } else {
        miller(order, ax)
    };
    Ok(sign * value)
}

fn ascending_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut term = (1..=n).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    let q = -half * half;
    for k in 1..200u32 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let start = 2 * ((top + (160.0 * top).sqrt()) as usize / 2 + 10);

    let mut above = 0.0f64; // J_{k+1}
    let mut current = 1e-30f64; // J_k
    let mut wanted = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k == n as usize {
            wanted = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            above /= RESCALE_ABOVE;
            current /= RESCALE_ABOVE;
            wanted /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
        }
    }
    // `current` now holds J_0.
    norm += current;
    if n == 0 {
        wanted = current;
    }
    wanted / norm
}
