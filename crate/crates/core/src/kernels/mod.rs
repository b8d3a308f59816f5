//! Dense numerical kernels shared by the propagators and oracles.

mod bessel;
mod expm;
mod ode;

pub use bessel::bessel_j;
pub use expm::{expm, expm_unscaled};
pub use ode::{integrate_linear, IntegratorOptions, IntegratorStats};

use nalgebra::DMatrix;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix, column-major.
pub type ComplexMatrix = DMatrix<C64>;

/// `max` that keeps NaN.
pub(crate) fn nan_max(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

/// Largest entry modulus; NaN if any entry is NaN.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| nan_max(acc, z.norm()))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| nan_max(acc, (x - y).norm()))
}

pub(crate) fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Induced 1-norm (max column sum).
pub(crate) fn norm1(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
