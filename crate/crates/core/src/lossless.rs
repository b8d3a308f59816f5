//! Input–output Bogoliubov matrices of the lossless array,
//! `a(t) = A a(0) + B a†(0)`.

use log::warn;

use crate::kernels::{bessel_j, expm, max_abs, ComplexMatrix, C64};
use crate::model::{build_drift, build_generator, ArrayConfig, ModeIndex};
use crate::{Error, Result};

/// Symplectic residuals above this are treated as numerical breakdown.
pub const BREAKDOWN_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovPropagator {
    a: ComplexMatrix,
    b: ComplexMatrix,
    time: f64,
}

impl BogoliubovPropagator {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, time: f64) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Dimension(format!(
                "A is {:?}, B is {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(Self { a, b, time })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            a: ComplexMatrix::identity(n_modes, n_modes),
            b: ComplexMatrix::zeros(n_modes, n_modes),
            time: 0.0,
        }
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_modes(&self) -> usize {
        self.a.nrows()
    }

    /// The full map on `(a; a†)`: `[[A, B], [B*, A*]]`.
    pub fn full_matrix(&self) -> ComplexMatrix {
        let n = self.n_modes();
        let mut f = ComplexMatrix::zeros(2 * n, 2 * n);
        f.view_mut((0, 0), (n, n)).copy_from(&self.a);
        f.view_mut((0, n), (n, n)).copy_from(&self.b);
        f.view_mut((n, 0), (n, n))
            .copy_from(&self.b.map(|z| z.conj()));
        f.view_mut((n, n), (n, n))
            .copy_from(&self.a.map(|z| z.conj()));
        f
    }

    /// Read `A`, `B` from the top block row of a full `2N×2N` map.
    pub fn from_full_matrix(full: &ComplexMatrix, time: f64) -> Result<Self> {
        if !full.is_square() || !full.nrows().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "full map must be 2N×2N, got {:?}",
                full.shape()
            )));
        }
        let n = full.nrows() / 2;
        Ok(Self {
            a: full.view((0, 0), (n, n)).into_owned(),
            b: full.view((0, n), (n, n)).into_owned(),
            time,
        })
    }

    /// Evolve for `self.time`, then for `later.time`.
    pub fn then(&self, later: &Self) -> Result<Self> {
        if self.n_modes() != later.n_modes() {
            return Err(Error::Dimension(
                "propagators act on different mode counts".into(),
            ));
        }
        // Heisenberg maps compose in the order of application to the initial operators.
        let full = self.full_matrix() * later.full_matrix();
        Self::from_full_matrix(&full, self.time + later.time)
    }
}

/// Compute `A(t)`, `B(t)` from `exp(S t)`.
pub fn propagate(config: &ArrayConfig, t: f64) -> Result<BogoliubovPropagator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "propagation time must be finite and >= 0, got {t}"
        )));
    }
    if config.loss_rate() != 0.0 {
        warn!(
            "lossless propagator ignores loss_rate = {}",
            config.loss_rate()
        );
    }
    let generator = build_generator(&build_drift(config));
    let full = expm(generator.matrix(), t)?;
    let prop = BogoliubovPropagator::from_full_matrix(&full, t)?;
    let (r1, r2) = symplectic_residual(&prop);
    let residual = crate::kernels::nan_max(r1, r2);
    if residual.is_nan() || residual > BREAKDOWN_RESIDUAL {
        return Err(Error::SymplecticBreakdown {
            residual,
            limit: BREAKDOWN_RESIDUAL,
            t,
        });
    }
    Ok(prop)
}

/// Max-norm of `A A† − B B† − I` and of `A Bᵀ − B Aᵀ`.
pub fn symplectic_residual(p: &BogoliubovPropagator) -> (f64, f64) {
    let n = p.n_modes();
    let commutator = &p.a * p.a.adjoint() - &p.b * p.b.adjoint() - ComplexMatrix::identity(n, n);
    let cross = &p.a * p.b.transpose() - &p.b * p.a.transpose();
    (max_abs(&commutator), max_abs(&cross))
}

/// Infinite-lattice amplitude `i^{|j−k|} J_{|j−k|}(2 J t)` of the uniform
/// linear chain (`g = 0`).
pub fn walk_amplitude_oracle(j: ModeIndex, k: ModeIndex, coupling: f64, t: f64) -> Result<C64> {
    let d = j.get().abs_diff(k.get());
    let order = u32::try_from(d)
        .map_err(|_| Error::InvalidArgument(format!("site separation {d} too large")))?;
    let value = bessel_j(order, 2.0 * coupling * t)?;
    Ok(C64::i().powu(order) * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_time_is_identity() {
        let cfg = ArrayConfig::uniform(5, 0.3, 1.0, 0.0).unwrap();
        let p = propagate(&cfg, 0.0).unwrap();
        assert_eq!(p, BogoliubovPropagator::identity(5));
    }

    #[test]
    fn single_squeezer() {
        let cfg = ArrayConfig::uniform(1, 0.5, 0.0, 0.0).unwrap();
        for t in [0.1, 0.7, 1.0, 2.5] {
            let p = propagate(&cfg, t).unwrap();
            assert!((p.a()[(0, 0)] - c(t.cosh(), 0.0)).norm() < 1e-13 * t.cosh());
            assert!((p.b()[(0, 0)] - c(0.0, -t.sinh())).norm() < 1e-13 * t.cosh());
        }
    }

    #[test]
    fn linear_coupler() {
        let cfg = ArrayConfig::uniform(2, 0.0, 1.0, 0.0).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let p = propagate(&cfg, t).unwrap();
            let want = ComplexMatrix::from_row_slice(
                2,
                2,
                &[
                    c(t.cos(), 0.0),
                    c(0.0, t.sin()),
                    c(0.0, t.sin()),
                    c(t.cos(), 0.0),
                ],
            );
            assert!(max_abs_diff(p.a(), &want) < 1e-14);
            assert_eq!(max_abs(p.b()), 0.0);
        }
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            symplectic_residual(&BogoliubovPropagator::identity(3)),
            (0.0, 0.0)
        );

        let t = 1.0f64;
        let a = ComplexMatrix::from_element(1, 1, c(t.cosh(), 0.0));
        let b = ComplexMatrix::from_element(1, 1, c(0.0, -t.sinh()));
        let exact = BogoliubovPropagator::new(a.clone(), b.clone(), t).unwrap();
        let (r1, r2) = symplectic_residual(&exact);
        assert!(r1 <= 1e-12 && r2 <= 1e-12);

        // (1.21 − 1) cosh²(1) ≈ 0.4999
        let corrupted = BogoliubovPropagator::new(a * c(1.1, 0.0), b, t).unwrap();
        let (r1, _) = symplectic_residual(&corrupted);
        assert!(r1 >= 0.2, "{r1}");
        assert!((r1 - 0.21 * t.cosh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn composition_matches_direct_propagation() {
        let cfg = ArrayConfig::new(3, vec![0.2, 0.1, 0.3], vec![1.0, 0.7], 0.0).unwrap();
        let p1 = propagate(&cfg, 0.8).unwrap();
        let p2 = propagate(&cfg, 1.7).unwrap();
        let direct = propagate(&cfg, 2.5).unwrap();
        let composed = p1.then(&p2).unwrap();
        assert!(max_abs_diff(composed.a(), direct.a()) < 1e-9);
        assert!(max_abs_diff(composed.b(), direct.b()) < 1e-9);
        assert_eq!(composed.time(), 2.5);
    }

    #[test]
    fn walk_oracle_examples() {
        let one = ModeIndex::new(1).unwrap();
        let two = ModeIndex::new(2).unwrap();
        assert_eq!(
            walk_amplitude_oracle(one, one, 1.0, 0.0).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            walk_amplitude_oracle(one, two, 1.0, 0.0).unwrap().norm(),
            0.0
        );
        let v = walk_amplitude_oracle(one, one, 1.0, 1.0).unwrap();
        assert!((v - c(0.223_890_779_141_235_67, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        let cfg = ArrayConfig::uniform(2, 0.1, 1.0, 0.0).unwrap();
        assert!(propagate(&cfg, -1.0).is_err());
    }

    #[test]
    fn breakdown_is_reported_at_extreme_gain() {
        // cosh(2gt) ~ e^{40}: the commutator residual can no longer be resolved.
        let cfg = ArrayConfig::uniform(2, 10.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            propagate(&cfg, 2.0),
            Err(Error::SymplecticBreakdown { .. })
        ));
    }
}
