//! Gaussian moment evolution under the Heisenberg drift plus uniform
//! zero-temperature photon loss.
//!
//! For the Lindblad dissipator `γ Σ_j D[a_j]` and quadratic Hamiltonian the
//! moments obey a closed affine system:
//!
//! ```text
//! dα/dt = (iK − γ/2) α − 2i G α*
//! dn/dt = −i[K, n] + 2i (G m − m* G) − γ n
//! dm/dt = i (K m + m K) − 2i (G n + nᵀ G + G) − γ m
//! ```
//!
//! with `α_j = ⟨a_j⟩`, `n_jk = ⟨a_j† a_k⟩`, `m_jk = ⟨a_j a_k⟩`. The constant
//! `−2iG` term is the vacuum seed of spontaneous down-conversion.

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::kernels::{
    integrate_linear, max_abs_diff, nan_max, ComplexMatrix, IntegratorOptions, C64,
};
use crate::lossless::{propagate, BogoliubovPropagator};
use crate::model::{build_drift, ArrayConfig, ModeIndex};
use crate::observables::{quadrature_covariance, symplectic_eigenvalues};
use crate::{Error, Result};

/// Allowed dip of the smallest symplectic eigenvalue below 1/2, relative to
/// the largest covariance entry (at least 1).
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub alpha: DVector<C64>,
    pub normal: ComplexMatrix,
    pub anomalous: ComplexMatrix,
    pub time: f64,
}

impl MomentState {
    pub fn new(
        alpha: DVector<C64>,
        normal: ComplexMatrix,
        anomalous: ComplexMatrix,
        time: f64,
    ) -> Result<Self> {
        let n = alpha.len();
        if normal.shape() != (n, n) || anomalous.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "alpha has {n} entries but normal is {:?} and anomalous is {:?}",
                normal.shape(),
                anomalous.shape()
            )));
        }
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "state time must be finite and >= 0, got {time}"
            )));
        }
        Ok(Self {
            alpha,
            normal,
            anomalous,
            time,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.alpha.len()
    }

    /// Largest deviation of `n` from Hermitian and of `m` from symmetric.
    pub fn structure_residual(&self) -> f64 {
        max_abs_diff(&self.normal, &self.normal.adjoint())
            .max(max_abs_diff(&self.anomalous, &self.anomalous.transpose()))
    }

    /// Total photon number `Σ_j ⟨a_j† a_j⟩`.
    pub fn photon_number(&self) -> f64 {
        self.normal.diagonal().iter().map(|z| z.re).sum()
    }

    /// Entrywise largest difference over all three moment blocks.
    pub fn max_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.n_modes(), other.n_modes());
        let da = self
            .alpha
            .iter()
            .zip(other.alpha.iter())
            .fold(0.0f64, |acc, (x, y)| nan_max(acc, (x - y).norm()));
        let dn = nan_max(da, max_abs_diff(&self.normal, &other.normal));
        nan_max(dn, max_abs_diff(&self.anomalous, &other.anomalous))
    }

    /// Moments after the Heisenberg map `a → A a + B a†` acts on this state.
    pub fn transformed_by(&self, p: &BogoliubovPropagator) -> Result<Self> {
        let n = self.n_modes();
        if p.n_modes() != n {
            return Err(Error::Dimension(format!(
                "propagator acts on {} modes, state has {n}",
                p.n_modes()
            )));
        }
        let a = p.a();
        let b = p.b();
        let a_conj = a.map(|z| z.conj());
        let b_conj = b.map(|z| z.conj());
        let at = a.transpose();
        let bt = b.transpose();
        let m_conj = self.anomalous.map(|z| z.conj());
        // ⟨a_l a_k†⟩ = δ_lk + n_kl
        let anti = ComplexMatrix::identity(n, n) + self.normal.transpose();

        let alpha = a * &self.alpha + b * self.alpha.map(|z| z.conj());
        let normal = &a_conj * &self.normal * &at
            + &a_conj * &m_conj * &bt
            + &b_conj * &self.anomalous * &at
            + &b_conj * &anti * &bt;
        let anomalous = a * &self.anomalous * &at
            + a * &anti * &bt
            + b * &self.normal * &at
            + b * &m_conj * &bt;
        Self::new(alpha, normal, anomalous, self.time + p.time())
    }

    fn pack(&self) -> Vec<C64> {
        let n = self.n_modes();
        let mut y = Vec::with_capacity(n + 2 * n * n);
        y.extend(self.alpha.iter());
        y.extend(self.normal.iter());
        y.extend(self.anomalous.iter());
        y
    }

    fn unpack(n: usize, y: &[C64], time: f64) -> Result<Self> {
        let nn = n * n;
        Self::new(
            DVector::from_column_slice(&y[..n]),
            DMatrix::from_column_slice(n, n, &y[n..n + nn]),
            DMatrix::from_column_slice(n, n, &y[n + nn..]),
            time,
        )
    }
}

pub fn vacuum_state(n_modes: usize) -> Result<MomentState> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument(
            "vacuum state needs at least one mode".into(),
        ));
    }
    MomentState::new(
        DVector::zeros(n_modes),
        ComplexMatrix::zeros(n_modes, n_modes),
        ComplexMatrix::zeros(n_modes, n_modes),
        0.0,
    )
}

/// Coherent amplitude `amplitude` in waveguide `site`, vacuum elsewhere.
pub fn coherent_state(n_modes: usize, site: ModeIndex, amplitude: C64) -> Result<MomentState> {
    let j = site.checked(n_modes)?;
    if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
        return Err(Error::NonFinite("coherent amplitude"));
    }
    let mut state = vacuum_state(n_modes)?;
    state.alpha[j] = amplitude;
    state.normal[(j, j)] = C64::from(amplitude.norm_sqr());
    state.anomalous[(j, j)] = amplitude * amplitude;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub integrator: IntegratorOptions,
    pub check_physicality: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            check_physicality: true,
        }
    }
}

impl EvolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            integrator: IntegratorOptions::with_tol(tol),
            ..Self::default()
        }
    }
}

/// Advance `state` to absolute time `t` with default options.
pub fn evolve(config: &ArrayConfig, state: &MomentState, t: f64) -> Result<MomentState> {
    evolve_with(config, state, t, &EvolveOptions::default())
}

pub fn evolve_with(
    config: &ArrayConfig,
    state: &MomentState,
    t: f64,
    opts: &EvolveOptions,
) -> Result<MomentState> {
    let n = config.n_modes();
    if state.n_modes() != n {
        return Err(Error::Dimension(format!(
            "config has {n} modes, state has {}",
            state.n_modes()
        )));
    }
    if !(t >= state.time && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target time {t} precedes state time {}",
            state.time
        )));
    }
    let rhs = MomentRhs::new(config);
    let start = state.time;
    let (y, _) = integrate_linear(
        |y, dy| rhs.eval(y, dy),
        &state.pack(),
        t - start,
        &opts.integrator,
    )
    .map_err(|e| match e {
        Error::StepUnderflow { t, step } => Error::StepUnderflow { t: start + t, step },
        Error::Divergence { t } => Error::Divergence { t: start + t },
        other => other,
    })?;
    let out = MomentState::unpack(n, &y, t)?;
    if opts.check_physicality {
        check_physical(&out)?;
    }
    Ok(out)
}

/// Reject states whose covariance violates the uncertainty principle beyond
/// [`PHYSICALITY_TOL`].
pub fn check_physical(state: &MomentState) -> Result<()> {
    let cov = quadrature_covariance(state, 0.0);
    let scale = cov.matrix().iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let nu = symplectic_eigenvalues(&cov)?;
    let min = nu.first().copied().unwrap_or(0.5);
    if min.is_nan() || min < 0.5 - PHYSICALITY_TOL * scale {
        return Err(Error::Unphysical {
            t: state.time,
            min_eigenvalue: min,
        });
    }
    Ok(())
}

struct MomentRhs {
    n: usize,
    coupling: ComplexMatrix,
    gains: Vec<f64>,
    loss: f64,
}

impl MomentRhs {
    fn new(config: &ArrayConfig) -> Self {
        let drift = build_drift(config);
        Self {
            n: config.n_modes(),
            coupling: drift.coupling.map(C64::from),
            gains: config.pump_gains().to_vec(),
            loss: config.loss_rate(),
        }
    }

    fn eval(&self, y: &[C64], dy: &mut [C64]) {
        let n = self.n;
        let nn = n * n;
        let i = C64::i();
        let gamma = self.loss;
        let alpha = &y[..n];
        let normal = DMatrixView::from_slice(&y[n..n + nn], n, n);
        let anomalous = DMatrixView::from_slice(&y[n + nn..], n, n);
        let k = &self.coupling;
        let g = &self.gains;

        // dα/dt
        for r in 0..n {
            let mut hop = C64::default();
            if r > 0 {
                hop += k[(r, r - 1)] * alpha[r - 1];
            }
            if r + 1 < n {
                hop += k[(r, r + 1)] * alpha[r + 1];
            }
            dy[r] = i * hop - 0.5 * gamma * alpha[r] - 2.0 * i * g[r] * alpha[r].conj();
        }

        let kn = k * normal;
        let nk = normal * k;
        let km = k * anomalous;
        let mk = anomalous * k;

        let (dn, dm) = dy[n..].split_at_mut(nn);
        // Column-major: entry (r, c) lives at r + c*n.
        for c in 0..n {
            for r in 0..n {
                let idx = r + c * n;
                let nrc = normal[(r, c)];
                let mrc = anomalous[(r, c)];
                dn[idx] = -i * (kn[(r, c)] - nk[(r, c)])
                    + 2.0 * i * (g[r] * mrc - anomalous[(r, c)].conj() * g[c])
                    - gamma * nrc;
                let seed = if r == c { g[r] } else { 0.0 };
                dm[idx] = i * (km[(r, c)] + mk[(r, c)])
                    - 2.0 * i * (g[r] * nrc + normal[(c, r)] * g[c] + seed)
                    - gamma * mrc;
            }
        }
    }
}

/// Outcome of comparing the moment ODE against the Bogoliubov algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub vacuum_discrepancy: f64,
    pub coherent_discrepancy: f64,
    pub tolerance: f64,
}

impl ConsistencyReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.vacuum_discrepancy.max(self.coherent_discrepancy)
    }

    pub fn passed(&self) -> bool {
        self.max_discrepancy() <= self.tolerance
    }
}

/// Largest moment difference between the ODE route and `state.transformed_by(A, B)`.
pub fn lossless_discrepancy(
    config: &ArrayConfig,
    state: &MomentState,
    t: f64,
    opts: &EvolveOptions,
) -> Result<f64> {
    if config.loss_rate() != 0.0 {
        return Err(Error::InvalidArgument(
            "consistency check requires loss_rate = 0".into(),
        ));
    }
    let via_ode = evolve_with(config, state, t, opts)?;
    let via_algebra = state.transformed_by(&propagate(config, t - state.time)?)?;
    Ok(via_ode.max_difference(&via_algebra))
}

/// Evolve the vacuum and a coherent input (amplitude 5 in the central
/// waveguide) along both routes and report the largest discrepancy.
pub fn consistency_check_lossless(
    config: &ArrayConfig,
    t: f64,
    tol: f64,
) -> Result<ConsistencyReport> {
    let n = config.n_modes();
    let opts = EvolveOptions::with_tol((tol * 1e-3).max(1e-13));
    let vacuum = vacuum_state(n)?;
    let centre = ModeIndex::new(n.div_ceil(2))?;
    let coherent = coherent_state(n, centre, C64::new(5.0, 0.0))?;
    Ok(ConsistencyReport {
        vacuum_discrepancy: lossless_discrepancy(config, &vacuum, t, &opts)?,
        coherent_discrepancy: lossless_discrepancy(config, &coherent, t, &opts)?,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::max_abs;
    use crate::oracles::squeezer_closed_form;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_is_all_zero() {
        for n in [1, 21] {
            let v = vacuum_state(n).unwrap();
            assert_eq!(v.n_modes(), n);
            assert!(v.alpha.iter().all(|z| *z == C64::default()));
            assert_eq!(max_abs(&v.normal), 0.0);
            assert_eq!(max_abs(&v.anomalous), 0.0);
            assert_eq!(v.time, 0.0);
        }
    }

    #[test]
    fn coherent_moments() {
        let zero = coherent_state(1, ModeIndex::new(1).unwrap(), c(0.0, 0.0)).unwrap();
        assert_eq!(zero, vacuum_state(1).unwrap());

        let s = coherent_state(3, ModeIndex::new(2).unwrap(), c(2.0, 0.0)).unwrap();
        assert_eq!(s.alpha[1], c(2.0, 0.0));
        assert_eq!(s.normal[(1, 1)], c(4.0, 0.0));
        assert_eq!(s.anomalous[(1, 1)], c(4.0, 0.0));
        assert_eq!(s.photon_number(), 4.0);

        let fig2 = coherent_state(21, ModeIndex::new(10).unwrap(), c(5.0, 0.0)).unwrap();
        assert_eq!(fig2.normal[(9, 9)], c(25.0, 0.0));

        assert!(matches!(
            coherent_state(3, ModeIndex::new(4).unwrap(), c(1.0, 0.0)),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn passive_chain_conserves_photons() {
        let cfg = ArrayConfig::uniform(4, 0.0, 1.0, 0.0).unwrap();
        let s0 = coherent_state(4, ModeIndex::new(1).unwrap(), c(1.5, -0.5)).unwrap();
        let s = evolve(&cfg, &s0, 3.0).unwrap();
        assert!((s.photon_number() - s0.photon_number()).abs() < 1e-9);
    }

    #[test]
    fn single_squeezer_from_vacuum() {
        let g = 0.3;
        let cfg = ArrayConfig::uniform(1, g, 0.0, 0.0).unwrap();
        let t = 1.0 / (2.0 * g);
        let s = evolve_with(
            &cfg,
            &vacuum_state(1).unwrap(),
            t,
            &EvolveOptions::with_tol(1e-12),
        )
        .unwrap();
        let sq = squeezer_closed_form(g, t);
        assert!((s.normal[(0, 0)].re - sq.n).abs() < 1e-10);
        assert!((s.anomalous[(0, 0)] - sq.m).norm() < 1e-10);
        assert!((s.anomalous[(0, 0)] - c(0.0, -0.5 * (4.0 * g * t).sinh())).norm() < 1e-10);
    }

    #[test]
    fn damped_coherent_mode() {
        let gamma = 0.4;
        let cfg = ArrayConfig::uniform(1, 0.0, 0.0, gamma).unwrap();
        let s0 = coherent_state(1, ModeIndex::new(1).unwrap(), c(5.0, 0.0)).unwrap();
        let s = evolve(&cfg, &s0, 1.0 / gamma).unwrap();
        let want = 25.0 * (-1f64).exp();
        assert!((s.normal[(0, 0)].re - want).abs() < 1e-8);
        assert!((want - 9.1970).abs() < 1e-4);
    }

    #[test]
    fn transformed_by_identity_is_noop() {
        let s0 = coherent_state(3, ModeIndex::new(2).unwrap(), c(1.0, 2.0)).unwrap();
        let s = s0
            .transformed_by(&BogoliubovPropagator::identity(3))
            .unwrap();
        assert_eq!(s.max_difference(&s0), 0.0);
    }

    #[test]
    fn consistency_without_gain_is_exact() {
        let cfg = ArrayConfig::uniform(4, 0.0, 1.0, 0.0).unwrap();
        let report = consistency_check_lossless(&cfg, 2.0, 1e-10).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn consistency_two_modes_and_five_modes() {
        for t in [0.5, 1.5, 3.0] {
            let cfg = ArrayConfig::uniform(2, 0.4, 1.0, 0.0).unwrap();
            let report = consistency_check_lossless(&cfg, t, 1e-8).unwrap();
            assert!(report.passed(), "N=2 t={t}: {report:?}");
        }
        let cfg = ArrayConfig::uniform(5, 0.2, 1.0, 0.0).unwrap();
        let report = consistency_check_lossless(&cfg, std::f64::consts::PI, 1e-8).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn rejects_time_reversal_and_dimension_mismatch() {
        let cfg = ArrayConfig::uniform(2, 0.1, 1.0, 0.0).unwrap();
        let mut s = vacuum_state(2).unwrap();
        s.time = 1.0;
        assert!(evolve(&cfg, &s, 0.5).is_err());
        assert!(evolve(&cfg, &vacuum_state(3).unwrap(), 1.0).is_err());
    }

    #[test]
    fn lossy_consistency_check_rejects_loss() {
        let cfg = ArrayConfig::uniform(2, 0.1, 1.0, 0.2).unwrap();
        assert!(consistency_check_lossless(&cfg, 1.0, 1e-8).is_err());
    }
}
