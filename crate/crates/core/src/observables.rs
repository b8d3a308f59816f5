//! Measurable quantities of a [`MomentState`].
//!
//! Homodyne phases are referenced to the pump. With the real-gain generator
//! the local oscillator sits a quarter period ahead of the bare mode phase,
//! `θ = φ + π/2`, so the quadratures are
//! `q_j = (a_j e^{−iθ} + a_j† e^{iθ})/√2`, `p_j = (a_j e^{−iθ} − a_j† e^{iθ})/(√2 i)`
//! and every anomalous moment enters as `−e^{−2iφ} ⟨a_j a_k⟩`. At `φ = 0`
//! the Duan correlation of two lossless coupled guides is
//! `4 sin²(Ωt) g(2g − J)/Ω²`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::kernels::C64;
use crate::lossless::BogoliubovPropagator;
use crate::lossy::MomentState;
use crate::model::ModeIndex;
use crate::{Error, Result};

/// Number of uniformly spaced phases in `[0, π)` scanned by
/// [`minimize_duan_over_phase`].
pub const PHASE_GRID_POINTS: usize = 180;

/// Offset between the user-facing phase `φ` and the local-oscillator phase.
pub const LO_PHASE_OFFSET: f64 = FRAC_PI_2;

/// Symmetrised covariance of `(q_1..q_N, p_1..p_N)` at phase `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCovariance {
    phase: f64,
    matrix: DMatrix<f64>,
}

impl QuadratureCovariance {
    pub fn new(phase: f64, matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "covariance must be 2N×2N, got {:?}",
                matrix.shape()
            )));
        }
        Ok(Self { phase, matrix })
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Variance of `Σ_r w_r x_r` for quadrature weights `w`.
    pub fn variance(&self, weights: &[(usize, f64)]) -> f64 {
        let mut v = 0.0;
        for &(r, wr) in weights {
            for &(c, wc) in weights {
                v += wr * wc * self.matrix[(r, c)];
            }
        }
        v
    }
}

/// `−e^{−2iφ}`: how anomalous moments rotate into the quadrature frame.
fn anomalous_phase(phi: f64) -> C64 {
    C64::from_polar(1.0, -2.0 * (phi + LO_PHASE_OFFSET))
}

/// Mean photon number per waveguide, `I_j = ⟨a_j† a_j⟩`.
pub fn intensities(state: &MomentState) -> Vec<f64> {
    state.normal.diagonal().iter().map(|z| z.re).collect()
}

/// `(ΣI)² / ΣI²`: effective number of occupied waveguides.
pub fn participation_ratio(profile: &[f64]) -> f64 {
    let total: f64 = profile.iter().sum();
    let squares: f64 = profile.iter().map(|x| x * x).sum();
    if squares == 0.0 {
        return 0.0;
    }
    total * total / squares
}

pub fn quadrature_covariance(state: &MomentState, phi: f64) -> QuadratureCovariance {
    let n = state.n_modes();
    let alpha = &state.alpha;
    let rot = anomalous_phase(phi);
    let mut sigma = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            // Centred moments, symmetrised so the result is exactly symmetric.
            let nt_jk = state.normal[(j, k)] - alpha[j].conj() * alpha[k];
            let nt_kj = state.normal[(k, j)] - alpha[k].conj() * alpha[j];
            let normal = 0.5 * (nt_jk + nt_kj.conj());
            let mt_jk = state.anomalous[(j, k)] - alpha[j] * alpha[k];
            let mt_kj = state.anomalous[(k, j)] - alpha[k] * alpha[j];
            let anomalous = rot * 0.5 * (mt_jk + mt_kj);
            let half = if j == k { 0.5 } else { 0.0 };
            sigma[(j, k)] = normal.re + anomalous.re + half;
            sigma[(j + n, k + n)] = normal.re - anomalous.re + half;
            sigma[(j, k + n)] = anomalous.im + normal.im;
            sigma[(k + n, j)] = anomalous.im + normal.im;
        }
    }
    QuadratureCovariance {
        phase: phi,
        matrix: sigma,
    }
}

/// Quadrature means `(⟨q_1⟩..⟨q_N⟩, ⟨p_1⟩..⟨p_N⟩)` at phase `φ`.
pub fn quadrature_means(state: &MomentState, phi: f64) -> Vec<f64> {
    let n = state.n_modes();
    let lo = C64::from_polar(1.0, -(phi + LO_PHASE_OFFSET));
    let mut out = vec![0.0; 2 * n];
    for j in 0..n {
        let beta = state.alpha[j] * lo;
        out[j] = SQRT_2 * beta.re;
        out[j + n] = SQRT_2 * beta.im;
    }
    out
}

/// The `N` symplectic eigenvalues of a covariance, ascending.
///
/// Computed from a Cholesky factor `σ = LLᵀ` as the singular values of
/// `LᵀΩL`. If `σ` is not positive definite, falls back to the square roots
/// of the eigenvalues of `σ^{1/2} Ωᵀ σ Ω σ^{1/2}`.
pub fn symplectic_eigenvalues(cov: &QuadratureCovariance) -> Result<Vec<f64>> {
    let sigma = &cov.matrix;
    let dim = sigma.nrows();
    let n = dim / 2;
    let scale = sigma.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let asym = sigma
        .iter()
        .zip(sigma.transpose().iter())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if asym > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "covariance is not symmetric (deviation {asym:e})"
        )));
    }
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }

    if let Some(chol) = Cholesky::new(sigma.clone()) {
        // σ = LLᵀ; the antisymmetric LᵀΩL has singular values ν_k, each twice.
        let l = chol.l();
        let mut omega_l = DMatrix::zeros(dim, dim);
        for r in 0..n {
            for c in 0..dim {
                omega_l[(r, c)] = l[(r + n, c)];
                omega_l[(r + n, c)] = -l[(r, c)];
            }
        }
        let k = l.transpose() * omega_l;
        let mut singular: Vec<f64> = k.singular_values().iter().copied().collect();
        singular.sort_by(f64::total_cmp);
        return Ok(singular
            .chunks(2)
            .map(|pair| 0.5 * (pair[0] + pair[1]))
            .collect());
    }

    let eig = SymmetricEigen::new(sigma.clone());
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let sqrt_sigma =
        &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();

    // Ωᵀ σ Ω = [[σ_pp, −σ_pq], [−σ_qp, σ_qq]]
    let mut swapped = DMatrix::zeros(dim, dim);
    for r in 0..n {
        for c in 0..n {
            swapped[(r, c)] = sigma[(r + n, c + n)];
            swapped[(r + n, c + n)] = sigma[(r, c)];
            swapped[(r, c + n)] = -sigma[(r + n, c)];
            swapped[(r + n, c)] = -sigma[(r, c + n)];
        }
    }
    let q = &sqrt_sigma * swapped * &sqrt_sigma;
    let q = (&q + q.transpose()) * 0.5;
    let mut squares: Vec<f64> = SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
    squares.sort_by(f64::total_cmp);
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Symplectic eigenvalues of the state a propagator makes from vacuum or a
/// coherent input, ascending.
///
/// Uses the real symplectic matrix `S` of the map, `σ = SSᵀ/2`, and takes the
/// singular values of `SᵀΩS / 2` without forming `σ`. Far more accurate than
/// [`symplectic_eigenvalues`] once the state is strongly squeezed.
pub fn propagator_symplectic_eigenvalues(p: &BogoliubovPropagator) -> Vec<f64> {
    let n = p.n_modes();
    let (a, b) = (p.a(), p.b());
    // q' = Re(A+B) q − Im(A−B) p,  p' = Im(A+B) q + Re(A−B) p
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let (plus, minus) = (a[(r, c)] + b[(r, c)], a[(r, c)] - b[(r, c)]);
            s[(r, c)] = plus.re;
            s[(r, c + n)] = -minus.im;
            s[(r + n, c)] = plus.im;
            s[(r + n, c + n)] = minus.re;
        }
    }
    let mut omega_s = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..2 * n {
            omega_s[(r, c)] = s[(r + n, c)];
            omega_s[(r + n, c)] = -s[(r, c)];
        }
    }
    let mut singular: Vec<f64> = (s.transpose() * omega_s)
        .singular_values()
        .iter()
        .copied()
        .collect();
    singular.sort_by(f64::total_cmp);
    singular
        .chunks(2)
        .map(|pair| 0.25 * (pair[0] + pair[1]))
        .collect()
}

fn ordered_pair(state: &MomentState, j: ModeIndex, k: ModeIndex) -> Result<(usize, usize)> {
    let n = state.n_modes();
    let (a, b) = (j.checked(n)?, k.checked(n)?);
    if a == b {
        return Err(Error::RepeatedIndex(vec![j.get(), k.get()]));
    }
    Ok((a.min(b), a.max(b)))
}

/// Duan correlation
/// `M(j,k) = ⟨a_j†a_j⟩ + ⟨a_k†a_k⟩ − e^{−2iφ}⟨a_j a_k⟩ − e^{2iφ}⟨a_j†a_k†⟩`
/// from uncentred moments. `M < 0` witnesses entanglement.
pub fn duan_correlation(state: &MomentState, j: ModeIndex, k: ModeIndex, phi: f64) -> Result<f64> {
    let (a, b) = ordered_pair(state, j, k)?;
    Ok(duan_raw(state, a, b, phi))
}

/// As [`duan_correlation`] but with first moments removed.
pub fn duan_correlation_centered(
    state: &MomentState,
    j: ModeIndex,
    k: ModeIndex,
    phi: f64,
) -> Result<f64> {
    let (a, b) = ordered_pair(state, j, k)?;
    let alpha = &state.alpha;
    let n_aa = state.normal[(a, a)].re - alpha[a].norm_sqr();
    let n_bb = state.normal[(b, b)].re - alpha[b].norm_sqr();
    let m_ab = state.anomalous[(a, b)] - alpha[a] * alpha[b];
    Ok(n_aa + n_bb + 2.0 * (anomalous_phase(phi) * m_ab).re)
}

fn duan_raw(state: &MomentState, a: usize, b: usize, phi: f64) -> f64 {
    state.normal[(a, a)].re
        + state.normal[(b, b)].re
        + 2.0 * (anomalous_phase(phi) * state.anomalous[(a, b)]).re
}

/// The same correlation through the quadrature covariance:
/// `M = (⟨u²⟩ + ⟨v²⟩)/2 − 1` with `u = q_j + q_k`, `v = p_j − p_k`.
pub fn duan_from_covariance(
    state: &MomentState,
    j: ModeIndex,
    k: ModeIndex,
    phi: f64,
) -> Result<f64> {
    let (a, b) = ordered_pair(state, j, k)?;
    let n = state.n_modes();
    let cov = quadrature_covariance(state, phi);
    let means = quadrature_means(state, phi);
    let u = [(a, 1.0), (b, 1.0)];
    let v = [(a + n, 1.0), (b + n, -1.0)];
    let mean_u = means[a] + means[b];
    let mean_v = means[a + n] - means[b + n];
    Ok(0.5 * (cov.variance(&u) + mean_u * mean_u + cov.variance(&v) + mean_v * mean_v) - 1.0)
}

/// All-pairs Duan correlations; the diagonal is left at zero.
pub fn duan_matrix(state: &MomentState, phi: f64) -> DMatrix<f64> {
    let n = state.n_modes();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let v = duan_raw(state, a, b, phi);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    out
}

/// Scan `φ ∈ {kπ/180}` and return the phase giving the smallest `M(j,k)`.
pub fn minimize_duan_over_phase(
    state: &MomentState,
    j: ModeIndex,
    k: ModeIndex,
) -> Result<(f64, f64)> {
    let (a, b) = ordered_pair(state, j, k)?;
    let mut best = (0.0, f64::INFINITY);
    for step in 0..PHASE_GRID_POINTS {
        let phi = step as f64 * PI / PHASE_GRID_POINTS as f64;
        let m = duan_raw(state, a, b, phi);
        if m < best.1 {
            best = (phi, m);
        }
    }
    Ok(best)
}

/// van Loock–Furusawa sum
/// `V = Var(X_i − (X_j + X_k)/√2) + Var(Y_i + (Y_j + Y_k)/√2)`
/// with `X = √2 q`, `Y = √2 p` (vacuum variance 1). `V < 4` witnesses full
/// tripartite inseparability.
pub fn vlf_tripartite(
    state: &MomentState,
    i: ModeIndex,
    j: ModeIndex,
    k: ModeIndex,
    phi: f64,
) -> Result<f64> {
    let n = state.n_modes();
    let (ii, jj, kk) = (i.checked(n)?, j.checked(n)?, k.checked(n)?);
    if ii == jj || ii == kk || jj == kk {
        return Err(Error::RepeatedIndex(vec![i.get(), j.get(), k.get()]));
    }
    let cov = quadrature_covariance(state, phi);
    Ok(vlf_from_covariance(&cov, ii, jj, kk))
}

/// Written out term by term so that swapping `j` and `k` is bit-exact.
fn vlf_from_covariance(cov: &QuadratureCovariance, i: usize, j: usize, k: usize) -> f64 {
    let s = cov.matrix();
    let n = cov.n_modes();
    let block = |off: usize, sign: f64| {
        let (i, j, k) = (i + off, j + off, k + off);
        s[(i, i)]
            + 0.5 * (s[(j, j)] + s[(k, k)] + 2.0 * s[(j, k)])
            + sign * SQRT_2 * (s[(i, j)] + s[(i, k)])
    };
    2.0 * (block(0, -1.0) + block(n, 1.0))
}
