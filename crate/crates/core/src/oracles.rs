//! Closed-form reference results.

use nalgebra::Matrix2;

use crate::kernels::C64;
use crate::lossless::BogoliubovPropagator;
use crate::model::ModeIndex;
use crate::Result;

/// Below this `|Ω t|` the ratio `sin²(Ωt)/Ω²` is evaluated by its series.
const SMALL_PHASE: f64 = 1e-4;

/// Duan correlation `M(1,2)` of two lossless coupled guides with gain `g`
/// and coupling `J`, starting from vacuum (`φ = 0`):
/// `4 sin²(Ωt) g(2g − J)/Ω²`, `Ω = (J² − 4g²)^{1/2}`.
///
/// Above threshold (`2g > J`) the ratio continues to `sinh²(Ω't)/Ω'²` with
/// `Ω' = (4g² − J²)^{1/2}`; at `J = 2g` it is `t²`.
pub fn duan_closed_form(g: f64, coupling: f64, t: f64) -> f64 {
    4.0 * g * (2.0 * g - coupling) * oscillation_ratio(g, coupling, t)
}

/// `sin²(Ωt)/Ω²` continued through `Ω² = J² − 4g² ≤ 0`.
pub fn oscillation_ratio(g: f64, coupling: f64, t: f64) -> f64 {
    let omega_sq = coupling * coupling - 4.0 * g * g;
    let omega = omega_sq.abs().sqrt();
    let x = omega * t;
    if x.abs() < SMALL_PHASE {
        // sin²(x)/x² ≈ 1 − x²/3, sinh²(x)/x² ≈ 1 + x²/3
        let sign = if omega_sq >= 0.0 { -1.0 } else { 1.0 };
        return t * t * (1.0 + sign * x * x / 3.0);
    }
    if omega_sq > 0.0 {
        (x.sin() / omega).powi(2)
    } else {
        (x.sinh() / omega).powi(2)
    }
}

/// Single pumped waveguide without neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezerClosedForm {
    pub a: C64,
    pub b: C64,
    /// `⟨a†a⟩` from vacuum.
    pub n: f64,
    /// `⟨aa⟩` from vacuum.
    pub m: C64,
}

pub fn squeezer_closed_form(g: f64, t: f64) -> SqueezerClosedForm {
    let r = 2.0 * g * t;
    let (ch, sh) = (r.cosh(), r.sinh());
    SqueezerClosedForm {
        a: C64::new(ch, 0.0),
        b: C64::new(0.0, -sh),
        n: sh * sh,
        m: C64::new(0.0, -ch * sh),
    }
}

/// `exp(iKt)` for the two-guide coupler `K = [[0, J], [J, 0]]`.
pub fn coupler_closed_form(coupling: f64, t: f64) -> Matrix2<C64> {
    let (c, s) = ((coupling * t).cos(), (coupling * t).sin());
    Matrix2::new(
        C64::new(c, 0.0),
        C64::new(0.0, s),
        C64::new(0.0, s),
        C64::new(c, 0.0),
    )
}

/// Output intensities for vacuum everywhere except a coherent amplitude
/// `alpha` in waveguide `site`, written directly in terms of `A` and `B`:
/// `I_j = |α|²(|A_jm|² + |B_jm|²) + 2 Re(α² A_jm B_jm*) + Σ_l |B_jl|²`.
pub fn coherent_intensity(
    p: &BogoliubovPropagator,
    site: ModeIndex,
    alpha: C64,
) -> Result<Vec<f64>> {
    let n = p.n_modes();
    let m = site.checked(n)?;
    let (a, b) = (p.a(), p.b());
    Ok((0..n)
        .map(|j| {
            let stimulated = alpha.norm_sqr() * (a[(j, m)].norm_sqr() + b[(j, m)].norm_sqr());
            let interference = 2.0 * (alpha * alpha * a[(j, m)] * b[(j, m)].conj()).re;
            let spontaneous: f64 = (0..n).map(|l| b[(j, l)].norm_sqr()).sum();
            stimulated + interference + spontaneous
        })
        .collect())
}
