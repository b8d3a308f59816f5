//! Array configuration and the linear drift generators built from it.

use std::fmt;

use nalgebra::DMatrix;

use crate::kernels::{ComplexMatrix, C64};
use crate::{Error, Result};

/// 1-based waveguide index, as used in every file and CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(one_based: usize) -> Result<Self> {
        if one_based == 0 {
            return Err(Error::InvalidArgument("mode indices are 1-based".into()));
        }
        Ok(Self(one_based))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 - 1
    }

    /// Zero-based position, checked against the array size.
    pub fn checked(self, n_modes: usize) -> Result<usize> {
        if self.0 > n_modes {
            return Err(Error::ModeOutOfRange {
                index: self.0,
                n_modes,
            });
        }
        Ok(self.0 - 1)
    }
}

impl TryFrom<usize> for ModeIndex {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Self::new(value)
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Physical description of an array of `N` identical χ⁽²⁾ waveguides with
/// open boundaries. All rates are dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pump_gains: Vec<f64>,
    link_couplings: Vec<f64>,
    loss_rate: f64,
}

impl ArrayConfig {
    pub fn new(
        n_modes: usize,
        pump_gains: Vec<f64>,
        link_couplings: Vec<f64>,
        loss_rate: f64,
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::config("n_modes", "must be at least 1"));
        }
        if pump_gains.len() != n_modes {
            return Err(Error::config(
                "pump_gains",
                format!("expected {n_modes} entries, got {}", pump_gains.len()),
            ));
        }
        if link_couplings.len() != n_modes - 1 {
            return Err(Error::config(
                "link_couplings",
                format!(
                    "expected {} entries, got {}",
                    n_modes - 1,
                    link_couplings.len()
                ),
            ));
        }
        if pump_gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::config("pump_gains", "entries must be finite"));
        }
        if link_couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::config("link_couplings", "entries must be finite"));
        }
        if !loss_rate.is_finite() || loss_rate < 0.0 {
            return Err(Error::config(
                "loss_rate",
                format!("must be finite and >= 0, got {loss_rate}"),
            ));
        }
        Ok(Self {
            pump_gains,
            link_couplings,
            loss_rate,
        })
    }

    /// Same gain on every site and the same coupling on every link.
    pub fn uniform(n_modes: usize, gain: f64, coupling: f64, loss_rate: f64) -> Result<Self> {
        Self::new(
            n_modes,
            vec![gain; n_modes],
            vec![coupling; n_modes.saturating_sub(1)],
            loss_rate,
        )
    }

    pub fn n_modes(&self) -> usize {
        self.pump_gains.len()
    }

    pub fn pump_gains(&self) -> &[f64] {
        &self.pump_gains
    }

    pub fn link_couplings(&self) -> &[f64] {
        &self.link_couplings
    }

    pub fn loss_rate(&self) -> f64 {
        self.loss_rate
    }

    pub fn with_loss_rate(&self, loss_rate: f64) -> Result<Self> {
        Self::new(
            self.n_modes(),
            self.pump_gains.clone(),
            self.link_couplings.clone(),
            loss_rate,
        )
    }

    /// Multiply every gain by `gain_scale` and every coupling by `coupling_scale`.
    pub fn scaled(&self, gain_scale: f64, coupling_scale: f64) -> Result<Self> {
        Self::new(
            self.n_modes(),
            self.pump_gains.iter().map(|g| g * gain_scale).collect(),
            self.link_couplings
                .iter()
                .map(|j| j * coupling_scale)
                .collect(),
            self.loss_rate,
        )
    }
}

/// Tridiagonal hopping `K` and diagonal gain `G`:
/// `da/dt = i K a − 2i G a†`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrices {
    pub coupling: DMatrix<f64>,
    pub gain: DMatrix<f64>,
}

impl DriftMatrices {
    pub fn n_modes(&self) -> usize {
        self.coupling.nrows()
    }
}

/// The `2N×2N` generator `S = [[iK, −2iG], [2iG, −iK]]` of the Heisenberg
/// flow `d/dt (a; a†) = S (a; a†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovGenerator {
    matrix: ComplexMatrix,
}

impl BogoliubovGenerator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

pub fn build_drift(config: &ArrayConfig) -> DriftMatrices {
    let n = config.n_modes();
    let mut coupling = DMatrix::zeros(n, n);
    for (l, &j) in config.link_couplings().iter().enumerate() {
        coupling[(l, l + 1)] = j;
        coupling[(l + 1, l)] = j;
    }
    let gain = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(config.pump_gains()));
    DriftMatrices { coupling, gain }
}

pub fn build_generator(drift: &DriftMatrices) -> BogoliubovGenerator {
    let n = drift.n_modes();
    let i = C64::i();
    let mut s = ComplexMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let k = drift.coupling[(r, c)];
            let g = drift.gain[(r, c)];
            s[(r, c)] = i * k;
            s[(r + n, c + n)] = -i * k;
            s[(r, c + n)] = -2.0 * i * g;
            s[(r + n, c)] = 2.0 * i * g;
        }
    }
    let generator = BogoliubovGenerator { matrix: s };
    debug_assert!(generator_block_symmetry_holds(&generator));
    generator
}

/// Exact check of the adjoint block structure `S = [[X, Y], [Ȳ, X̄]]`, which
/// keeps the lower half of the flow the Hermitian conjugate of the upper half.
pub fn generator_block_symmetry_holds(generator: &BogoliubovGenerator) -> bool {
    let n = generator.n_modes();
    let s = &generator.matrix;
    (0..n).all(|r| {
        (0..n)
            .all(|c| s[(r + n, c + n)] == s[(r, c)].conj() && s[(r + n, c)] == s[(r, c + n)].conj())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_site_has_no_links() {
        let cfg = ArrayConfig::new(1, vec![0.3], vec![], 0.0).unwrap();
        let d = build_drift(&cfg);
        assert_eq!(d.coupling, DMatrix::zeros(1, 1));
        assert_eq!(d.gain, DMatrix::from_element(1, 1, 0.3));
    }

    #[test]
    fn uniform_chain_is_tridiagonal() {
        let cfg = ArrayConfig::new(3, vec![0.0; 3], vec![1.0, 1.0], 0.0).unwrap();
        let d = build_drift(&cfg);
        let want = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.coupling, want);
        assert_eq!(d.gain, DMatrix::zeros(3, 3));
    }

    #[test]
    fn two_site_drift() {
        let cfg = ArrayConfig::new(2, vec![0.4, 0.4], vec![1.0], 0.0).unwrap();
        let d = build_drift(&cfg);
        assert_eq!(
            d.coupling,
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
        assert_eq!(d.gain, DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.4]));
    }

    #[test]
    fn generator_examples() {
        let free = build_generator(&build_drift(
            &ArrayConfig::uniform(1, 0.0, 0.0, 0.0).unwrap(),
        ));
        assert_eq!(free.matrix(), &ComplexMatrix::zeros(2, 2));

        let sq = build_generator(&build_drift(
            &ArrayConfig::uniform(1, 0.5, 0.0, 0.0).unwrap(),
        ));
        let want = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        );
        assert_eq!(sq.matrix(), &want);

        let coupler = build_generator(&build_drift(
            &ArrayConfig::uniform(2, 0.0, 1.0, 0.0).unwrap(),
        ));
        let z = c(0.0, 0.0);
        let i = c(0.0, 1.0);
        let want = ComplexMatrix::from_row_slice(
            4,
            4,
            &[z, i, z, z, i, z, z, z, z, z, z, -i, z, z, -i, z],
        );
        assert_eq!(coupler.matrix(), &want);
    }

    #[test]
    fn generator_rows_reproduce_heisenberg_equation() {
        let cfg = ArrayConfig::new(4, vec![0.1, 0.2, 0.3, 0.4], vec![1.0, 0.5, 2.0], 0.0).unwrap();
        let s = build_generator(&build_drift(&cfg));
        let n = 4;
        for j in 0..n {
            assert_eq!(s.matrix()[(j, j + n)], c(0.0, -2.0 * cfg.pump_gains()[j]));
            if j > 0 {
                assert_eq!(s.matrix()[(j, j - 1)], c(0.0, cfg.link_couplings()[j - 1]));
            }
            if j + 1 < n {
                assert_eq!(s.matrix()[(j, j + 1)], c(0.0, cfg.link_couplings()[j]));
            }
        }
        assert!(generator_block_symmetry_holds(&s));
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(matches!(
            ArrayConfig::new(0, vec![], vec![], 0.0),
            Err(Error::InvalidConfig {
                field: "n_modes",
                ..
            })
        ));
        assert!(matches!(
            ArrayConfig::new(2, vec![0.1], vec![1.0], 0.0),
            Err(Error::InvalidConfig {
                field: "pump_gains",
                ..
            })
        ));
        assert!(matches!(
            ArrayConfig::new(2, vec![0.1, 0.1], vec![], 0.0),
            Err(Error::InvalidConfig {
                field: "link_couplings",
                ..
            })
        ));
        assert!(ArrayConfig::new(2, vec![0.1, f64::NAN], vec![1.0], 0.0).is_err());
        assert!(ArrayConfig::new(2, vec![0.1, 0.1], vec![f64::INFINITY], 0.0).is_err());
        assert!(matches!(
            ArrayConfig::new(1, vec![0.1], vec![], -0.1),
            Err(Error::InvalidConfig {
                field: "loss_rate",
                ..
            })
        ));
    }

    #[test]
    fn mode_index_is_one_based() {
        assert!(ModeIndex::new(0).is_err());
        let m = ModeIndex::new(3).unwrap();
        assert_eq!(m.zero_based(), 2);
        assert_eq!(m.checked(3).unwrap(), 2);
        assert!(matches!(
            m.checked(2),
            Err(Error::ModeOutOfRange {
                index: 3,
                n_modes: 2
            })
        ));
    }
}
