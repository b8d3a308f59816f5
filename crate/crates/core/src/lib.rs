//! Quantum light in χ⁽²⁾ nonlinear waveguide arrays.
//!
//! Each waveguide carries a signal mode pumped by an undepleted classical
//! field (parametric gain `g_j`) and hops to its neighbours through evanescent
//! coupling (`J_l` on link `l`). The dynamics are quadratic, so the output is
//! fully described either by the Bogoliubov input–output matrices `A`, `B`
//! (`a(t) = A a(0) + B a†(0)`) or, with uniform photon loss, by the Gaussian
//! moments `⟨a⟩`, `⟨a†a⟩`, `⟨aa⟩`.
//!
//! Module map:
//! - [`model`]: array configuration and the Heisenberg drift generator.
//! - [`kernels`]: matrix exponential, Dormand–Prince integrator, Bessel `J_n`.
//! - [`lossless`]: Bogoliubov propagator and its symplectic checks.
//! - [`lossy`]: moment evolution with Lindblad damping.
//! - [`observables`]: intensities, quadrature covariance, entanglement witnesses.
//! - [`oracles`]: closed-form reference results.
//! - [`scenario`]: scenario files, runner, figure presets, sweeps, CSV/JSON.

pub mod error;
pub mod kernels;
pub mod lossless;
pub mod lossy;
pub mod model;
pub mod observables;
pub mod oracles;
pub mod scenario;

pub use error::{Error, Result};
pub use kernels::{ComplexMatrix, C64};
pub use lossless::{propagate, symplectic_residual, BogoliubovPropagator};
pub use lossy::{coherent_state, evolve, evolve_with, vacuum_state, EvolveOptions, MomentState};
pub use model::{
    build_drift, build_generator, ArrayConfig, BogoliubovGenerator, DriftMatrices, ModeIndex,
};
pub use observables::{
    duan_correlation, duan_matrix, intensities, propagator_symplectic_eigenvalues,
    quadrature_covariance, symplectic_eigenvalues, vlf_tripartite, QuadratureCovariance,
};
