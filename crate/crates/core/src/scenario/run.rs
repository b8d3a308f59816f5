//! Scenario execution.

use crate::kernels::IntegratorOptions;
use crate::lossless::propagate;
use crate::lossy::{coherent_state, evolve_with, vacuum_state, EvolveOptions, MomentState};
use crate::model::ModeIndex;
use crate::observables::{
    duan_correlation, duan_correlation_centered, intensities, quadrature_covariance,
    symplectic_eigenvalues, vlf_tripartite, PHASE_GRID_POINTS,
};
use crate::scenario::output::{Observable, Record};
use crate::scenario::spec::{InputState, PhaseChoice, ScenarioSpec};
use crate::{Error, Result};

/// Which route produces the moment states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    /// Bogoliubov algebra for lossless vacuum runs, moment ODE otherwise.
    #[default]
    Auto,
    Moments,
    /// Only valid without loss.
    Bogoliubov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Integrator per-step tolerance.
    pub tol: f64,
    pub path: PathChoice,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: IntegratorOptions::default().tol,
            path: PathChoice::Auto,
        }
    }
}

pub fn initial_state(spec: &ScenarioSpec) -> Result<MomentState> {
    let n = spec.config.n_modes();
    match &spec.input {
        InputState::Vacuum => vacuum_state(n),
        InputState::Coherent { site, amplitude } => coherent_state(n, *site, *amplitude),
    }
}

/// Moment states at every grid time.
pub fn evolve_grid(spec: &ScenarioSpec, opts: &RunOptions) -> Result<Vec<MomentState>> {
    spec.validate()?;
    let start = initial_state(spec)?;
    let lossless = spec.config.loss_rate() == 0.0;
    let use_algebra = match opts.path {
        PathChoice::Auto => lossless && spec.input == InputState::Vacuum,
        PathChoice::Moments => false,
        PathChoice::Bogoliubov => {
            if !lossless {
                return Err(Error::validation(
                    "array.loss_rate",
                    "the Bogoliubov path requires loss_rate = 0",
                ));
            }
            true
        }
    };
    let evolve_opts = EvolveOptions::with_tol(opts.tol);
    let times = spec.time_grid.points();
    let mut states = Vec::with_capacity(times.len());
    let mut current = start.clone();
    for (step, &t) in times.iter().enumerate() {
        let at_step = |e: Error| Error::AtTimeStep {
            step,
            t,
            source: Box::new(e),
        };
        let state = if use_algebra {
            start
                .transformed_by(&propagate(&spec.config, t).map_err(at_step)?)
                .map_err(at_step)?
        } else {
            if t > current.time {
                current = evolve_with(&spec.config, &current, t, &evolve_opts).map_err(at_step)?;
            }
            current.clone()
        };
        states.push(state);
    }
    Ok(states)
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<Record>> {
    run_scenario_with(spec, &RunOptions::default())
}

pub fn run_scenario_with(spec: &ScenarioSpec, opts: &RunOptions) -> Result<Vec<Record>> {
    let states = evolve_grid(spec, opts)?;
    let mut records = Vec::new();
    for state in &states {
        observe(spec, state, &mut records)?;
    }
    Ok(records)
}

type Correlation = fn(&MomentState, ModeIndex, ModeIndex, f64) -> Result<f64>;

fn grid_minimum(f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::INFINITY);
    for step in 0..PHASE_GRID_POINTS {
        let phi = step as f64 * std::f64::consts::PI / PHASE_GRID_POINTS as f64;
        let v = f(phi)?;
        if v < best.1 {
            best = (phi, v);
        }
    }
    Ok(best)
}

/// Append the requested observables of one state.
pub fn observe(spec: &ScenarioSpec, state: &MomentState, out: &mut Vec<Record>) -> Result<()> {
    let obs = &spec.observables;
    let n = state.n_modes();
    // Witnesses other than the Duan correlation use φ = 0 under `minimize`.
    let fixed_phi = match spec.phase {
        PhaseChoice::Fixed(p) => p,
        PhaseChoice::Minimize => 0.0,
    };
    let record = |observable, i, j, k, phi, value| Record {
        scenario_id: spec.id.clone(),
        time: state.time,
        observable,
        i,
        j,
        k,
        phi,
        value,
        coords: Vec::new(),
    };

    if obs.intensities {
        for (j, v) in intensities(state).into_iter().enumerate() {
            out.push(record(
                Observable::Intensity,
                Some(j + 1),
                None,
                None,
                None,
                v,
            ));
        }
    }

    if let Some(selection) = &obs.duan_pairs {
        let (kind, correlation): (Observable, Correlation) = if obs.duan_centered {
            (Observable::DuanCentered, duan_correlation_centered)
        } else {
            (Observable::Duan, duan_correlation)
        };
        for (j, k) in selection.pairs(n) {
            let (phi, value) = match spec.phase {
                PhaseChoice::Fixed(p) => (p, correlation(state, j, k, p)?),
                PhaseChoice::Minimize => grid_minimum(|p| correlation(state, j, k, p))?,
            };
            out.push(record(
                kind,
                Some(j.get()),
                Some(k.get()),
                None,
                Some(phi),
                value,
            ));
        }
    }

    for &(i, j, k) in &obs.vlf_triples {
        let v = vlf_tripartite(state, i, j, k, fixed_phi)?;
        out.push(record(
            Observable::Vlf,
            Some(i.get()),
            Some(j.get()),
            Some(k.get()),
            Some(fixed_phi),
            v,
        ));
    }

    if obs.covariance || obs.symplectic_spectrum {
        let cov = quadrature_covariance(state, fixed_phi);
        if obs.covariance {
            let m = cov.matrix();
            for r in 0..m.nrows() {
                for c in r..m.ncols() {
                    out.push(record(
                        Observable::Covariance,
                        Some(r + 1),
                        Some(c + 1),
                        None,
                        Some(fixed_phi),
                        m[(r, c)],
                    ));
                }
            }
        }
        if obs.symplectic_spectrum {
            for (rank, nu) in symplectic_eigenvalues(&cov)?.into_iter().enumerate() {
                out.push(record(
                    Observable::SymplecticEigenvalue,
                    Some(rank + 1),
                    None,
                    None,
                    None,
                    nu,
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArrayConfig, ModeIndex};
    use crate::oracles::duan_closed_form;
    use crate::scenario::spec::{PairSelection, TimeGrid};
    use crate::C64;

    fn two_mode_spec(gamma: f64) -> ScenarioSpec {
        let mut spec = ScenarioSpec::new("t", ArrayConfig::uniform(2, 0.4, 1.0, gamma).unwrap());
        spec.time_grid = TimeGrid::Uniform {
            t_max: 3.0,
            steps: 30,
        };
        spec.observables.duan_pairs = Some(PairSelection::All);
        spec
    }

    #[test]
    fn record_layout_per_time() {
        let spec = two_mode_spec(0.0);
        let records = run_scenario(&spec).unwrap();
        // 31 times × (2 intensities + 1 pair)
        assert_eq!(records.len(), 31 * 3);
        assert_eq!(records[0].observable, Observable::Intensity);
        assert_eq!(records[2].observable, Observable::Duan);
        assert_eq!(
            (records[2].i, records[2].j, records[2].k),
            (Some(1), Some(2), None)
        );
        assert_eq!(records[2].phi, Some(0.0));
        assert_eq!(records[1].phi, None);
    }

    #[test]
    fn paths_agree_without_loss() {
        let mut spec = two_mode_spec(0.0);
        spec.input = InputState::Coherent {
            site: ModeIndex::new(1).unwrap(),
            amplitude: C64::new(2.0, 1.0),
        };
        spec.observables.vlf_triples.clear();
        spec.observables.covariance = true;
        let opts = |path| RunOptions { tol: 1e-12, path };
        let a = run_scenario_with(&spec, &opts(PathChoice::Moments)).unwrap();
        let b = run_scenario_with(&spec, &opts(PathChoice::Bogoliubov)).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.value - y.value).abs() <= 1e-8, "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn bogoliubov_path_rejects_loss() {
        let spec = two_mode_spec(0.2);
        let opts = RunOptions {
            path: PathChoice::Bogoliubov,
            ..Default::default()
        };
        assert!(matches!(
            run_scenario_with(&spec, &opts),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn lossless_duan_follows_closed_form() {
        let spec = two_mode_spec(0.0);
        for r in run_scenario(&spec)
            .unwrap()
            .iter()
            .filter(|r| r.observable == Observable::Duan)
        {
            assert!((r.value - duan_closed_form(0.4, 1.0, r.time)).abs() < 1e-9);
        }
    }

    #[test]
    fn minimize_never_exceeds_fixed_phase() {
        let mut spec = two_mode_spec(0.2);
        let fixed = run_scenario(&spec).unwrap();
        spec.phase = PhaseChoice::Minimize;
        let minimized = run_scenario(&spec).unwrap();
        for (f, m) in fixed
            .iter()
            .zip(&minimized)
            .filter(|(f, _)| f.observable == Observable::Duan)
        {
            assert!(m.value <= f.value + 1e-15);
        }
    }

    #[test]
    fn integrator_failure_names_the_step() {
        let mut spec = ScenarioSpec::new("blow", ArrayConfig::uniform(1, 200.0, 0.0, 0.1).unwrap());
        spec.time_grid = TimeGrid::Explicit(vec![0.0, 0.1, 5.0]);
        assert!(run_scenario(&ScenarioSpec {
            time_grid: TimeGrid::Explicit(vec![0.0, 0.1]),
            ..spec.clone()
        })
        .is_ok());
        let err = run_scenario(&spec).unwrap_err();
        assert!(err.is_numerical(), "{err}");
        assert!(matches!(err, Error::AtTimeStep { step: 2, .. }), "{err}");
    }
}
