//! Hard-coded presets for the four published figures.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::model::{ArrayConfig, ModeIndex};
use crate::scenario::output::Record;
use crate::scenario::run::{run_scenario_with, RunOptions};
use crate::scenario::spec::{
    InputState, ObservableSet, PairSelection, PhaseChoice, ScenarioSpec, TimeGrid,
};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Output intensity profiles for a coherent input.
    Fig2,
    /// Pairwise Duan correlations in a five-guide array.
    Fig3,
    /// Tripartite witness in a three-guide array.
    Fig4,
    /// Two-guide Duan correlation under loss.
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown figure `{s}` (expected fig2, fig3, fig4 or fig5)"
                ))
            })
    }
}

pub const FIG2_TIME: f64 = 2.5;
pub const FIG2_SITE: usize = 10;
pub const FIG2_AMPLITUDE: f64 = 5.0;
pub const FIG3_TAU_MAX: f64 = 2.0;
pub const FIG4_T_MAX: f64 = 2.0;
pub const FIG5_T_MAX: f64 = 10.0;
const CURVE_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutput {
    /// Comment lines for the output header.
    pub metadata: Vec<String>,
    pub records: Vec<Record>,
}

fn mode(i: usize) -> ModeIndex {
    ModeIndex::new(i).expect("preset index is positive")
}

fn curve(
    id: String,
    config: ArrayConfig,
    time_grid: TimeGrid,
    observables: ObservableSet,
    phi: f64,
) -> ScenarioSpec {
    ScenarioSpec {
        time_grid,
        observables,
        phase: PhaseChoice::Fixed(phi),
        ..ScenarioSpec::new(id, config)
    }
}

/// One scenario per curve of the figure.
pub fn figure_specs(id: FigureId) -> Result<Vec<ScenarioSpec>> {
    let specs = match id {
        FigureId::Fig2 => [("g1/2", 0.5), ("g1/3", 1.0 / 3.0)]
            .into_iter()
            .map(|(label, g)| {
                let mut spec = curve(
                    format!("fig2_{label}"),
                    ArrayConfig::uniform(21, g, 1.0, 0.0)?,
                    TimeGrid::Explicit(vec![FIG2_TIME]),
                    ObservableSet {
                        intensities: true,
                        ..Default::default()
                    },
                    0.0,
                );
                spec.input = InputState::Coherent {
                    site: mode(FIG2_SITE),
                    amplitude: C64::new(FIG2_AMPLITUDE, 0.0),
                };
                Ok(spec)
            })
            .collect::<Result<Vec<_>>>()?,
        FigureId::Fig3 => [("g1/5", 5.0), ("g1/7", 7.0), ("g1/9", 9.0)]
            .into_iter()
            .map(|(label, d)| {
                Ok(curve(
                    format!("fig3_{label}"),
                    ArrayConfig::uniform(5, 1.0 / d, 1.0, 0.0)?,
                    TimeGrid::Uniform {
                        t_max: FIG3_TAU_MAX * PI,
                        steps: CURVE_STEPS,
                    },
                    ObservableSet {
                        duan_pairs: Some(PairSelection::All),
                        ..Default::default()
                    },
                    0.0,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
        FigureId::Fig4 => vec![curve(
            "fig4_g2/3".to_string(),
            ArrayConfig::uniform(3, 2.0 / 3.0, 1.0, 0.0)?,
            TimeGrid::Uniform {
                t_max: FIG4_T_MAX,
                steps: CURVE_STEPS,
            },
            ObservableSet {
                vlf_triples: vec![(mode(2), mode(1), mode(3))],
                ..Default::default()
            },
            FRAC_PI_2,
        )],
        FigureId::Fig5 => [("gamma0", 0.0), ("gamma1/5", 0.2), ("gamma2/5", 0.4)]
            .into_iter()
            .map(|(label, gamma)| {
                Ok(curve(
                    format!("fig5_{label}"),
                    ArrayConfig::uniform(2, 0.4, 1.0, gamma)?,
                    TimeGrid::Uniform {
                        t_max: FIG5_T_MAX,
                        steps: CURVE_STEPS,
                    },
                    ObservableSet {
                        duan_pairs: Some(PairSelection::List(vec![(mode(1), mode(2))])),
                        ..Default::default()
                    },
                    0.0,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(specs)
}

fn metadata(id: FigureId) -> Vec<String> {
    let mut lines = vec![
        format!("figure: {id}"),
        "units: time in 1/J with J = 1".to_string(),
    ];
    lines.extend(
        match id {
            FigureId::Fig2 => vec![
                "input: coherent alpha = 5 in guide 10 of 21 (1-based, one guide left of centre)",
                "time: single output time t = 2.5",
            ],
            FigureId::Fig3 => vec![
                "time axis: tau = t/pi, tau in [0, 2]",
                "phase: phi = 0 for all pairs",
                "pairs: all j < k",
            ],
            FigureId::Fig4 => vec!["witness: V(2,1,3) at phi = pi/2", "time: t in [0, 2]"],
            FigureId::Fig5 => vec!["pair: M(1,2) at phi = 0", "time: t in [0, 10]"],
        }
        .into_iter()
        .map(String::from),
    );
    lines.push("phase convention: local oscillator at phi + pi/2".to_string());
    lines
}

pub fn reproduce_figure(id: FigureId, opts: &RunOptions) -> Result<FigureOutput> {
    let mut records = Vec::new();
    for spec in figure_specs(id)? {
        records.extend(run_scenario_with(&spec, opts)?);
    }
    Ok(FigureOutput {
        metadata: metadata(id),
        records,
    })
}
