//! Cartesian parameter sweeps over a base scenario.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::scenario::output::Record;
use crate::scenario::run::{run_scenario_with, RunOptions};
use crate::scenario::spec::{PhaseChoice, ScenarioSpec, TimeGrid};
use crate::{Error, Result};

pub const MAX_AXES: usize = 3;
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    /// Multiplies every pump gain.
    GainScale,
    /// Multiplies every link coupling.
    CouplingScale,
    LossRate,
    /// Replaces the time grid by a single time.
    Time,
    /// Fixed local-oscillator phase.
    Phase,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::GainScale => "g_scale",
            AxisName::CouplingScale => "J_scale",
            AxisName::LossRate => "gamma",
            AxisName::Time => "t",
            AxisName::Phase => "phi",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g_scale" => AxisName::GainScale,
            "J_scale" | "j_scale" => AxisName::CouplingScale,
            "gamma" => AxisName::LossRate,
            "t" => AxisName::Time,
            "phi" => AxisName::Phase,
            _ => {
                return Err(Error::validation(
                    "axis",
                    format!("unknown axis `{s}` (expected g_scale, J_scale, gamma, t or phi)"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(name: AxisName, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::validation(
                "axis",
                format!("axis {name} needs at least one point"),
            ));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::validation(
                "axis",
                format!("axis {name} bounds must be finite"),
            ));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        };
        Ok(Self { name, values })
    }
}

/// Parses `name=start:stop:count`.
pub fn parse_axis(text: &str) -> Result<Axis> {
    let bad = || {
        Error::validation(
            "axis",
            format!("`{text}` is not of the form name=start:stop:count"),
        )
    };
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    Axis::linspace(name.trim().parse()?, start, stop, count)
}

fn check_axes(axes: &[Axis]) -> Result<usize> {
    if axes.len() > MAX_AXES {
        return Err(Error::validation(
            "axis",
            format!("at most {MAX_AXES} axes, got {}", axes.len()),
        ));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::validation(
                "axis",
                format!("axis {} given twice", a.name),
            ));
        }
    }
    axes.iter()
        .try_fold(1usize, |acc, a| {
            acc.checked_mul(a.values.len()).filter(|&n| n <= MAX_POINTS)
        })
        .ok_or_else(|| Error::validation("axis", format!("sweep exceeds {MAX_POINTS} points")))
}

fn point_spec(base: &ScenarioSpec, axes: &[Axis], coords: &[f64]) -> Result<ScenarioSpec> {
    let mut spec = base.clone();
    let (mut gain_scale, mut coupling_scale) = (1.0, 1.0);
    for (axis, &value) in axes.iter().zip(coords) {
        match axis.name {
            AxisName::GainScale => gain_scale = value,
            AxisName::CouplingScale => coupling_scale = value,
            AxisName::LossRate => spec.config = spec.config.with_loss_rate(value)?,
            AxisName::Time => spec.time_grid = TimeGrid::Explicit(vec![value]),
            AxisName::Phase => spec.phase = PhaseChoice::Fixed(value),
        }
    }
    spec.config = spec.config.scaled(gain_scale, coupling_scale)?;
    spec.validate()?;
    Ok(spec)
}

pub fn sweep(base: &ScenarioSpec, axes: &[Axis]) -> Result<Vec<Record>> {
    sweep_with(base, axes, &RunOptions::default())
}

/// Runs every grid point in parallel. Records are ordered by axis tuple,
/// then by the order `run_scenario` emits them.
pub fn sweep_with(base: &ScenarioSpec, axes: &[Axis], opts: &RunOptions) -> Result<Vec<Record>> {
    let total = check_axes(axes)?;
    base.validate()?;
    let mut points: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut coords = vec![0.0; axes.len()];
            for (slot, axis) in coords.iter_mut().zip(axes).rev() {
                *slot = axis.values[flat % axis.values.len()];
                flat /= axis.values.len();
            }
            coords
        })
        .collect();
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let names: Vec<String> = axes.iter().map(|a| format!("axis_{}", a.name)).collect();
    let chunks = points
        .par_iter()
        .map(|coords| {
            let spec = point_spec(base, axes, coords)?;
            let mut records = run_scenario_with(&spec, opts)?;
            for r in &mut records {
                r.coords = names.iter().cloned().zip(coords.iter().copied()).collect();
            }
            Ok(records)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
