//! Scenario files, execution, figure presets and parameter sweeps.

pub mod figures;
pub mod output;
pub mod run;
pub mod spec;
pub mod sweep;

pub use figures::{figure_specs, reproduce_figure, FigureId, FigureOutput};
pub use output::{fmt_float, write_csv, write_json, Observable, Record, CSV_COLUMNS};
pub use run::{evolve_grid, run_scenario, run_scenario_with, PathChoice, RunOptions};
pub use spec::{
    emit_spec, parse_scenario, Destination, InputState, ObservableSet, OutputFormat, OutputSpec,
    PairSelection, PhaseChoice, ScenarioSpec, TimeGrid,
};
pub use sweep::{parse_axis, sweep, sweep_with, Axis, AxisName, MAX_AXES, MAX_POINTS};
