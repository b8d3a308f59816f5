use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chiwave_core::scenario::{
    parse_axis, parse_scenario, reproduce_figure, run_scenario_with, sweep_with, write_csv,
    write_json, Axis, Destination, FigureId, OutputFormat, Record, RunOptions, ScenarioSpec,
};
use clap::{Parser, Subcommand};

/// Quantum light in coupled χ(2) waveguide arrays.
#[derive(Debug, Parser)]
#[command(name = "chiwave", version, about)]
struct Cli {
    /// Output file, `-` for stdout. Overrides the scenario's destination.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the scenario's output format.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Integrator tolerance per step.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { spec: PathBuf },
    /// Reproduce a figure preset (fig2, fig3, fig4, fig5).
    Figure {
        #[arg(value_parser = parse_figure)]
        id: FigureId,
    },
    /// Run a scenario over a grid of parameters.
    Sweep {
        spec: PathBuf,
        /// `name=start:stop:count`, name one of g_scale, J_scale, gamma, t, phi.
        #[arg(long = "axis", required = true, value_parser = parse_axis_arg)]
        axes: Vec<Axis>,
    },
    /// Parse and validate a scenario file without running it.
    Validate { spec: PathBuf },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: chiwave_core::Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: chiwave_core::Error| e.to_string())
}

fn parse_axis_arg(s: &str) -> Result<Axis, String> {
    parse_axis(s).map_err(|e| e.to_string())
}

fn load(path: &Path) -> anyhow::Result<ScenarioSpec> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_scenario(&text)?)
}

struct Sink {
    format: OutputFormat,
    destination: Destination,
}

impl Sink {
    fn resolve(cli: &Cli, spec: Option<&ScenarioSpec>) -> Self {
        let base = spec.map(|s| s.output.clone()).unwrap_or_default();
        let destination = match &cli.out {
            Some(p) if p.as_os_str() == "-" => Destination::Stdout,
            Some(p) => Destination::Path(p.clone()),
            None => base.destination,
        };
        Self {
            format: cli.format.unwrap_or(base.format),
            destination,
        }
    }

    fn emit(&self, metadata: &[String], records: &[Record]) -> anyhow::Result<()> {
        let mut w: Box<dyn Write> = match &self.destination {
            Destination::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
            Destination::Path(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
        };
        match self.format {
            OutputFormat::Csv => write_csv(&mut w, metadata, records)?,
            OutputFormat::Json => write_json(&mut w, records)?,
        }
        w.flush()?;
        Ok(())
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let mut opts = RunOptions::default();
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(chiwave_core::Error::InvalidArgument(format!(
                "--tol must be positive, got {tol}"
            ))
            .into());
        }
        opts.tol = tol;
    }
    match &cli.command {
        Command::Run { spec } => {
            let spec = load(spec)?;
            log::info!("running {} on {} modes", spec.id, spec.config.n_modes());
            let records = run_scenario_with(&spec, &opts)?;
            Sink::resolve(cli, Some(&spec)).emit(&[], &records)
        }
        Command::Figure { id } => {
            let out = reproduce_figure(*id, &opts)?;
            Sink::resolve(cli, None).emit(&out.metadata, &out.records)
        }
        Command::Sweep { spec, axes } => {
            let spec = load(spec)?;
            let records = sweep_with(&spec, axes, &opts)?;
            let metadata: Vec<String> = axes
                .iter()
                .map(|a| format!("axis {}: {} points", a.name, a.values.len()))
                .collect();
            Sink::resolve(cli, Some(&spec)).emit(&metadata, &records)
        }
        Command::Validate { spec } => {
            let spec = load(spec)?;
            eprintln!(
                "{}: ok ({} modes, {} times)",
                spec.id,
                spec.config.n_modes(),
                spec.time_grid.points().len()
            );
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<chiwave_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(chiwave_core::Error::Io(_) | chiwave_core::Error::Json(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
