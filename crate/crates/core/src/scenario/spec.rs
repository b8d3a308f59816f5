//! Scenario files.
//!
//! Flat key–value text grouped in sections, one assignment per line, `#`
//! starts a comment, lists are comma separated:
//!
//! ```text
//! [array]
//! n_modes = 2
//! pump_gains = 0.4          # one value is broadcast to every waveguide
//! link_couplings = 1
//! loss_rate = 0
//!
//! [input]
//! state = coherent          # vacuum | coherent
//! site = 1
//! amplitude = 5, 0          # real part, optional imaginary part
//!
//! [time]
//! t_max = 5                 # uniform grid 0..=t_max in `steps` intervals
//! steps = 200
//! # times = 0, 0.5, 1       # or an explicit ascending list
//!
//! [observables]
//! intensities = true
//! duan_pairs = all          # all | none | 1-2, 2-3
//! duan_centered = false
//! vlf_triples = 2-1-3
//! covariance = false
//! symplectic_spectrum = false
//! phase = 0                 # radians, or `minimize`
//!
//! [output]
//! id = my-run
//! format = csv              # csv | json
//! path = -                  # `-` is standard output
//! ```
//!
//! Unknown sections, unknown keys and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::kernels::C64;
use crate::model::{ArrayConfig, ModeIndex};
use crate::scenario::output::fmt_float;
use crate::{Error, Result};

pub const DEFAULT_T_MAX: f64 = 5.0;
pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_ID: &str = "scenario";

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "array",
        &["n_modes", "pump_gains", "link_couplings", "loss_rate"],
    ),
    ("input", &["state", "site", "amplitude"]),
    ("time", &["t_max", "steps", "times"]),
    (
        "observables",
        &[
            "intensities",
            "duan_pairs",
            "duan_centered",
            "vlf_triples",
            "covariance",
            "symplectic_spectrum",
            "phase",
        ],
    ),
    ("output", &["id", "format", "path"]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    Vacuum,
    Coherent { site: ModeIndex, amplitude: C64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeGrid {
    /// `steps + 1` points from 0 to `t_max` inclusive.
    Uniform {
        t_max: f64,
        steps: usize,
    },
    Explicit(Vec<f64>),
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            TimeGrid::Uniform { t_max, steps } => (0..=*steps)
                .map(|k| t_max * k as f64 / *steps as f64)
                .collect(),
            TimeGrid::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSelection {
    All,
    List(Vec<(ModeIndex, ModeIndex)>),
}

impl PairSelection {
    pub fn pairs(&self, n_modes: usize) -> Vec<(ModeIndex, ModeIndex)> {
        match self {
            PairSelection::All => (1..=n_modes)
                .flat_map(|j| (j + 1..=n_modes).map(move |k| (j, k)))
                .map(|(j, k)| (ModeIndex::new(j).unwrap(), ModeIndex::new(k).unwrap()))
                .collect(),
            PairSelection::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSet {
    pub intensities: bool,
    pub duan_pairs: Option<PairSelection>,
    /// Remove first moments before forming the Duan correlation.
    pub duan_centered: bool,
    pub vlf_triples: Vec<(ModeIndex, ModeIndex, ModeIndex)>,
    pub covariance: bool,
    pub symplectic_spectrum: bool,
}

impl ObservableSet {
    pub fn is_empty(&self) -> bool {
        !self.intensities
            && self.duan_pairs.is_none()
            && self.vlf_triples.is_empty()
            && !self.covariance
            && !self.symplectic_spectrum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseChoice {
    Fixed(f64),
    /// Minimise the Duan correlation over a uniform grid of phases.
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::validation(
                "output.format",
                format!("expected csv or json, got `{other}`"),
            )),
        }
    }
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Destination {
    #[default]
    Stdout,
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub destination: Destination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub id: String,
    pub config: ArrayConfig,
    pub input: InputState,
    pub time_grid: TimeGrid,
    pub observables: ObservableSet,
    pub phase: PhaseChoice,
    pub output: OutputSpec,
}

impl ScenarioSpec {
    /// Vacuum input, intensities only, default grid and output.
    pub fn new(id: impl Into<String>, config: ArrayConfig) -> Self {
        Self {
            id: id.into(),
            config,
            input: InputState::Vacuum,
            time_grid: TimeGrid::Uniform {
                t_max: DEFAULT_T_MAX,
                steps: DEFAULT_STEPS,
            },
            observables: ObservableSet {
                intensities: true,
                ..Default::default()
            },
            phase: PhaseChoice::Fixed(0.0),
            output: OutputSpec::default(),
        }
    }

    /// Check every cross-field invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.config.n_modes();
        if self.id.is_empty() || self.id.contains([',', '"', '\n', '\r', '#']) {
            return Err(Error::validation(
                "output.id",
                "must be non-empty and free of `,`, `\"`, `#` and newlines",
            ));
        }
        if let InputState::Coherent { site, amplitude } = &self.input {
            site.checked(n)
                .map_err(|e| Error::validation("input.site", e.to_string()))?;
            if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
                return Err(Error::validation("input.amplitude", "must be finite"));
            }
        }
        match &self.time_grid {
            TimeGrid::Uniform { t_max, steps } => {
                if !(t_max.is_finite() && *t_max >= 0.0) {
                    return Err(Error::validation("time.t_max", "must be finite and >= 0"));
                }
                if *steps == 0 {
                    return Err(Error::validation("time.steps", "must be at least 1"));
                }
            }
            TimeGrid::Explicit(times) => {
                if times.is_empty() {
                    return Err(Error::validation("time.times", "time grid is empty"));
                }
                if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(Error::validation(
                        "time.times",
                        "times must be finite and >= 0",
                    ));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::validation(
                        "time.times",
                        "times must be strictly ascending",
                    ));
                }
            }
        }
        let obs = &self.observables;
        if obs.is_empty() {
            return Err(Error::validation(
                "observables",
                "request at least one observable",
            ));
        }
        if let Some(PairSelection::List(pairs)) = &obs.duan_pairs {
            if pairs.is_empty() {
                return Err(Error::validation(
                    "observables.duan_pairs",
                    "empty pair list",
                ));
            }
            for (j, k) in pairs {
                check_indices("observables.duan_pairs", n, &[*j, *k])?;
            }
        }
        if obs.duan_pairs.is_some() && n < 2 {
            return Err(Error::validation(
                "observables.duan_pairs",
                "needs at least two waveguides",
            ));
        }
        for (i, j, k) in &obs.vlf_triples {
            check_indices("observables.vlf_triples", n, &[*i, *j, *k])?;
        }
        if let PhaseChoice::Fixed(phi) = self.phase {
            if !phi.is_finite() {
                return Err(Error::validation("observables.phase", "must be finite"));
            }
        }
        Ok(())
    }
}

fn check_indices(field: &str, n: usize, idx: &[ModeIndex]) -> Result<()> {
    for (a, ia) in idx.iter().enumerate() {
        if ia.get() > n {
            return Err(Error::validation(
                field,
                format!("index {ia} exceeds n_modes = {n}"),
            ));
        }
        if idx[a + 1..].contains(ia) {
            return Err(Error::validation(field, format!("index {ia} repeated")));
        }
    }
    Ok(())
}

struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<&'static str, BTreeMap<&'static str, Entry>>;

fn tokenize(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<(&'static str, &'static [&'static str])> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Syntax {
                    line,
                    message: "unterminated section header".into(),
                })?
                .trim();
            let (known, keys) =
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .ok_or_else(|| Error::Syntax {
                        line,
                        message: format!("unknown section [{name}]"),
                    })?;
            if sections.contains_key(known) {
                return Err(Error::Syntax {
                    line,
                    message: format!("section [{name}] repeated"),
                });
            }
            sections.insert(known, BTreeMap::new());
            current = Some((known, keys));
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let (section, keys) = current.ok_or_else(|| Error::Syntax {
            line,
            message: format!("`{key}` appears before any section"),
        })?;
        let known = keys
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::Syntax {
                line,
                message: format!("unknown key `{key}` in [{section}]"),
            })?;
        let table = sections
            .get_mut(section)
            .expect("section inserted on header");
        if table.contains_key(known) {
            return Err(Error::Syntax {
                line,
                message: format!("key `{key}` repeated in [{section}]"),
            });
        }
        table.insert(
            known,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(sections)
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl<'a> Reader<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a Entry> {
        self.sections.get(section).and_then(|t| t.get(key))
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|e| parse_float(e.line, &e.value))
            .transpose()
    }

    fn floats(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key)
            .map(|e| {
                if e.value.is_empty() {
                    return Ok(Vec::new());
                }
                e.value
                    .split(',')
                    .map(|v| parse_float(e.line, v.trim()))
                    .collect()
            })
            .transpose()
    }

    fn uint(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| Error::Syntax {
                    line: e.line,
                    message: format!("`{key}` expects a non-negative integer, got `{}`", e.value),
                })
            })
            .transpose()
    }

    fn boolean(&self, section: &str, key: &str) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(false),
            Some(e) => match e.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(Error::Syntax {
                    line: e.line,
                    message: format!("`{key}` expects true or false, got `{other}`"),
                }),
            },
        }
    }

    fn text(&self, section: &str, key: &str) -> Option<&'a str> {
        self.get(section, key).map(|e| e.value.as_str())
    }
}

fn parse_float(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Syntax {
        line,
        message: format!("expected a number, got `{s}`"),
    })
}

fn parse_tuples(line: usize, s: &str, arity: usize) -> Result<Vec<Vec<ModeIndex>>> {
    s.split(',')
        .map(|item| {
            let parts: Vec<&str> = item.trim().split('-').map(str::trim).collect();
            if parts.len() != arity {
                return Err(Error::Syntax {
                    line,
                    message: format!(
                        "expected {arity} dash-separated indices, got `{}`",
                        item.trim()
                    ),
                });
            }
            parts
                .iter()
                .map(|p| {
                    p.parse::<usize>()
                        .ok()
                        .and_then(|v| ModeIndex::new(v).ok())
                        .ok_or_else(|| Error::Syntax {
                            line,
                            message: format!("`{p}` is not a 1-based mode index"),
                        })
                })
                .collect()
        })
        .collect()
}

fn broadcast(field: &'static str, mut values: Vec<f64>, len: usize) -> Result<Vec<f64>> {
    if values.len() == 1 && len > 1 {
        values = vec![values[0]; len];
    }
    if values.len() != len {
        return Err(Error::validation(
            field,
            format!(
                "expected {len} values (or one to broadcast), got {}",
                values.len()
            ),
        ));
    }
    Ok(values)
}

/// Parse and validate a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let sections = tokenize(text)?;
    let r = Reader {
        sections: &sections,
    };

    let n_modes = r
        .uint("array", "n_modes")?
        .ok_or_else(|| Error::validation("array.n_modes", "required"))?;
    if n_modes == 0 {
        return Err(Error::validation("array.n_modes", "must be at least 1"));
    }
    let gains = r
        .floats("array", "pump_gains")?
        .ok_or_else(|| Error::validation("array.pump_gains", "required"))?;
    let gains = broadcast("array.pump_gains", gains, n_modes)?;
    let links = match r.floats("array", "link_couplings")? {
        Some(v) if n_modes == 1 && v.len() == 1 => Vec::new(),
        Some(v) => broadcast("array.link_couplings", v, n_modes - 1)?,
        None if n_modes == 1 => Vec::new(),
        None => {
            return Err(Error::validation(
                "array.link_couplings",
                "required when n_modes > 1",
            ))
        }
    };
    let loss = r.float("array", "loss_rate")?.unwrap_or(0.0);
    let config = ArrayConfig::new(n_modes, gains, links, loss).map_err(|e| match e {
        Error::InvalidConfig { field, reason } => {
            Error::validation(format!("array.{field}"), reason)
        }
        other => other,
    })?;

    let input = match r.text("input", "state").unwrap_or("vacuum") {
        "vacuum" => {
            if r.get("input", "site").is_some() || r.get("input", "amplitude").is_some() {
                return Err(Error::validation(
                    "input.state",
                    "site/amplitude given for a vacuum input",
                ));
            }
            InputState::Vacuum
        }
        "coherent" => {
            let site = r
                .uint("input", "site")?
                .ok_or_else(|| Error::validation("input.site", "required for coherent input"))?;
            let site =
                ModeIndex::new(site).map_err(|e| Error::validation("input.site", e.to_string()))?;
            let amp = r.floats("input", "amplitude")?.ok_or_else(|| {
                Error::validation("input.amplitude", "required for coherent input")
            })?;
            let amplitude = match amp.as_slice() {
                [re] => C64::new(*re, 0.0),
                [re, im] => C64::new(*re, *im),
                _ => {
                    return Err(Error::validation(
                        "input.amplitude",
                        "expects `re` or `re, im`",
                    ))
                }
            };
            InputState::Coherent { site, amplitude }
        }
        other => {
            return Err(Error::validation(
                "input.state",
                format!("expected vacuum or coherent, got `{other}`"),
            ))
        }
    };

    let time_grid = match r.floats("time", "times")? {
        Some(times) => {
            if r.get("time", "t_max").is_some() || r.get("time", "steps").is_some() {
                return Err(Error::validation(
                    "time.times",
                    "cannot be combined with t_max/steps",
                ));
            }
            TimeGrid::Explicit(times)
        }
        None => TimeGrid::Uniform {
            t_max: r.float("time", "t_max")?.unwrap_or(DEFAULT_T_MAX),
            steps: r.uint("time", "steps")?.unwrap_or(DEFAULT_STEPS),
        },
    };

    let duan_pairs = match r.get("observables", "duan_pairs") {
        None => None,
        Some(e) => match e.value.as_str() {
            "none" => None,
            "all" => Some(PairSelection::All),
            list => Some(PairSelection::List(
                parse_tuples(e.line, list, 2)?
                    .into_iter()
                    .map(|v| (v[0], v[1]))
                    .collect(),
            )),
        },
    };
    let vlf_triples = match r.get("observables", "vlf_triples") {
        None => Vec::new(),
        Some(e) if e.value == "none" => Vec::new(),
        Some(e) => parse_tuples(e.line, &e.value, 3)?
            .into_iter()
            .map(|v| (v[0], v[1], v[2]))
            .collect(),
    };
    let observables = ObservableSet {
        intensities: r.boolean("observables", "intensities")?,
        duan_pairs,
        duan_centered: r.boolean("observables", "duan_centered")?,
        vlf_triples,
        covariance: r.boolean("observables", "covariance")?,
        symplectic_spectrum: r.boolean("observables", "symplectic_spectrum")?,
    };
    let phase = match r.get("observables", "phase") {
        None => PhaseChoice::Fixed(0.0),
        Some(e) if e.value == "minimize" => PhaseChoice::Minimize,
        Some(e) => PhaseChoice::Fixed(parse_float(e.line, &e.value)?),
    };

    let output = OutputSpec {
        format: r
            .text("output", "format")
            .map(str::parse)
            .transpose()?
            .unwrap_or_default(),
        destination: match r.text("output", "path") {
            None | Some("-") => Destination::Stdout,
            Some("") => return Err(Error::validation("output.path", "empty path")),
            Some(p) => Destination::Path(PathBuf::from(p)),
        },
    };

    let spec = ScenarioSpec {
        id: r.text("output", "id").unwrap_or(DEFAULT_ID).to_string(),
        config,
        input,
        time_grid,
        observables,
        phase,
        output,
    };
    spec.validate()?;
    Ok(spec)
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_float(*v))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text form; `parse_scenario(&emit_spec(s)) == s`.
pub fn emit_spec(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let cfg = &spec.config;
    let _ = writeln!(out, "[array]");
    let _ = writeln!(out, "n_modes = {}", cfg.n_modes());
    let _ = writeln!(out, "pump_gains = {}", join_floats(cfg.pump_gains()));
    if !cfg.link_couplings().is_empty() {
        let _ = writeln!(
            out,
            "link_couplings = {}",
            join_floats(cfg.link_couplings())
        );
    }
    let _ = writeln!(out, "loss_rate = {}", fmt_float(cfg.loss_rate()));

    let _ = writeln!(out, "\n[input]");
    match &spec.input {
        InputState::Vacuum => {
            let _ = writeln!(out, "state = vacuum");
        }
        InputState::Coherent { site, amplitude } => {
            let _ = writeln!(out, "state = coherent");
            let _ = writeln!(out, "site = {site}");
            let _ = writeln!(
                out,
                "amplitude = {}, {}",
                fmt_float(amplitude.re),
                fmt_float(amplitude.im)
            );
        }
    }

    let _ = writeln!(out, "\n[time]");
    match &spec.time_grid {
        TimeGrid::Uniform { t_max, steps } => {
            let _ = writeln!(out, "t_max = {}", fmt_float(*t_max));
            let _ = writeln!(out, "steps = {steps}");
        }
        TimeGrid::Explicit(times) => {
            let _ = writeln!(out, "times = {}", join_floats(times));
        }
    }

    let obs = &spec.observables;
    let _ = writeln!(out, "\n[observables]");
    let _ = writeln!(out, "intensities = {}", obs.intensities);
    let pairs = match &obs.duan_pairs {
        None => "none".to_string(),
        Some(PairSelection::All) => "all".to_string(),
        Some(PairSelection::List(v)) => v
            .iter()
            .map(|(j, k)| format!("{j}-{k}"))
            .collect::<Vec<_>>()
            .join(", "),
    };
    let _ = writeln!(out, "duan_pairs = {pairs}");
    let _ = writeln!(out, "duan_centered = {}", obs.duan_centered);
    let triples = if obs.vlf_triples.is_empty() {
        "none".to_string()
    } else {
        obs.vlf_triples
            .iter()
            .map(|(i, j, k)| format!("{i}-{j}-{k}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let _ = writeln!(out, "vlf_triples = {triples}");
    let _ = writeln!(out, "covariance = {}", obs.covariance);
    let _ = writeln!(out, "symplectic_spectrum = {}", obs.symplectic_spectrum);
    let phase = match spec.phase {
        PhaseChoice::Fixed(p) => fmt_float(p),
        PhaseChoice::Minimize => "minimize".to_string(),
    };
    let _ = writeln!(out, "phase = {phase}");

    let _ = writeln!(out, "\n[output]");
    let _ = writeln!(out, "id = {}", spec.id);
    let _ = writeln!(out, "format = {}", spec.output.format.as_str());
    let path = match &spec.output.destination {
        Destination::Stdout => "-".to_string(),
        Destination::Path(p) => p.display().to_string(),
    };
    let _ = writeln!(out, "path = {path}");
    out
}
