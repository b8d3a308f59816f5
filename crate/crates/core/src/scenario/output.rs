//! Records and their CSV/JSON encodings.

use std::io::Write;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::Result;

pub const CSV_COLUMNS: [&str; 8] = [
    "scenario_id",
    "time",
    "observable",
    "i",
    "j",
    "k",
    "phi",
    "value",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Observable {
    Intensity,
    Duan,
    DuanCentered,
    Vlf,
    Covariance,
    SymplecticEigenvalue,
}

impl Observable {
    pub fn as_str(self) -> &'static str {
        match self {
            Observable::Intensity => "intensity",
            Observable::Duan => "duan",
            Observable::DuanCentered => "duan_centered",
            Observable::Vlf => "vlf",
            Observable::Covariance => "covariance",
            Observable::SymplecticEigenvalue => "symplectic_eigenvalue",
        }
    }
}

/// One value at one time. Indices are 1-based; unused ones are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub scenario_id: String,
    pub time: f64,
    pub observable: Observable,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub phi: Option<f64>,
    pub value: f64,
    /// Sweep coordinates, in axis order. Empty outside sweeps.
    pub coords: Vec<(String, f64)>,
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(8 + self.coords.len()))?;
        for (name, value) in &self.coords {
            map.serialize_entry(name, value)?;
        }
        map.serialize_entry("scenario_id", &self.scenario_id)?;
        map.serialize_entry("time", &self.time)?;
        map.serialize_entry("observable", self.observable.as_str())?;
        map.serialize_entry("i", &self.i)?;
        map.serialize_entry("j", &self.j)?;
        map.serialize_entry("k", &self.k)?;
        map.serialize_entry("phi", &self.phi)?;
        map.serialize_entry("value", &self.value)?;
        map.end()
    }
}

/// Shortest decimal that round-trips to the same `f64` (at most 17
/// significant digits). Exponent notation outside `[1e-5, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let a = x.abs();
    if x.is_finite() && (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt_index(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Metadata lines (prefixed `# `), header, then one line per record.
pub fn write_csv<W: Write>(mut w: W, metadata: &[String], records: &[Record]) -> Result<()> {
    for line in metadata {
        writeln!(w, "# {line}")?;
    }
    let axis_names: Vec<&str> = records
        .first()
        .map(|r| r.coords.iter().map(|(n, _)| n.as_str()).collect())
        .unwrap_or_default();
    let header: Vec<&str> = axis_names.iter().copied().chain(CSV_COLUMNS).collect();
    writeln!(w, "{}", header.join(","))?;
    for r in records {
        let mut fields: Vec<String> = r.coords.iter().map(|(_, v)| fmt_float(*v)).collect();
        fields.extend([
            r.scenario_id.clone(),
            fmt_float(r.time),
            r.observable.as_str().to_string(),
            opt_index(r.i),
            opt_index(r.j),
            opt_index(r.k),
            r.phi.map(fmt_float).unwrap_or_default(),
            fmt_float(r.value),
        ]);
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// A JSON array of record objects followed by a newline.
pub fn write_json<W: Write>(mut w: W, records: &[Record]) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, records)?;
    writeln!(w)?;
    Ok(())
}
