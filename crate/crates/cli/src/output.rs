//! Output files and their readers.

use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const DENSITY_FILE: &str = "density.csv";
pub const PROFILE_FILE: &str = "profile.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const NETLIST_FILE: &str = "netlist.txt";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub re: f64,
    pub im: f64,
    /// `edge-lower`, `edge-upper`, `edge-left`, `edge-right` or `bulk`.
    pub class: String,
    pub k_label: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub x: f64,
    pub y: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub status: String,
    pub gamma_bar: Option<f64>,
    pub xi: Option<f64>,
    pub xi_lower: Option<f64>,
    pub xi_upper: Option<f64>,
    pub im_spread: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub gamma_eff_zigzag: Option<f64>,
    pub gamma_eff_armchair: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<i64>,
    pub max_deviation: Option<f64>,
    pub error: Option<String>,
}

/// Writes `rows` with a header, even when there are no rows.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(CliError::from)
}

pub const SPECTRUM_HEADER: [&str; 4] = ["re", "im", "class", "k_label"];
pub const DENSITY_HEADER: [&str; 3] = ["x", "y", "rho"];
pub const PROFILE_HEADER: [&str; 2] = ["x", "gamma"];
pub const SWEEP_HEADER: [&str; 14] = [
    "value",
    "status",
    "gamma_bar",
    "xi",
    "xi_lower",
    "xi_upper",
    "im_spread",
    "a1",
    "a2",
    "gamma_eff_zigzag",
    "gamma_eff_armchair",
    "Q",
    "max_deviation",
    "error",
];

pub fn write_spectrum(path: &Path, rows: &[SpectrumRow]) -> Result<(), CliError> {
    write_csv(path, &SPECTRUM_HEADER, rows)
}

pub fn read_spectrum(path: &Path) -> Result<Vec<SpectrumRow>, CliError> {
    read_csv(path)
}

pub fn write_density(path: &Path, rows: &[DensityRow]) -> Result<(), CliError> {
    write_csv(path, &DENSITY_HEADER, rows)
}

pub fn read_density(path: &Path) -> Result<Vec<DensityRow>, CliError> {
    read_csv(path)
}

pub fn write_profile(path: &Path, rows: &[ProfileRow]) -> Result<(), CliError> {
    write_csv(path, &PROFILE_HEADER, rows)
}

pub fn read_profile(path: &Path) -> Result<Vec<ProfileRow>, CliError> {
    read_csv(path)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    write_csv(path, &SWEEP_HEADER, rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    read_csv(path)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn write_summary(path: &Path, summary: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_netlist(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(CliError::from)
}

pub fn read_netlist(path: &Path) -> Result<nhcse_core::circuit::CircuitNetlist, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(nhcse_core::circuit::CircuitNetlist::from_text(&text)?)
}

pub fn ensure_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_including_missing_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let rows = vec![
            SpectrumRow { re: 0.1, im: -1e-17, class: "edge-lower".into(), k_label: Some(3.0) },
            SpectrumRow { re: -2.5, im: 0.0, class: "bulk".into(), k_label: None },
        ];
        write_spectrum(&p, &rows).unwrap();
        assert_eq!(read_spectrum(&p).unwrap(), rows);
        let sweep = vec![SweepRow {
            value: 0.2,
            status: "error".into(),
            error: Some("bad, \"quoted\"".into()),
            q: Some(1),
            ..SweepRow::default()
        }];
        write_sweep(&p, &sweep).unwrap();
        assert_eq!(read_sweep(&p).unwrap(), sweep);
    }

    #[test]
    fn empty_tables_keep_their_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        write_density(&p, &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "x,y,rho\n");
        assert!(read_density(&p).unwrap().is_empty());
    }
}
