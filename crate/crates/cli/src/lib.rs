//! Command-line front end: scenario configs, runs, sweeps and output files.

pub mod config;
pub mod output;
pub mod plot;
pub mod runner;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use thiserror::Error;

use config::ScenarioConfig;
use output::{
    write_density, write_netlist, write_profile, write_spectrum, write_summary, DENSITY_FILE, NETLIST_FILE,
    PROFILE_FILE, SPECTRUM_FILE, SUMMARY_FILE,
};
use runner::Tables;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nhcse_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("plot: {0}")]
    Plot(String),
}

impl CliError {
    /// Stable identifier written to error summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(_) => "numerics",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Plot(_) => "plot",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "kind": self.kind(), "message": self.to_string() })
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_json(&text)
}

fn write_tables(dir: &Path, suffix: &str, t: &Tables, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let name = |file: &str| {
        let (stem, ext) = file.rsplit_once('.').expect("file names have extensions");
        dir.join(format!("{stem}{suffix}.{ext}"))
    };
    let files = [name(SPECTRUM_FILE), name(DENSITY_FILE), name(PROFILE_FILE)];
    write_spectrum(&files[0], &t.spectrum)?;
    write_density(&files[1], &t.density)?;
    write_profile(&files[2], &t.profile)?;
    let mut written = files.to_vec();
    if svg {
        let svgs = [name("spectrum.svg"), name("density.svg"), name("profile.svg")];
        plot::spectrum_svg(&svgs[0], &t.spectrum)?;
        plot::density_svg(&svgs[1], &t.density)?;
        plot::profile_svg(&svgs[2], &t.profile)?;
        written.extend(svgs);
    }
    Ok(written)
}

/// Runs `config` and writes every output file into `dir`.
///
/// On failure a summary with `"status": "error"` is still written when
/// the directory is usable, and the error is returned.
pub fn run_to_dir(config: &ScenarioConfig, dir: &Path) -> Result<Value, CliError> {
    output::ensure_dir(dir)?;
    match run_and_write(config, dir) {
        Ok(summary) => Ok(summary),
        Err(e) => {
            let summary = error_summary(Some(config), &e);
            write_summary(&dir.join(SUMMARY_FILE), &summary)?;
            Err(e)
        }
    }
}

fn run_and_write(config: &ScenarioConfig, dir: &Path) -> Result<Value, CliError> {
    let out = runner::run(config)?;
    let mut files = write_tables(dir, "", &out.tables, config.svg)?;
    for (suffix, t) in &out.extras {
        files.extend(write_tables(dir, suffix, t, config.svg)?);
    }
    if let Some(text) = &out.netlist {
        let p = dir.join(NETLIST_FILE);
        write_netlist(&p, text)?;
        files.push(p);
    }
    let mut summary = out.summary(config);
    let names: Vec<String> =
        files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect();
    summary["files"] = json!(names);
    write_summary(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

pub fn error_summary(config: Option<&ScenarioConfig>, e: &CliError) -> Value {
    json!({
        "status": "error",
        "scenario": config.map(|c| c.scenario.name()),
        "seed": config.map(|c| c.seed),
        "error": e.to_json(),
    })
}
