use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhcse_cli::config::{Scenario, ScenarioConfig, SWEEPABLE};
use nhcse_cli::output::{write_summary, write_sweep, SUMMARY_FILE, SWEEP_FILE};
use nhcse_cli::{error_summary, load_config, run_to_dir, sweep, CliError};

#[derive(Parser)]
#[command(name = "nhcse", version, about = "Chiral edge states of the dissipative Haldane model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its tables and summary.
    Run {
        /// Scenario name; overrides the one in the config.
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory [default: the config's `output`, else out/<scenario>].
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also render SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Run a scenario for each value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, help = format!("one of: {}", SWEEPABLE.join(", ")))]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Output directory for sweep.csv [default: the config's `output`, else out/sweep].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("NHCSE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("NHCSE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn resolve_run(
    scenario: Option<String>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    svg: bool,
) -> Result<ScenarioConfig, CliError> {
    let mut c = match (&config, &scenario) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => ScenarioConfig::new(name.parse()?),
        (None, None) => return Err(CliError::Config("give a scenario name or --config".into())),
    };
    if let Some(name) = scenario {
        c.scenario = name.parse()?;
    }
    if let Some(s) = seed {
        c.seed = s;
    }
    c.svg |= svg;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<14} {}", s.name(), s.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, config, out, seed, svg } => {
            let fallback = scenario.clone().unwrap_or_else(|| "run".into());
            let resolved = resolve_run(scenario, config, seed, svg);
            let dir = out
                .or_else(|| resolved.as_ref().ok().and_then(|c| c.output.clone()))
                .unwrap_or_else(|| {
                    let name = resolved.as_ref().map(|c| c.scenario.name().to_string()).unwrap_or(fallback);
                    PathBuf::from("out").join(name)
                });
            let result = resolved.and_then(|c| run_to_dir(&c, &dir).map(|s| (c, s)));
            match result {
                Ok((c, summary)) => {
                    println!("{}: wrote {}", c.scenario, dir.display());
                    if let Some(q) = summary.get("Q") {
                        println!("Q = {q}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    // config errors happen before the run can write its own summary
                    let path = dir.join(SUMMARY_FILE);
                    if !path.exists() && std::fs::create_dir_all(&dir).is_ok() {
                        let _ = write_summary(&path, &error_summary(None, &e));
                    }
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Sweep { config, param, values, out } => {
            let result = (|| {
                let base = load_config(&config)?;
                let values = sweep::parse_values(&values)?;
                let dir = out.or_else(|| base.output.clone()).unwrap_or_else(|| PathBuf::from("out").join("sweep"));
                std::fs::create_dir_all(&dir)?;
                let rows = sweep::sweep(&base, &param, &values)?;
                let path = dir.join(SWEEP_FILE);
                write_sweep(&path, &rows)?;
                Ok::<_, CliError>((path, rows))
            })();
            match result {
                Ok((path, rows)) => {
                    let failed = rows.iter().filter(|r| r.status != "ok").count();
                    println!("wrote {} ({} rows, {failed} failed)", path.display(), rows.len());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
