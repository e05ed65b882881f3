//! Command-line front end: config ingestion, scenario dispatch, sweeps and
//! the validation runner.

pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod scenario;
pub mod sweep;
pub mod validate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dilaton_interferometry::optics::{field_grid, transverse_x, GridRegion, WaveSpec};
use dilaton_interferometry::DilatonParams;
use rayon::prelude::*;

use crate::config::{parse_config, parse_override, ConfigFile, Overrides, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{open_sink, write_record};
use crate::params::{ParamSet, Scenario};
use crate::sweep::SweepAxis;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "DILATON_AI_JOBS";

/// Sweep points evaluated per parallel batch before the batch is written.
const BATCH: usize = 1024;

#[derive(Debug, Parser)]
#[command(
    name = "dilaton-ai",
    version,
    about = "Atom-interferometer phases and light propagation in a dilaton background"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single Mach-Zehnder phase: engine breakdown against the closed form.
    Phase(RunArgs),
    /// Differential phase of two vertically separated devices.
    Gradiometer(RunArgs),
    /// Two-species equivalence-principle test and k reversal.
    Eep(RunArgs),
    /// Dark-matter gradiometer in microgravity.
    Darkmatter(RunArgs),
    /// Phase, amplitude and wave vector over a (t, z) grid.
    OpticsGrid(RunArgs),
    /// Engine, closed form and oracle over random draws; exit 1 on any failure.
    Validate(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Extra sweep axis `param=min:max:steps[:linear|log]`; repeatable.
    #[arg(long = "sweep", value_name = "AXIS")]
    pub sweep: Vec<String>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = JOBS_ENV, default_value_t = 0)]
    pub jobs: usize,
}

impl Command {
    pub fn split(self) -> (Scenario, RunArgs) {
        match self {
            Command::Phase(a) => (Scenario::Phase, a),
            Command::Gradiometer(a) => (Scenario::Gradiometer, a),
            Command::Eep(a) => (Scenario::Eep, a),
            Command::Darkmatter(a) => (Scenario::DarkMatter, a),
            Command::OpticsGrid(a) => (Scenario::OpticsGrid, a),
            Command::Validate(a) => (Scenario::Validate, a),
        }
    }
}

/// Builds the resolved configuration from command-line arguments.
pub fn resolve(scenario: Scenario, args: &RunArgs) -> CliResult<RunConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text)?
        }
        None => ConfigFile::default(),
    };
    let flags = Overrides {
        set: args.set.iter().map(|s| parse_override(s)).collect::<CliResult<_>>()?,
        sweep: args
            .sweep
            .iter()
            .map(|s| s.parse::<SweepAxis>())
            .collect::<CliResult<_>>()?,
        out: args.out.clone(),
    };
    RunConfig::resolve(scenario, file, flags)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let (scenario, args) = cli.command.split();
    let config = resolve(scenario, &args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Precondition(format!("cannot start {} workers: {e}", args.jobs)))?;
    pool.install(|| execute(&config))
}

/// Runs a resolved configuration and writes its output.
pub fn execute(config: &RunConfig) -> CliResult<()> {
    let path = config.out.as_deref();
    match config.scenario {
        Scenario::OpticsGrid => optics_grid(&config.params, path),
        Scenario::Validate => {
            let (seed, checks) = validate::run_checks(&config.params)?;
            let mut sink = open_sink(path)?;
            validate::write_report(&mut sink, seed, &checks)
                .and_then(|_| sink.flush())
                .map_err(|e| io_error(path, e))?;
            let failures = checks.iter().filter(|c| !c.pass).count();
            if failures > 0 {
                return Err(CliError::ValidationFailed {
                    failures,
                    checks: checks.len(),
                });
            }
            Ok(())
        }
        scenario => sweep(scenario, config, path),
    }
}

fn io_error(path: Option<&Path>, e: std::io::Error) -> CliError {
    CliError::io(path.unwrap_or(Path::new("<stdout>")), e)
}

fn sweep(scenario: Scenario, config: &RunConfig, path: Option<&Path>) -> CliResult<()> {
    let mut sink = open_sink(path)?;
    let total = config.sweep.len();
    let mut start = 0;
    while start < total {
        let end = (start + BATCH).min(total);
        let rows: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let point = config.sweep.point(&config.params, i);
                let mut row = point.values().to_vec();
                let outputs = scenario::evaluate(scenario, &point).map_err(|e| match e {
                    CliError::Physics(inner) => CliError::Precondition(format!("sweep point {i}: {inner}")),
                    CliError::Precondition(m) => CliError::Precondition(format!("sweep point {i}: {m}")),
                    other => other,
                })?;
                row.extend(outputs);
                Ok(row)
            })
            .collect::<CliResult<_>>()?;
        if start == 0 {
            writeln!(sink, "{}", scenario::header(scenario).join(",")).map_err(|e| io_error(path, e))?;
        }
        for row in &rows {
            write_record(&mut sink, row).map_err(|e| io_error(path, e))?;
        }
        start = end;
    }
    sink.flush().map_err(|e| io_error(path, e))
}

/// Grid CSV at `path`; the parameter table goes to `<path>.inputs.csv` so
/// the grid keeps its fixed six columns.
fn optics_grid(p: &ParamSet, path: Option<&Path>) -> CliResult<()> {
    let ctx = scenario::context(p)?;
    let wave = WaveSpec::new(
        [p.get("q_x_per_m"), p.get("q_y_per_m")],
        p.get("k_z_per_m"),
        p.get("a_in"),
        transverse_x(),
    )?;
    let dilaton = DilatonParams::new(
        p.get("rho0_bar"),
        p.get("k_rho_per_m"),
        p.get("omega_rho_rad_per_s"),
        p.get("phi_rho_rad"),
        p.get("lambda_rho_m"),
        p.get("beta_s_bar"),
        p.get("d_e"),
    )?;
    let region = GridRegion {
        t_min: p.get("t_min_s"),
        t_max: p.get("t_max_s"),
        z_min: p.get("z_min_m"),
        z_max: p.get("z_max_m"),
        n_t: p.count("n_t")?,
        n_z: p.count("n_z")?,
        length_scale: p.get("length_m"),
    };
    let grid = field_grid(&region, &wave, &dilaton, &ctx)?;
    let mut sink = open_sink(path)?;
    grid.write_csv(&mut sink)
        .and_then(|_| sink.flush())
        .map_err(|e| io_error(path, e))?;
    if let Some(path) = path {
        let mut inputs_path = path.as_os_str().to_owned();
        inputs_path.push(".inputs.csv");
        let inputs_path = PathBuf::from(inputs_path);
        let mut inputs = open_sink(Some(&inputs_path))?;
        writeln!(inputs, "{}", p.names().join(","))
            .and_then(|_| write_record(&mut inputs, p.values()))
            .and_then(|_| inputs.flush())
            .map_err(|e| CliError::io(&inputs_path, e))?;
    }
    Ok(())
}
