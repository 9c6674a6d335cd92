use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entdyn_cli::bundles::{scenario_fig1, scenario_fig2, write_fig1, write_fig2, BundleOptions};
use entdyn_cli::export::{export, format_float, table_bytes, write_atomic};
use entdyn_cli::oracle::{parse_pairs, OracleArgs, OracleId};
use entdyn_cli::validate::run_property_suite;
use entdyn_cli::{run_scenario, CliError, Format, Result, Scenario};
use entdyn_core::lindblad::linear_grid;

#[derive(Parser)]
#[command(name = "entdyn", version, about = "Entanglement dynamics of qudit pairs under local decoherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a TOML file
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Overrides the scenario seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides a scenario key, e.g. `--set model.nbar=0.2`
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Quasi-pure decay for d = 3..7 and the d = 3 bounds, with fitted exponents
    Fig1 {
        #[arg(long, default_value = "fig1")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Grid size of the run with the numerical bounds
        #[arg(long, default_value_t = 31)]
        bounds_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Thermal and infinite-temperature qudit runs against the qubit closed forms
    Fig2 {
        #[arg(long, default_value = "fig2")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a closed-form curve on a time grid
    Oracle {
        #[arg(long)]
        formula: OracleId,
        /// Comma-separated key=value pairs, e.g. `gamma=1,nbar=0.1,kind=psi_plus`
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized invariant suite
    Validate {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn evolve(config: &Path, out: &Path, format: Format, seed: Option<u64>, overrides: &[String]) -> Result<()> {
    let mut overrides = overrides.to_vec();
    if let Some(s) = seed {
        overrides.push(format!("seed={s}"));
    }
    let scenario = Scenario::load(config, &overrides)?;
    let series = run_scenario(&scenario)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io { path: out.into(), source: e })?;
    let path = out.join(format!("{}.{}", scenario.name, format.extension()));
    export(&series, format, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn oracle(formula: OracleId, params: &str, tmax: f64, points: usize, out: Option<&Path>) -> Result<()> {
    let args = OracleArgs::from_pairs(&parse_pairs(params)?, formula)?;
    let times = linear_grid(tmax, points);
    let values = formula.eval_grid(&args, &times)?;
    let header = vec!["t".to_string(), format!("c_{formula}")];
    let bytes = table_bytes(&header, times.iter().zip(&values).map(|(t, c)| vec![format_float(*t), format_float(*c)]))?;
    match out {
        Some(path) => write_atomic(path, &bytes),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn validate(samples: usize, seed: u64) -> Result<bool> {
    let outcomes = run_property_suite(samples, seed)?;
    for o in &outcomes {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {} (worst {:.3e}, tol {:.0e}, {} samples)", o.name, o.worst, o.tolerance, o.samples);
    }
    Ok(outcomes.iter().all(|o| o.passed()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Evolve { config, out, format, seed, overrides } => evolve(&config, &out, format, seed, &overrides)?,
        Command::Fig1 { out, format, points, bounds_points, seed } => {
            let bundle = scenario_fig1(&BundleOptions { n_points: points, bounds_points, seed })?;
            for path in write_fig1(&bundle, &out, format)? {
                println!("{}", path.display());
            }
        }
        Command::Fig2 { out, format, points, seed } => {
            let bundle = scenario_fig2(&BundleOptions { n_points: points, seed, ..Default::default() })?;
            for path in write_fig2(&bundle, &out, format)? {
                println!("{}", path.display());
            }
        }
        Command::Oracle { formula, params, tmax, points, out } => {
            oracle(formula, &params, tmax, points, out.as_deref())?
        }
        Command::Validate { samples, seed } => return validate(samples, seed),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
