//! `angmom`: run angular-momentum bookkeeping scenarios.
//!
//! Exit status: 0 ok, 1 config error, 2 invariant violation, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use angmom::report::Format;
use angmom::scenario::{run_scenario, Overrides, ScenarioConfig, BUNDLED};
use angmom::{Error, WrapPolicy};

#[derive(Parser)]
#[command(name = "angmom", version, about = "Per-outcome angular momentum ledgers for preparation and measurement chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario and write its report.
    Run {
        /// Path to a TOML scenario, or the name of a bundled one.
        scenario: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Seed for sampling. Switches an exhaustive scenario to sample mode.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sampled trials. Switches an exhaustive scenario to sample mode.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_enum)]
        wrap: Option<WrapArg>,
    },
    /// List the bundled scenarios.
    List,
    /// Print a bundled scenario's TOML.
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WrapArg {
    Error,
    Warn,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn load(scenario: &str) -> angmom::Result<ScenarioConfig> {
    let path = Path::new(scenario);
    if path.exists() {
        ScenarioConfig::from_path(path)
    } else if BUNDLED.iter().any(|(n, _)| *n == scenario) {
        ScenarioConfig::bundled(scenario)
    } else if scenario.ends_with(".toml") || scenario.contains('/') {
        Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{scenario}: no such file"),
        )))
    } else {
        ScenarioConfig::bundled(scenario)
    }
}

fn run(
    scenario: &str,
    out: Option<&Path>,
    format: Format,
    overrides: Overrides,
) -> angmom::Result<bool> {
    let mut config = load(scenario)?;
    config.apply_overrides(overrides);
    let report = run_scenario(&config)?;
    for w in &report.warnings {
        warn!("{w}");
    }
    let text = report.render(format)?;
    match out {
        Some(p) => {
            std::fs::write(p, text)?;
            info!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(!report.has_violations())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, _) in BUNDLED {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Show { name } => match BUNDLED.iter().find(|(n, _)| *n == name) {
            Some((_, text)) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: no bundled scenario named {name:?}");
                ExitCode::from(1)
            }
        },
        Command::Run { scenario, out, format, seed, trials, wrap } => {
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            };
            let overrides = Overrides {
                seed,
                trials,
                wrap_policy: wrap.map(|w| match w {
                    WrapArg::Error => WrapPolicy::Error,
                    WrapArg::Warn => WrapPolicy::Warn,
                }),
            };
            match run(&scenario, out.as_deref(), format, overrides) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(2),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
    }
}
