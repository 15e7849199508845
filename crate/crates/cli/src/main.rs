use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trapsim::reference::bundled;
use trapsim::scenario::{self, ScenarioConfig};
use trapsim::Error;

/// Trapped-ion multiqubit gate simulator.
#[derive(Parser)]
#[command(name = "trapsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report and traces.
    Run {
        /// Config file, or the name of a bundled scenario.
        config: String,
        /// Also write an SVG plot of the traces.
        #[arg(long)]
        plot: bool,
    },
    /// Rerun a scenario for several values of one numeric key.
    Sweep {
        config: String,
        #[arg(long)]
        key: String,
        /// Comma-separated values; may be empty.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Print equilibrium positions and normal modes.
    Modes { config: String },
    /// Regenerate every published table from the bundled scenarios.
    Tables {
        /// Output directory (default `out`, or $TRAPSIM_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    List,
}

fn load(config: &str) -> Result<ScenarioConfig, Error> {
    let path = Path::new(config);
    if path.exists() {
        return ScenarioConfig::from_file(path);
    }
    match bundled(config) {
        Some(b) => {
            let mut cfg = ScenarioConfig::parse(b.text)?;
            cfg.name = b.name.to_string();
            cfg.out_dir = Path::new("out").join(b.name);
            Ok(cfg)
        }
        None => Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file or bundled scenario",
            ),
        }),
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { config, plot } => {
            let mut cfg = load(&config)?;
            cfg.plot |= plot;
            let out = scenario::run(&cfg)?;
            print!("{}", out.simulation.report.to_table());
            println!("wrote {} files to {}", out.files.len(), out.dir.display());
        }
        Command::Sweep {
            config,
            key,
            values,
        } => {
            let cfg = load(&config)?;
            let (summary, path) = scenario::sweep(&cfg, &key, &values)?;
            print!("{}", summary.to_csv());
            println!("wrote {}", path.display());
        }
        Command::Modes { config } => {
            let cfg = load(&config)?;
            print!("{}", scenario::modes(&cfg)?);
        }
        Command::Tables { out } => {
            let dir = out
                .or_else(|| {
                    std::env::var_os(scenario::OUT_ENV)
                        .filter(|v| !v.is_empty())
                        .map(PathBuf::from)
                })
                .unwrap_or_else(|| PathBuf::from("out"));
            let result = scenario::tables(Some(&dir))?;
            print!("{}", result.text);
            println!("wrote {}", dir.join("tables.txt").display());
        }
        Command::List => {
            for b in trapsim::reference::BUNDLED {
                println!("{}", b.name);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
