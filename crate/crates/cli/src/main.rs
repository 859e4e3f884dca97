use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use riesz_cli::{certificate_table, run, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "riesz", version, about = "Certificates for Schrödinger semigroups and Riesz transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the certificates selected by a TOML config.
    Run {
        config: PathBuf,
        /// Run a single certificate.
        #[arg(long)]
        only: Option<String>,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the certificates.
    List,
}

fn init_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var("RIESZ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| RunError::Config(format!("RIESZ_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| RunError::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            let rows = certificate_table();
            let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
            for (name, statement, grid) in rows {
                println!("{name:<w0$}  {statement}");
                println!("{:<w0$}  grid: {grid}", "");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, only, out } => {
            let result = init_threads().and_then(|_| {
                let cfg = ExperimentConfig::load(&config)?;
                let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
                run(&cfg, only.as_deref(), &out)
            });
            match result {
                Ok(outcome) => {
                    print!("{}", outcome.summary.render());
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("riesz: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
