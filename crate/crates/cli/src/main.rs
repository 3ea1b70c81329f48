use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use mvmfdr_cli::{parse_config, run, CliResult, Command, CovarianceChoice, OutputFormat};

/// Wideband MVDR / multi-frequency distortionless beamformer experiments.
#[derive(Debug, Parser)]
#[command(name = "mvmfdr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct Opts {
    /// Scenario configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; overrides run.output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// RNG seed; overrides run.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    covariance: Option<CovarianceChoice>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

fn execute(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let path = cli.opts.config.ok_or_else(|| mvmfdr_cli::CliError::Syntax {
        path: PathBuf::from("-"),
        message: "missing --config <PATH>".into(),
    })?;
    let cfg = parse_config(&path)?
        .with_seed(cli.opts.seed)
        .with_covariance(cli.opts.covariance)
        .with_format(cli.opts.format)
        .with_output(cli.opts.out);
    run(cli.command, &cfg)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code())
        }
    }
}
