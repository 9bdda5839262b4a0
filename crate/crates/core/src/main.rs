use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hermite_rolle::experiment::{run_experiment, ExperimentConfig, ExperimentError};
use hermite_rolle::DifferentiableFunction;

#[derive(Parser)]
#[command(name = "hermite-rolle", version, about = "Rolle-function recovery and error correction for Hermite interpolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the report files.
    Run(Box<RunArgs>),
    /// List the built-in target functions.
    Functions,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    function: Option<String>,
    /// Comma-separated, strictly increasing.
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long = "xz-offset")]
    xz_offset: Option<String>,
    #[arg(long = "right-margin")]
    right_margin: Option<String>,
    #[arg(long = "grid")]
    bootstrap_grid: Option<String>,
    /// Comma-separated least-squares degrees.
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long, overrides_with = "no_spline")]
    spline: bool,
    #[arg(long = "no-spline")]
    no_spline: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("function", &args.function),
        ("nodes", &args.nodes),
        ("steps", &args.steps),
        ("xz_offset", &args.xz_offset),
        ("right_margin", &args.right_margin),
        ("bootstrap_grid", &args.bootstrap_grid),
        ("degrees", &args.degrees),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if args.spline {
        cfg.spline = true;
    }
    if args.no_spline {
        cfg.spline = false;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Functions => {
            for name in DifferentiableFunction::BUILTIN_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let result = build_config(&args).and_then(|cfg| run_experiment(&cfg, args.out.as_deref()));
            match result {
                Ok(report) => {
                    print!("{report}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
