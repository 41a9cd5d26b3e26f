use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gravlat_cli::{run, Overrides};

/// Run one gravlat computation from a TOML config.
#[derive(Debug, Parser)]
#[command(name = "gravlat", version)]
struct Args {
    /// Path to the run configuration.
    config: PathBuf,
    /// Artifact directory (overrides `output`).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Sampling seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores (overrides `threads`).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides { output: args.output, seed: args.seed, threads: args.threads };
    let code = run(&args.config, &overrides, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
