use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use floquet_walk::{run, threads_from_env, CliError, THREADS_ENV};

/// Runs one experiment and writes its CSV tables and manifest.json.
#[derive(Parser)]
#[command(name = "floquet-walk", version, after_help = format!(
    "Experiments: triangle-sweep, switch, chain, nnn-1d, star-cbg, waveguides, error-scaling, period-bound.\n\
     Worker threads: set {THREADS_ENV}."
))]
struct Args {
    /// Experiment kind.
    experiment: String,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = configure_threads().and_then(|()| run(&args.experiment, &args.config, args.out.as_deref()));
    match result {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
