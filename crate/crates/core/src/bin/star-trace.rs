use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use star_trace::cli::{execute, Command, RunConfig};
use star_trace::Error;

#[derive(Parser)]
#[command(name = "star-trace", version, about = "Trace-formula checks for Schrödinger operators on star graphs")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Write the determinant scan as CSV.
    Scan,
    /// Locate eigenvalues and the zero-energy resonance multiplicity.
    Spectrum,
    /// Compute the asymptotic coefficients by both routes.
    Coefficients,
    /// Verify the trace identities, Levinson's formula and remainder decay.
    TraceCheck,
}

fn run(args: Args) -> Result<i32, Error> {
    let level = if args.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    let path = args.config.ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let out = args.out.unwrap_or_else(|| cfg.output.clone());
    let cmd = match args.command {
        Cmd::Scan => Command::Scan,
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Coefficients => Command::Coefficients,
        Cmd::TraceCheck => Command::TraceCheck,
    };
    let outcome = execute(cmd, &cfg, &out)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if !outcome.pass {
        log::warn!("verification failed");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
