use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fv0::cli::{run_and_emit, OutputFormat, RunConfig, RunMode, EXIT_CONFIG, EXIT_NUMERICAL};

/// Bound states of a spin-0 particle in a Coulomb plus short-range potential.
#[derive(Debug, Parser)]
#[command(name = "fv0", version)]
struct Args {
    /// Run configuration, one `key = value` per line.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `mode` key: sch, fv0 or fv0s.
    #[arg(long)]
    mode: Option<String>,
    /// text or csv.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &Args) -> Result<RunConfig, fv0::cli::ConfigError> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(m) = &args.mode {
        cfg.mode = m.parse::<RunMode>()?;
    }
    if let Some(f) = &args.format {
        cfg.format = f.parse::<OutputFormat>()?;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut stderr = io::stderr();
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "fv0: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let code = match &cfg.out {
        Some(path) => match File::create(path) {
            Ok(f) => run_and_emit(&cfg, &mut BufWriter::new(f), &mut stderr),
            Err(e) => {
                let _ = writeln!(stderr, "fv0: cannot create {}: {e}", path.display());
                EXIT_NUMERICAL
            }
        },
        None => run_and_emit(&cfg, &mut io::stdout().lock(), &mut stderr),
    };
    ExitCode::from(code as u8)
}
