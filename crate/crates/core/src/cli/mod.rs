//! Command-line front end: configuration, run and table output.

mod config;
mod report;

use std::io::Write;

use thiserror::Error;

use crate::basis::BasisSpec;
use crate::green::{CfOptions, Mode, PhysicsParams};
use crate::potential::{RadialPotential, Tabulated, Yukawa};
use crate::separable::build_separable;
use crate::solver::{scan_and_refine, EnergyWindow, Problem, SolverOptions};

pub use config::{
    ConfigError, OutputFormat, PotentialChoice, RunConfig, RunMode, DEFAULT_E_MAX, DEFAULT_E_MIN,
};
pub use report::{emit_table, parse_csv, Report, Row, NO_STATES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

/// Validates `config`, solves and tabulates against the oracles.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let params = PhysicsParams {
        mass: config.mass,
        c: config.c,
        e2: 1.0,
        z: config.z,
    };
    let spec = BasisSpec::new(config.l, config.b, config.n, config.n_big)
        .map_err(|e| ConfigError::new("N", e.to_string()))?;
    let window = EnergyWindow::new(config.e_min, config.e_max, config.grid_points)
        .map_err(|e| ConfigError::new("e_min", e.to_string()))?;

    let problem = match config.mode {
        RunMode::Sch => Problem::coulomb(Mode::Schrodinger, spec, params)?,
        RunMode::Fv0 => Problem::coulomb(Mode::FeshbachVillars, spec, params)?,
        RunMode::Fv0s => {
            let v: Box<dyn RadialPotential> = match &config.potential {
                PotentialChoice::Yukawa { v0, alpha0 } => Box::new(Yukawa::new(*v0, *alpha0)),
                PotentialChoice::Tabulated(path) => Box::new(
                    Tabulated::from_file(path)
                        .map_err(|e| ConfigError::new("potential_file", e.to_string()))?,
                ),
                PotentialChoice::None => unreachable!("rejected by validate"),
            };
            let sep = build_separable(&spec, v.as_ref())?;
            Problem::with_potential(Mode::FeshbachVillars, spec, params, &sep)?
        }
    };

    let opts = SolverOptions {
        cf: CfOptions {
            tol: config.cf_tol,
            ..CfOptions::default()
        },
        bisect_tol: config.bisect_tol,
        parallel: true,
    };
    let states = scan_and_refine(&problem, &window, &opts)?;
    Ok(Report::new(config.mode, &params, config.l, &states))
}

/// Runs and writes the table to `out`, returning the process exit code.
/// Diagnostics go to `err`.
pub fn run_and_emit(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = run(config).and_then(|report| {
        out.write_all(&emit_table(&report, config.format))?;
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "fv0: {e}");
            e.exit_code()
        }
    }
}
