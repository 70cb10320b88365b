//! Spin-0 bound states in a Coulomb plus short-range potential.
//!
//! The Feshbach–Villars form of the Klein–Gordon equation is solved on a
//! Coulomb–Sturmian basis. The Coulomb Green's operator is represented
//! exactly through a matrix continued fraction, the short-range potential
//! by a finite separable expansion, and bound states are the zeros of
//! `det(G^{-1} - V)` in energy.
//!
//! ```no_run
//! use fv0::{basis::BasisSpec, green::{Mode, PhysicsParams}};
//! use fv0::solver::{scan_and_refine, EnergyWindow, Problem, SolverOptions};
//!
//! let spec = BasisSpec::with_default_big(0, 1.0, 24)?;
//! let problem = Problem::coulomb(Mode::FeshbachVillars, spec, PhysicsParams::default())?;
//! let window = EnergyWindow::new(-0.6, -0.0037, 4000)?;
//! for s in scan_and_refine(&problem, &window, &SolverOptions::default())? {
//!     println!("{} {:.8}", s.index, s.binding_energy);
//! }
//! # Ok::<(), fv0::Error>(())
//! ```

pub mod basis;
pub mod cli;
mod error;
pub mod green;
pub mod linalg;
pub mod oracle;
pub mod potential;
pub mod separable;
pub mod solver;

pub use error::{Error, Result};
