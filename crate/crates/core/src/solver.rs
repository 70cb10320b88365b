//! Bound-state search on `D(E) = det(K(E) - V)`.
//!
//! The determinant sign is scanned on a grid that is geometric in the binding
//! energy, sign changes are bisected, and each root gets its coefficient
//! vector from inverse iteration. The sign used for bracketing is the sign of
//! `det(K - V)` times the continued-fraction tail sign, which cancels the
//! sign flips `K` picks up at poles of the tail.

use rayon::prelude::*;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::green::{green_inverse, CfOptions, JOperator, Mode, PhysicsParams};
use crate::linalg::{lu_sign_log_det, norm2, null_direction, DenseMatrix, SignLogDet};
use crate::separable::{lift_to_fv0, SeparablePotential};

pub const DEFAULT_GRID_POINTS: usize = 4000;
pub const DEFAULT_BISECT_TOL: f64 = 1e-12;
/// Residual above which a refined root is flagged as a likely pole.
pub const POLE_SUSPECT_RESIDUAL: f64 = 1e-6;
const EDGE_NUDGE: f64 = 1e-12;
const NODE_PERTURBATION: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;

/// Binding-energy window `[e_min, e_max]`, both negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub grid_points: usize,
}

impl EnergyWindow {
    pub fn new(e_min: f64, e_max: f64, grid_points: usize) -> Result<Self> {
        if !(e_min < e_max && e_max < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "energy window needs e_min < e_max < 0, got [{e_min}, {e_max}]"
            )));
        }
        if grid_points < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 16 points, got {grid_points}"
            )));
        }
        Ok(Self {
            e_min,
            e_max,
            grid_points,
        })
    }

    /// Grid nodes in ascending binding energy, geometric in `|binding|`.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.e_min.abs().ln(), self.e_max.abs().ln());
        let last = (self.grid_points - 1) as f64;
        let mut g: Vec<f64> = (0..self.grid_points)
            .map(|i| -(lo + (hi - lo) * i as f64 / last).exp())
            .collect();
        g[0] = self.e_min;
        g[self.grid_points - 1] = self.e_max;
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub cf: CfOptions,
    /// Final bracket width in binding-energy units.
    pub bisect_tol: f64,
    /// Evaluate the grid on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            cf: CfOptions::default(),
            bisect_tol: DEFAULT_BISECT_TOL,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub binding_energy: f64,
    pub total_energy: f64,
    pub mode: Mode,
    pub l: u32,
    /// Ordinal within the scanned window, 0 for the most bound state.
    pub index: usize,
    /// Unit-norm CS coefficients; components interleaved in FV0 mode.
    pub coefficients: Vec<f64>,
    /// `|(K - V) c|` for the unit vector `c`.
    pub residual: f64,
    pub cf_depth: usize,
    /// Set when the residual suggests the bracket closed on a pole.
    pub pole_suspect: bool,
    /// Width of the final bisection bracket.
    pub bracket_width: f64,
}

/// Determinant and tail bookkeeping at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub binding: f64,
    pub det: SignLogDet,
    pub tail_sign: i8,
    pub cf_depth: usize,
}

impl Evaluation {
    /// Sign of `det(K - V)` with tail poles divided out.
    pub fn compensated_sign(&self) -> i8 {
        self.det.sign * self.tail_sign
    }
}

/// A bound-state problem: Coulomb Green's operator plus optional short-range
/// potential matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub mode: Mode,
    pub spec: BasisSpec,
    pub params: PhysicsParams,
    /// Potential in the layout of `K` (`components * N` square), if any.
    potential: Option<DenseMatrix>,
}

impl Problem {
    pub fn coulomb(mode: Mode, spec: BasisSpec, params: PhysicsParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            mode,
            spec,
            params,
            potential: None,
        })
    }

    pub fn with_potential(
        mode: Mode,
        spec: BasisSpec,
        params: PhysicsParams,
        potential: &SeparablePotential,
    ) -> Result<Self> {
        params.validate()?;
        if potential.size() != spec.size {
            return Err(Error::InvalidArgument(format!(
                "potential has {} states, basis has {}",
                potential.size(),
                spec.size
            )));
        }
        let matrix = match mode {
            Mode::Schrodinger => potential.v_eff.clone(),
            Mode::FeshbachVillars => lift_to_fv0(potential),
        };
        Ok(Self {
            mode,
            spec,
            params,
            potential: Some(matrix),
        })
    }

    pub fn potential(&self) -> Option<&DenseMatrix> {
        self.potential.as_ref()
    }

    pub fn operator(&self, binding: f64) -> JOperator {
        JOperator::new(self.spec, self.params, self.mode, binding)
    }

    /// `K(E) - V` and the continued-fraction diagnostics.
    pub fn system_matrix(
        &self,
        binding: f64,
        cf: &CfOptions,
    ) -> Result<(DenseMatrix, crate::green::CfResult)> {
        let (k, res) = green_inverse(&self.operator(binding), self.spec.size, cf)
            .map_err(|e| e.at_energy(binding))?;
        let m = match &self.potential {
            Some(v) => &k - v,
            None => k,
        };
        Ok((m, res))
    }

    pub fn evaluate(&self, binding: f64, cf: &CfOptions) -> Result<Evaluation> {
        let (m, res) = self.system_matrix(binding, cf)?;
        Ok(Evaluation {
            binding,
            det: lu_sign_log_det(&m),
            tail_sign: res.tail_sign,
            cf_depth: res.depth_used,
        })
    }

    /// Evaluation with retries at shifted energies when the continued
    /// fraction breaks down (typically right next to a pole of the tail) or
    /// the matrix is exactly singular. Shifts are tried in order.
    fn evaluate_robust(&self, binding: f64, cf: &CfOptions, shifts: &[f64]) -> Result<Evaluation> {
        let mut last = match self.evaluate(binding, cf) {
            Ok(ev) if ev.det.sign != 0 => return Ok(ev),
            Ok(_) => Error::SingularMatrix {
                column: 0,
                pivot: 0.0,
            }
            .at_energy(binding),
            Err(e) => e,
        };
        for &shift in shifts {
            match self.evaluate(binding + shift, cf) {
                Ok(ev) if ev.det.sign != 0 => return Ok(ev),
                Ok(_) => {}
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// `E - m c^2` in FV0 mode, `E` in scalar mode.
pub fn binding_from_total(params: &PhysicsParams, mode: Mode, e_total: f64) -> f64 {
    match mode {
        Mode::Schrodinger => e_total,
        Mode::FeshbachVillars => e_total - params.rest_energy(),
    }
}

/// Inverse of [`binding_from_total`].
pub fn total_from_binding(params: &PhysicsParams, mode: Mode, binding: f64) -> f64 {
    match mode {
        Mode::Schrodinger => binding,
        Mode::FeshbachVillars => binding + params.rest_energy(),
    }
}

/// Sign/log determinant of `K(E) - V` at total energy `e_total`.
pub fn det_fn(problem: &Problem, e_total: f64, cf: &CfOptions) -> Result<SignLogDet> {
    let binding = binding_from_total(&problem.params, problem.mode, e_total);
    Ok(problem.evaluate(binding, cf)?.det)
}

/// All bound states in `window`, ascending in binding energy.
pub fn scan_and_refine(
    problem: &Problem,
    window: &EnergyWindow,
    opts: &SolverOptions,
) -> Result<Vec<BoundState>> {
    let grid = window.grid();
    let last = grid.len() - 1;
    let eval_node = |i: usize| -> Result<Evaluation> {
        // Edges move inward, interior nodes toward threshold; the larger
        // shifts stay well inside the grid cell.
        let (dir, h) = if i == last {
            (-1.0, grid[last] - grid[last - 1])
        } else {
            (1.0, grid[i + 1] - grid[i])
        };
        let first = if i == 0 || i == last {
            EDGE_NUDGE
        } else {
            NODE_PERTURBATION
        };
        let shifts = [first, 1e-3 * h, 1e-2 * h, 0.1 * h].map(|s| dir * s);
        problem.evaluate_robust(grid[i], &opts.cf, &shifts)
    };
    let evals: Vec<Evaluation> = if opts.parallel {
        (0..grid.len())
            .into_par_iter()
            .map(eval_node)
            .collect::<Result<_>>()?
    } else {
        (0..grid.len()).map(eval_node).collect::<Result<_>>()?
    };

    let brackets: Vec<(Evaluation, Evaluation)> = evals
        .windows(2)
        .filter(|w| w[0].compensated_sign() != w[1].compensated_sign())
        .map(|w| (w[0], w[1]))
        .collect();

    let refine = |(lo, hi): &(Evaluation, Evaluation)| refine_root(problem, *lo, *hi, opts);
    let mut states: Vec<BoundState> = if opts.parallel {
        brackets.par_iter().map(refine).collect::<Result<_>>()?
    } else {
        brackets.iter().map(refine).collect::<Result<_>>()?
    };
    states.sort_by(|a, b| a.binding_energy.total_cmp(&b.binding_energy));
    for (i, s) in states.iter_mut().enumerate() {
        s.index = i;
    }
    Ok(states)
}

/// True when fewer roots were found than the expected count, i.e. some grid
/// cell probably holds two of them.
pub fn grid_too_coarse(states: &[BoundState], expected: usize) -> bool {
    states.len() < expected
}

fn refine_root(
    problem: &Problem,
    lo: Evaluation,
    hi: Evaluation,
    opts: &SolverOptions,
) -> Result<BoundState> {
    let (mut a, mut b) = (lo, hi);
    let sign_a = a.compensated_sign();
    let mut steps = 0;
    while b.binding - a.binding > opts.bisect_tol && steps < MAX_BISECTIONS {
        steps += 1;
        let width = b.binding - a.binding;
        let mid = a.binding + 0.5 * width;
        if mid <= a.binding || mid >= b.binding {
            break;
        }
        let ev = match problem.evaluate(mid, &opts.cf) {
            Ok(ev) if ev.det.sign != 0 => ev,
            // A zero at the midpoint is the root itself.
            Ok(ev) => {
                a = ev;
                b = ev;
                break;
            }
            Err(_) => problem.evaluate_robust(mid, &opts.cf, &[1e-3 * width, -1e-3 * width, 0.1 * width])?,
        };
        if ev.compensated_sign() == sign_a {
            a = ev;
        } else {
            b = ev;
        }
    }
    let root = 0.5 * (a.binding + b.binding);
    let (m, cf) = problem.system_matrix(root, &opts.cf)?;
    let nd = null_direction(&m).map_err(|e| e.at_energy(root))?;
    let residual = nd.residual;
    debug_assert!((norm2(&nd.vector) - 1.0).abs() < 1e-12);
    Ok(BoundState {
        binding_energy: root,
        total_energy: total_from_binding(&problem.params, problem.mode, root),
        mode: problem.mode,
        l: problem.spec.l,
        index: 0,
        coefficients: nd.vector,
        residual,
        cf_depth: cf.depth_used,
        pole_suspect: residual > POLE_SUSPECT_RESIDUAL,
        bracket_width: b.binding - a.binding,
    })
}
