//! Inverse Coulomb Green's matrix on a truncated Coulomb-Sturmian basis.
//!
//! `J(E) = E - H_C` is tridiagonal on the CS basis (2x2 block-tridiagonal in
//! the Feshbach–Villars case). The `N x N` leading part of `J^{-1}` equals the
//! inverse of the leading part of `J` with only its last diagonal block
//! replaced by `J_{N-1,N-1} - J_{N-1,N} C_N J_{N,N-1}`, where `C_N` is the
//! (matrix) continued fraction
//!
//! ```text
//! C_k = (J_{k,k} - J_{k,k+1} C_{k+1} J_{k+1,k})^{-1}
//! ```
//!
//! All indices here are 0-based.
//!
//! In the two-component case the tail converges only like `1/M` in the start
//! depth `M`: the kinetic coupling matrix `[[1,1],[-1,-1]]` is nilpotent, which
//! leaves a marginal mode in the asymptotic recurrence. The tail is therefore
//! evaluated at depths `M, 2M, 4M` and extrapolated in `1/M` to second order.
//! For the one-component problem the raw tails converge geometrically and the
//! extrapolation leaves them unchanged.

use crate::basis::{coulomb_element, kinetic_element, overlap_element, BasisSpec};
use crate::error::{Error, Result};
use crate::linalg::{Block2, DenseMatrix};

/// Speed of light in the default units (hbar = m = e^2 = 1).
pub const SPEED_OF_LIGHT: f64 = 137.03602;

pub const DEFAULT_CF_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_DEPTH: usize = 20_000;
/// A doubling that shrinks the change by less than this is treated as noise.
const NOISE_DECAY: f64 = 0.5;
/// Largest multiple of the tolerance accepted as a rounding floor.
const NOISE_SLACK: f64 = 1e3;
const MIN_START_DEPTH: usize = 64;

/// Kinetic coupling matrix of the two-component Hamiltonian.
pub const KINETIC_COUPLING: Block2 = Block2::new(1.0, 1.0, -1.0, -1.0);
/// Rest-energy matrix `diag(1, -1)`.
pub const REST_SIGN: Block2 = Block2::diag(1.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub mass: f64,
    /// Speed of light.
    pub c: f64,
    /// Squared charge unit.
    pub e2: f64,
    /// Coulomb strength; `Z = -1` is hydrogen.
    pub z: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            c: SPEED_OF_LIGHT,
            e2: 1.0,
            z: -1.0,
        }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("c", self.c), ("e2", self.e2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.z.is_finite() {
            return Err(Error::InvalidArgument(format!("Z must be finite, got {}", self.z)));
        }
        Ok(())
    }

    /// `m c^2`.
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.c * self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Nonrelativistic one-component problem.
    Schrodinger,
    /// Two-component Feshbach–Villars problem.
    FeshbachVillars,
}

impl Mode {
    pub fn components(self) -> usize {
        match self {
            Mode::Schrodinger => 1,
            Mode::FeshbachVillars => 2,
        }
    }
}

/// One entry (scalar mode) or 2x2 block (Feshbach–Villars) of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JBlock {
    Scalar(f64),
    Pair(Block2),
}

impl JBlock {
    pub fn max_norm(&self) -> f64 {
        match self {
            JBlock::Scalar(x) => x.abs(),
            JBlock::Pair(b) => b.max_norm(),
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match (self, i, j) {
            (JBlock::Scalar(x), 0, 0) => *x,
            (JBlock::Pair(b), 0, 0) => b.a11,
            (JBlock::Pair(b), 0, 1) => b.a12,
            (JBlock::Pair(b), 1, 0) => b.a21,
            (JBlock::Pair(b), 1, 1) => b.a22,
            _ => panic!("block index ({i},{j}) out of range"),
        }
    }
}

/// `J(E)` on the CS basis, evaluated on demand.
///
/// The energy is stored as the binding energy `E - m c^2` (or `E` itself in
/// scalar mode): near threshold, forming the total energy first would lose
/// about four digits to cancellation against `m c^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JOperator {
    pub spec: BasisSpec,
    pub params: PhysicsParams,
    pub mode: Mode,
    binding: f64,
}

impl JOperator {
    pub fn new(spec: BasisSpec, params: PhysicsParams, mode: Mode, binding: f64) -> Self {
        Self {
            spec,
            params,
            mode,
            binding,
        }
    }

    pub fn binding(&self) -> f64 {
        self.binding
    }

    pub fn total_energy(&self) -> f64 {
        match self.mode {
            Mode::Schrodinger => self.binding,
            Mode::FeshbachVillars => self.binding + self.params.rest_energy(),
        }
    }

    /// `E O - T - v_C` for the scalar problem.
    pub fn scalar_entry(&self, n: usize, m: usize) -> f64 {
        let p = &self.params;
        self.binding * overlap_element(&self.spec, n, m)
            - kinetic_element(&self.spec, p.mass, n, m)
            - coulomb_element(p.z, p.e2, n, m)
    }

    /// `E O I - T [[1,1],[-1,-1]] - m c^2 O diag(1,-1) - v_C I`.
    pub fn pair_block(&self, n: usize, m: usize) -> Block2 {
        let p = &self.params;
        let o = overlap_element(&self.spec, n, m);
        let t = kinetic_element(&self.spec, p.mass, n, m);
        let vc = coulomb_element(p.z, p.e2, n, m);
        // E - mc^2 = binding and E + mc^2 = binding + 2 mc^2.
        let energy = Block2::diag(o * self.binding, o * (self.binding + 2.0 * p.rest_energy()));
        energy - KINETIC_COUPLING.scale(t) - Block2::IDENTITY.scale(vc)
    }

    pub fn block(&self, n: usize, m: usize) -> JBlock {
        match self.mode {
            Mode::Schrodinger => JBlock::Scalar(self.scalar_entry(n, m)),
            Mode::FeshbachVillars => JBlock::Pair(self.pair_block(n, m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfOptions {
    /// Max-norm change of the tail between successive doublings, relative to
    /// `max(1, |C|)`.
    pub tol: f64,
    /// Deepest raw recursion allowed.
    pub max_depth: usize,
    /// First start depth `M`; defaults to `max(64, 2N)`.
    pub start_depth: Option<usize>,
}

impl Default for CfOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_CF_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
            start_depth: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfResult {
    /// `C_N`, the tail one past the truncation.
    pub tail: JBlock,
    /// Deepest raw recursion used.
    pub depth_used: usize,
    pub converged: bool,
    /// Last change between successive extrapolated tails.
    pub delta: f64,
    /// Product over the raw runs entering `tail` of `prod_k (-sign det D_k)`.
    ///
    /// `C_N` has poles where some `D_k` changes sign; multiplying the sign of
    /// `det K` by this factor removes those spurious sign flips while keeping
    /// the ones at genuine zeros.
    pub tail_sign: i8,
}

/// Arithmetic needed by the tail recursion, shared by scalars and 2x2 blocks.
trait TailAlgebra: Copy {
    fn inverse(self) -> Result<Self>;
    fn minus(self, other: Self) -> Self;
    fn times(self, other: Self) -> Self;
    fn scaled(self, s: f64) -> Self;
    fn det_sign(self) -> i8;
    fn norm(self) -> f64;
    fn finite(self) -> bool;
}

impl TailAlgebra for f64 {
    fn inverse(self) -> Result<Self> {
        if self == 0.0 || !self.is_finite() {
            Err(Error::SingularBlock { det: self })
        } else {
            Ok(1.0 / self)
        }
    }
    fn minus(self, other: Self) -> Self {
        self - other
    }
    fn times(self, other: Self) -> Self {
        self * other
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn det_sign(self) -> i8 {
        sign_of(self)
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl TailAlgebra for Block2 {
    fn inverse(self) -> Result<Self> {
        Block2::inverse(&self)
    }
    fn minus(self, other: Self) -> Self {
        self - other
    }
    fn times(self, other: Self) -> Self {
        self * other
    }
    fn scaled(self, s: f64) -> Self {
        self.scale(s)
    }
    fn det_sign(self) -> i8 {
        sign_of(self.det())
    }
    fn norm(self) -> f64 {
        self.max_norm()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Raw downward recursion from `C_{depth+1} = J_{depth+1,depth+1}^{-1}` to `C_first`.
fn raw_tail<T: TailAlgebra>(
    block: &impl Fn(usize, usize) -> T,
    first: usize,
    depth: usize,
) -> Result<(T, i8)> {
    let start = block(depth + 1, depth + 1);
    let mut sign = -start.det_sign();
    let mut c = start.inverse()?;
    for k in (first..=depth).rev() {
        let d = block(k, k).minus(block(k, k + 1).times(c).times(block(k + 1, k)));
        sign *= -d.det_sign();
        c = d.inverse()?;
    }
    if !c.finite() {
        return Err(Error::SingularBlock { det: f64::NAN });
    }
    Ok((c, sign))
}

/// Second-order extrapolation in `1/M` from tails at `M`, `2M`, `4M`.
fn extrapolate<T: TailAlgebra>(c1: T, c2: T, c4: T) -> T {
    // (8 C(4M) - 6 C(2M) + C(M)) / 3
    c4.scaled(8.0 / 3.0)
        .minus(c2.scaled(2.0))
        .minus(c1.scaled(-1.0 / 3.0))
}

fn tail_generic<T: TailAlgebra>(
    block: impl Fn(usize, usize) -> T,
    first: usize,
    opts: &CfOptions,
) -> Result<(T, usize, f64, i8)> {
    let mut m = opts
        .start_depth
        .unwrap_or_else(|| MIN_START_DEPTH.max(2 * first))
        .max(first);
    if 4 * m > opts.max_depth {
        return Err(Error::CfNoConvergence {
            max_depth: opts.max_depth,
            delta: f64::INFINITY,
        });
    }
    let mut runs = vec![
        raw_tail(&block, first, m)?,
        raw_tail(&block, first, 2 * m)?,
        raw_tail(&block, first, 4 * m)?,
    ];
    let mut prev = extrapolate(runs[0].0, runs[1].0, runs[2].0);
    let mut delta = f64::INFINITY;
    loop {
        let next_depth = 8 * m;
        if next_depth > opts.max_depth {
            return Err(Error::CfNoConvergence {
                max_depth: opts.max_depth,
                delta,
            });
        }
        runs.remove(0);
        runs.push(raw_tail(&block, first, next_depth)?);
        m *= 2;
        let cur = extrapolate(runs[0].0, runs[1].0, runs[2].0);
        let prev_delta = delta;
        delta = cur.minus(prev).norm();
        let scale = cur.norm().max(1.0);
        // Close to a pole of the tail, rounding in the recursion leaves a
        // floor above `tol`; once the change stops shrinking it is noise.
        let at_floor = delta >= NOISE_DECAY * prev_delta && delta <= NOISE_SLACK * opts.tol * scale;
        if delta <= opts.tol * scale || at_floor {
            let sign = runs.iter().map(|r| r.1).product();
            return Ok((cur, 4 * m, delta, sign));
        }
        prev = cur;
    }
}

/// Continued-fraction tail `C_N` for truncation size `n_trunc`.
pub fn cf_tail(op: &JOperator, n_trunc: usize, opts: &CfOptions) -> Result<CfResult> {
    if n_trunc == 0 {
        return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
    }
    let (tail, depth_used, delta, tail_sign) = match op.mode {
        Mode::Schrodinger => {
            let (c, d, delta, s) = tail_generic(|n, m| op.scalar_entry(n, m), n_trunc, opts)?;
            (JBlock::Scalar(c), d, delta, s)
        }
        Mode::FeshbachVillars => {
            let (c, d, delta, s) = tail_generic(|n, m| op.pair_block(n, m), n_trunc, opts)?;
            (JBlock::Pair(c), d, delta, s)
        }
    };
    Ok(CfResult {
        tail,
        depth_used,
        converged: true,
        delta,
        tail_sign,
    })
}

/// Scalar tail for an arbitrary tridiagonal operator given by its entries.
/// Mostly useful for checking the recursion on hand-made operators.
pub fn scalar_tail_of(
    entry: impl Fn(usize, usize) -> f64,
    first: usize,
    opts: &CfOptions,
) -> Result<CfResult> {
    let (c, depth_used, delta, tail_sign) = tail_generic(entry, first, opts)?;
    Ok(CfResult {
        tail: JBlock::Scalar(c),
        depth_used,
        converged: true,
        delta,
        tail_sign,
    })
}

/// Leading `size` blocks of `J` with no correction, laid out basis-major
/// (row `= components * n + component`).
pub fn truncated_j_matrix(op: &JOperator, size: usize) -> DenseMatrix {
    let d = op.mode.components();
    let mut out = DenseMatrix::zeros(d * size, d * size);
    for n in 0..size {
        for m in n.saturating_sub(1)..(n + 2).min(size) {
            let blk = op.block(n, m);
            for i in 0..d {
                for j in 0..d {
                    out[(d * n + i, d * m + j)] = blk.entry(i, j);
                }
            }
        }
    }
    out
}

/// `K(E) = g(E)^{-1}` on the leading `n_trunc` basis states: the bare
/// truncation with its last diagonal block corrected by the tail.
pub fn green_inverse_matrix(op: &JOperator, n_trunc: usize, cf: &CfResult) -> Result<DenseMatrix> {
    if !cf.converged {
        return Err(Error::CfNoConvergence {
            max_depth: cf.depth_used,
            delta: cf.delta,
        });
    }
    let d = op.mode.components();
    let mut k = truncated_j_matrix(op, n_trunc);
    let last = n_trunc - 1;
    let correction = match (op.mode, cf.tail) {
        (Mode::Schrodinger, JBlock::Scalar(c)) => {
            let up = op.scalar_entry(last, n_trunc);
            let down = op.scalar_entry(n_trunc, last);
            JBlock::Scalar(up * c * down)
        }
        (Mode::FeshbachVillars, JBlock::Pair(c)) => {
            let up = op.pair_block(last, n_trunc);
            let down = op.pair_block(n_trunc, last);
            JBlock::Pair(up * c * down)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "continued-fraction tail does not match the operator mode".into(),
            ))
        }
    };
    for i in 0..d {
        for j in 0..d {
            k[(d * last + i, d * last + j)] -= correction.entry(i, j);
        }
    }
    Ok(k)
}

/// Convenience: tail and `K(E)` in one call.
pub fn green_inverse(
    op: &JOperator,
    n_trunc: usize,
    opts: &CfOptions,
) -> Result<(DenseMatrix, CfResult)> {
    let cf = cf_tail(op, n_trunc, opts)?;
    let k = green_inverse_matrix(op, n_trunc, &cf)?;
    Ok((k, cf))
}
