//! Coulomb-Sturmian basis.
//!
//! `<r|n> = sqrt(n!/(n+2l+1)!) exp(-b r) (2 b r)^{l+1} L_n^{2l+1}(2 b r)`.
//!
//! Overlap, kinetic energy and `1/r` are tridiagonal (the last one diagonal)
//! and are given in closed form. Other radial potentials go through
//! generalized Gauss–Laguerre quadrature matched to the basis weight.

pub mod quadrature;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::potential::RadialPotential;

pub use quadrature::{gauss_laguerre, GaussLaguerre};

/// Largest basis index accepted by [`cs_function`].
pub const MAX_FUNCTION_INDEX: usize = 5000;

/// Relative change allowed when the quadrature node count is doubled.
pub const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    /// Angular momentum.
    pub l: u32,
    /// Scale parameter (inverse length).
    pub b: f64,
    /// Truncation size.
    pub size: usize,
    /// Enlarged size for the separable potential.
    pub big_size: usize,
}

impl BasisSpec {
    pub fn new(l: u32, b: f64, size: usize, big_size: usize) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument(format!("basis scale b must be positive, got {b}")));
        }
        if size == 0 {
            return Err(Error::InvalidArgument("basis size N must be at least 1".into()));
        }
        if big_size < size {
            return Err(Error::InvalidArgument(format!(
                "enlarged basis size {big_size} is smaller than N = {size}"
            )));
        }
        Ok(Self { l, b, size, big_size })
    }

    /// Spec with `big_size = 2 * size`.
    pub fn with_default_big(l: u32, b: f64, size: usize) -> Result<Self> {
        Self::new(l, b, size, 2 * size)
    }

    fn lf(&self) -> f64 {
        f64::from(self.l)
    }

    /// `sqrt(n' (n' + 2l + 1))` for the coupling between `n'-1` and `n'`.
    fn coupling(&self, upper: usize) -> f64 {
        let k = upper as f64;
        (k * (k + 2.0 * self.lf() + 1.0)).sqrt()
    }
}

/// Symmetric tridiagonal slice of one of the analytic operators.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSym {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalSym {
    pub fn from_elements(size: usize, element: impl Fn(usize, usize) -> f64) -> Self {
        Self {
            diag: (0..size).map(|n| element(n, n)).collect(),
            offdiag: (1..size).map(|n| element(n - 1, n)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        match n.abs_diff(m) {
            0 => self.diag[n],
            1 => self.offdiag[n.min(m)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.size(), self.size(), |i, j| self.get(i, j))
    }
}

pub fn overlap_matrix(spec: &BasisSpec, size: usize) -> TridiagonalSym {
    TridiagonalSym::from_elements(size, |n, m| overlap_element(spec, n, m))
}

pub fn kinetic_matrix(spec: &BasisSpec, mass: f64, size: usize) -> TridiagonalSym {
    TridiagonalSym::from_elements(size, |n, m| kinetic_element(spec, mass, n, m))
}

/// Value of the normalized CS function `<r|n>`.
pub fn cs_function(spec: &BasisSpec, n: usize, r: f64) -> Result<f64> {
    if n > MAX_FUNCTION_INDEX {
        return Err(Error::InvalidArgument(format!(
            "CS index {n} exceeds {MAX_FUNCTION_INDEX}"
        )));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let alpha = 2 * spec.l + 1;
    let x = 2.0 * spec.b * r;
    let lag = laguerre(n, f64::from(alpha), x);
    // ln sqrt(n!/(n+alpha)!) = -1/2 sum_{k=n+1}^{n+alpha} ln k
    let log_norm = -0.5 * (n + 1..=n + alpha as usize).map(|k| (k as f64).ln()).sum::<f64>();
    let log_env = log_norm - spec.b * r + (spec.lf() + 1.0) * x.ln();
    Ok(lag * log_env.exp())
}

/// `L_n^alpha(x)` by the upward three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `<n|m>`.
pub fn overlap_element(spec: &BasisSpec, n: usize, m: usize) -> f64 {
    match n.abs_diff(m) {
        0 => (n as f64 + spec.lf() + 1.0) / spec.b,
        1 => -spec.coupling(n.max(m)) / (2.0 * spec.b),
        _ => 0.0,
    }
}

/// `<n|p^2/2m|m>` with hbar = 1.
pub fn kinetic_element(spec: &BasisSpec, mass: f64, n: usize, m: usize) -> f64 {
    match n.abs_diff(m) {
        0 => (n as f64 + spec.lf() + 1.0) * spec.b / (2.0 * mass),
        1 => spec.coupling(n.max(m)) * spec.b / (4.0 * mass),
        _ => 0.0,
    }
}

/// `<n|Z e^2/r|m>`; diagonal because `<r|n>/r` is the biorthogonal partner.
pub fn coulomb_element(z: f64, e2: f64, n: usize, m: usize) -> f64 {
    if n == m {
        z * e2
    } else {
        0.0
    }
}

/// Node count used for a `size x size` potential matrix.
pub fn quadrature_nodes(spec: &BasisSpec, size: usize) -> usize {
    64.max(2 * (size + spec.l as usize) + 16)
}

/// `size x size` matrix of `<n|v|m>` by Gauss–Laguerre quadrature.
///
/// The rule uses the weight `x^{2l+1} e^{-x}` with `x = 2 b r`, and the
/// smooth factor `r v(r)`, so potentials that go like `1/r` at the origin are
/// integrated without loss. The result is accepted only if doubling the node
/// count changes no entry by more than [`QUADRATURE_TOL`] relative to the
/// largest entry.
pub fn shortrange_matrix(
    spec: &BasisSpec,
    v: &dyn RadialPotential,
    size: usize,
) -> Result<DenseMatrix> {
    let nodes = quadrature_nodes(spec, size);
    let coarse = potential_matrix_with_nodes(spec, v, size, nodes)?;
    let fine = potential_matrix_with_nodes(spec, v, size, 2 * nodes)?;
    let scale = fine.max_abs();
    let change = (&fine - &coarse).max_abs();
    if change > QUADRATURE_TOL * scale {
        return Err(Error::QuadratureNonConvergence {
            nodes: 2 * nodes,
            change: change / scale,
        });
    }
    Ok(fine)
}

/// Below this, a node contributes nothing representable to any matrix entry.
const NEGLIGIBLE_NODE: f64 = 1e-40;

pub(crate) fn potential_matrix_with_nodes(
    spec: &BasisSpec,
    v: &dyn RadialPotential,
    size: usize,
    nodes: usize,
) -> Result<DenseMatrix> {
    if size > nodes {
        return Err(Error::InvalidArgument(format!(
            "{nodes} quadrature nodes cannot resolve {size} basis functions"
        )));
    }
    let rule = gauss_laguerre(nodes, 2 * spec.l + 1)?;
    let mut out = DenseMatrix::zeros(size, size);
    let mut column = vec![0.0; size];
    for (i, &x) in rule.nodes().iter().enumerate() {
        for (k, c) in column.iter_mut().enumerate() {
            *c = rule.scaled_polynomial(i, k);
        }
        let peak = column.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if peak * peak < NEGLIGIBLE_NODE {
            continue;
        }
        let r = x / (2.0 * spec.b);
        let g = v.r_times_v(r)?;
        if !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "potential is not finite at r = {r}"
            )));
        }
        if g == 0.0 {
            continue;
        }
        for n in 0..size {
            let a = column[n] * g;
            for m in 0..=n {
                out[(n, m)] += a * column[m];
            }
        }
    }
    for n in 0..size {
        for m in 0..n {
            out[(m, n)] = out[(n, m)];
        }
    }
    Ok(out)
}
