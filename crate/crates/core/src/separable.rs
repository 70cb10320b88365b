//! Finite-rank representation of a short-range potential.
//!
//! The potential is represented on an enlarged basis of `N_big` states, the
//! matrix is inverted, cut down to the leading `N x N` block and inverted
//! back. The result equals the Schur complement
//!
//! ```text
//! v_eff = A - B D^{-1} B^T,   V_big = [[A, B], [B^T, D]]
//! ```
//!
//! which is how it is computed: `D` comes from a rapidly decaying potential
//! and is routinely singular to working precision, so `D^{-1}` is taken as a
//! pseudo-inverse over the eigen-directions above `PIVOT_TOL` of its spectral
//! radius. When `D` is well conditioned this is exactly the invert–truncate–
//! invert result.

use crate::basis::{shortrange_matrix, BasisSpec};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix, PIVOT_TOL};
use crate::potential::RadialPotential;

#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePotential {
    /// `N x N` effective potential matrix.
    pub v_eff: DenseMatrix,
    /// Size of the enlarged basis that was used.
    pub big_size: usize,
    /// Descriptor of the radial function.
    pub potential_id: String,
    /// Ratio of largest to smallest eigenvalue magnitude of `V_big`.
    pub condition_estimate: f64,
    /// Eigen-directions of the trailing block dropped by the pseudo-inverse.
    pub discarded_modes: usize,
}

impl SeparablePotential {
    pub fn size(&self) -> usize {
        self.v_eff.rows()
    }

    /// Zero potential of size `n`.
    pub fn zero(n: usize) -> Self {
        Self {
            v_eff: DenseMatrix::zeros(n, n),
            big_size: n,
            potential_id: "none".into(),
            condition_estimate: f64::INFINITY,
            discarded_modes: 0,
        }
    }
}

/// Invert–truncate–invert on `spec.big_size` states.
pub fn build_separable(spec: &BasisSpec, v: &dyn RadialPotential) -> Result<SeparablePotential> {
    let n = spec.size;
    let big = shortrange_matrix(spec, v, spec.big_size)?;
    let potential_id = v.describe();
    let condition_estimate = condition_estimate(&big)?;

    if spec.big_size == n {
        return Ok(SeparablePotential {
            v_eff: big,
            big_size: n,
            potential_id,
            condition_estimate,
            discarded_modes: 0,
        });
    }

    let (v_eff, discarded_modes) = schur_complement(&big, n)?;
    if !v_eff.is_finite() {
        return Err(Error::SingularPotentialMatrix(Box::new(Error::InvalidArgument(
            format!("non-finite effective potential for {potential_id}"),
        ))));
    }
    Ok(SeparablePotential {
        v_eff,
        big_size: spec.big_size,
        potential_id,
        condition_estimate,
        discarded_modes,
    })
}

/// Leading `N x N` block of the potential matrix, no enlarged basis.
pub fn truncated_potential(spec: &BasisSpec, v: &dyn RadialPotential) -> Result<SeparablePotential> {
    let small = BasisSpec { big_size: spec.size, ..*spec };
    build_separable(&small, v)
}

fn condition_estimate(m: &DenseMatrix) -> Result<f64> {
    let (w, _) = symmetric_eigen(m)?;
    let (lo, hi) = w
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), x| (lo.min(x.abs()), hi.max(x.abs())));
    Ok(if lo == 0.0 { f64::INFINITY } else { hi / lo })
}

/// `A - B D^+ B^T` for the leading `n` rows of the symmetric matrix `big`.
/// Returns the complement and the number of dropped directions of `D`.
pub(crate) fn schur_complement(big: &DenseMatrix, n: usize) -> Result<(DenseMatrix, usize)> {
    let total = big.rows();
    let rest = total - n;
    let d = DenseMatrix::from_fn(rest, rest, |i, j| big[(n + i, n + j)]);
    let (w, u) = symmetric_eigen(&d)?;
    let radius = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let keep: Vec<usize> = (0..rest).filter(|&k| w[k].abs() > PIVOT_TOL * radius).collect();

    // X = B U_keep, scaled columns X / lambda.
    let mut x = DenseMatrix::zeros(n, keep.len());
    for i in 0..n {
        for (c, &k) in keep.iter().enumerate() {
            let mut s = 0.0;
            for j in 0..rest {
                s += big[(i, n + j)] * u[(j, k)];
            }
            x[(i, c)] = s;
        }
    }
    let mut out = big.top_left(n, n);
    for i in 0..n {
        for j in 0..=i {
            let corr: f64 = keep
                .iter()
                .enumerate()
                .map(|(c, &k)| x[(i, c)] * x[(j, c)] / w[k])
                .sum();
            out[(i, j)] -= corr;
            if i != j {
                out[(j, i)] = out[(i, j)];
            }
        }
    }
    Ok((out, rest - keep.len()))
}

/// Places `v_eff` identically in both components, basis-major layout
/// (row `2n + component`).
pub fn lift_to_fv0(p: &SeparablePotential) -> DenseMatrix {
    let n = p.size();
    let mut out = DenseMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = p.v_eff[(i, j)];
            out[(2 * i, 2 * j)] = v;
            out[(2 * i + 1, 2 * j + 1)] = v;
        }
    }
    out
}
