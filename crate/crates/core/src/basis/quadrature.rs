//! Generalized Gauss–Laguerre rules for the weight `x^alpha e^{-x}`.
//!
//! Nodes start from the eigenvalues of the Jacobi matrix and are polished by
//! Newton steps on the three-term recurrence. Weights follow from the
//! Christoffel sum over the normalized polynomials, evaluated with running
//! rescaling so that nodes far out on the real axis do not overflow.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 12;
const RESCALE_AT: f64 = 1e150;

#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    alpha: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `sqrt(w_i) * lhat_k(x_i)`, row-major `[node][k]` over all `k < nodes`.
    /// Rows are orthonormal, so these are the entries of an orthogonal matrix.
    scaled: Vec<f64>,
}

impl GaussLaguerre {
    /// Builds an `n`-point rule for integer `alpha`.
    pub fn new(n: usize, alpha: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let a = f64::from(alpha);
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
        let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
        let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
        nodes.sort_by(f64::total_cmp);

        for x in nodes.iter_mut() {
            *x = newton_polish(*x, n, a);
        }

        let mut weights = Vec::with_capacity(n);
        let mut scaled = Vec::with_capacity(n * n);
        for &x in &nodes {
            let (values, log_scale) = normalized_laguerre_scaled(n, a, x);
            let sum_sq: f64 = values.iter().map(|v| v * v).sum();
            let norm = sum_sq.sqrt();
            // w = 1 / sum_k lhat_k(x)^2, with lhat_k = values_k * exp(log_scale)
            let log_w = -(sum_sq.ln() + 2.0 * log_scale);
            weights.push(log_w.exp());
            scaled.extend(values.iter().map(|v| v / norm));
        }
        Ok(Self {
            alpha,
            nodes,
            weights,
            scaled,
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sqrt(w_i) * lhat_k(x_i)` where `lhat_k` is the Laguerre polynomial
    /// `L_k^alpha` normalized against `x^alpha e^{-x}`.
    pub fn scaled_polynomial(&self, node: usize, k: usize) -> f64 {
        self.scaled[node * self.nodes.len() + k]
    }

    /// Integral of `x^alpha e^{-x} f(x)` over the half line.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

type CacheKey = (usize, u32);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<GaussLaguerre>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<GaussLaguerre>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared rule for `(n, alpha)`. Concurrent first callers may build the rule
/// independently; the first insert wins.
pub fn gauss_laguerre(n: usize, alpha: u32) -> Result<Arc<GaussLaguerre>> {
    if let Some(rule) = cache().lock().expect("quadrature cache poisoned").get(&(n, alpha)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(GaussLaguerre::new(n, alpha)?);
    let mut guard = cache().lock().expect("quadrature cache poisoned");
    Ok(Arc::clone(guard.entry((n, alpha)).or_insert(rule)))
}

/// Values of the normalized Laguerre polynomials `lhat_0..lhat_{n-1}` at `x`,
/// all multiplied by `exp(-log_scale)`.
///
/// `lhat_k = sqrt(k! / Gamma(k+alpha+1)) L_k^alpha`.
pub(crate) fn normalized_laguerre_scaled(n: usize, alpha: f64, x: f64) -> (Vec<f64>, f64) {
    let mut out = Vec::with_capacity(n);
    let mut log_scale = 0.0;
    let mut prev = 0.0;
    // lhat_0 = 1/sqrt(Gamma(alpha+1)); alpha is a small integer here.
    let mut cur = (-0.5 * ln_gamma_int(alpha + 1.0)).exp();
    for k in 0..n {
        out.push(cur);
        if k + 1 == n {
            break;
        }
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf * (kf + alpha)).sqrt() * prev)
            / ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            out.iter_mut().for_each(|v| *v *= s);
            prev *= s;
            cur *= s;
            log_scale += RESCALE_AT.ln();
        }
    }
    (out, log_scale)
}

/// `ln Gamma(x)` for positive integer `x`.
fn ln_gamma_int(x: f64) -> f64 {
    let n = x.round() as u64;
    (2..n).map(|k| (k as f64).ln()).sum()
}

/// `lhat_n(x) / lhat_n'(x)` by the recurrence for values and derivatives.
fn newton_ratio(n: usize, alpha: f64, x: f64) -> f64 {
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut d_prev = 0.0;
    let mut d = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let beta_k = (kf * (kf + alpha)).sqrt();
        let beta_next = ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        let a_k = 2.0 * kf + alpha + 1.0;
        let p_next = ((x - a_k) * p - beta_k * p_prev) / beta_next;
        let d_next = (p + (x - a_k) * d - beta_k * d_prev) / beta_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        let big = p.abs().max(d.abs());
        if big > RESCALE_AT {
            let s = 1.0 / big;
            p *= s;
            p_prev *= s;
            d *= s;
            d_prev *= s;
        }
    }
    p / d
}

fn newton_polish(mut x: f64, n: usize, alpha: f64) -> f64 {
    for _ in 0..NEWTON_MAX_ITER {
        let dx = newton_ratio(n, alpha, x);
        if !dx.is_finite() {
            break;
        }
        x -= dx;
        if dx.abs() <= NEWTON_TOL * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson shifts.
fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn moments_are_exact() {
        for alpha in 0..5 {
            let rule = GaussLaguerre::new(20, alpha).unwrap();
            // int x^alpha e^{-x} x^k = (alpha+k)!
            for k in 0..39 {
                let exact = factorial(alpha + k);
                let got = rule.integrate(|x| x.powi(k as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact,
                    "alpha={alpha} k={k}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn scaled_polynomials_are_orthonormal() {
        let n = 150;
        let rule = GaussLaguerre::new(n, 3).unwrap();
        for a in [0, 1, 7, 40, 149] {
            for b in [0, 1, 7, 40, 149] {
                let dot: f64 = (0..n)
                    .map(|i| rule.scaled_polynomial(i, a) * rule.scaled_polynomial(i, b))
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "({a},{b}) -> {dot}");
            }
        }
    }

    #[test]
    fn large_rules_stay_finite() {
        let rule = GaussLaguerre::new(400, 5).unwrap();
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights().iter().all(|w| w.is_finite() && *w >= 0.0));
        let total: f64 = rule.weights().iter().sum();
        assert!((total - factorial(5)).abs() < 1e-11 * factorial(5));
    }

    #[test]
    fn cache_returns_shared_rule() {
        let a = gauss_laguerre(33, 2).unwrap();
        let b = gauss_laguerre(33, 2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
