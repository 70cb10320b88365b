//! Shared fixtures for the integration tests: reference tables, explicit
//! CS functions and a plain Gauss–Laguerre rule that does not go through the
//! library's quadrature.

#![allow(dead_code)]

use fv0::basis::{coulomb_element, kinetic_element, overlap_element, BasisSpec};
use fv0::green::{Mode, PhysicsParams};
use fv0::potential::Yukawa;
use fv0::separable::build_separable;
use fv0::solver::{scan_and_refine, BoundState, EnergyWindow, Problem, SolverOptions};

/// Klein–Gordon / FV0 Coulomb column, 8 printed decimals.
pub const FV0_TABLE: [f64; 11] = [
    -0.50003329,
    -0.12500541,
    -0.05555728,
    -0.03125075,
    -0.02000039,
    -0.01388912,
    -0.01020423,
    -0.00781260,
    -0.00617291,
    -0.00500005,
    -0.00413227,
];

/// FV0 with the Yukawa term `v0 = 2, alpha0 = 2`, 8 printed decimals.
pub const FV0S_TABLE: [f64; 11] = [
    -0.28203629,
    -0.09299089,
    -0.04546869,
    -0.02685280,
    -0.01770225,
    -0.01254053,
    -0.00934633,
    -0.00723344,
    -0.00576369,
    -0.00470027,
    -0.00390614,
];

/// Node count of the plain rule; exact for CS products up to `n, m = 12`.
pub const RULE_NODES: usize = 48;

pub const YUKAWA: Yukawa = Yukawa::new(2.0, 2.0);

pub fn table_window() -> EnergyWindow {
    EnergyWindow::new(-0.6, -0.0037, 4000).unwrap()
}

pub fn coulomb_states(mode: Mode, spec: BasisSpec, params: PhysicsParams, window: &EnergyWindow) -> Vec<BoundState> {
    let p = Problem::coulomb(mode, spec, params).unwrap();
    scan_and_refine(&p, window, &SolverOptions::default()).unwrap()
}

pub fn yukawa_states(spec: BasisSpec, opts: &SolverOptions) -> Vec<BoundState> {
    let sep = build_separable(&spec, &YUKAWA).unwrap();
    let p = Problem::with_potential(Mode::FeshbachVillars, spec, PhysicsParams::default(), &sep).unwrap();
    scan_and_refine(&p, &table_window(), opts).unwrap()
}

pub fn energies(states: &[BoundState]) -> Vec<f64> {
    states.iter().map(|s| s.binding_energy).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Prints the single status line for an acceptance criterion and fails the
/// test when it does not hold.
pub fn report(id: u32, what: &str, pass: bool, detail: String) {
    println!(
        "criterion {id:>2} [{}] {what}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Double-double number `hi + lo`, enough to keep the alternating
/// Laguerre series free of cancellation.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Self::two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        Self::two_sum(s.hi, lo)
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let err = self.hi.mul_add(b, -p);
        Self::two_sum(p, err + self.lo * b)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::new(d).mul_f64(-q1));
        let q2 = r.hi / d;
        Self::two_sum(q1, q2)
    }
}

/// `L_n^alpha(x)` from the explicit power series
/// `sum_k (-1)^k C(n+alpha, n-k) x^k / k!`, summed in double-double.
pub fn laguerre_series(n: usize, alpha: usize, x: f64) -> f64 {
    let mut sum = Dd::new(0.0);
    let mut xk_over_kfact = Dd::new(1.0);
    for k in 0..=n {
        if k > 0 {
            xk_over_kfact = xk_over_kfact.mul_f64(x).div_f64(k as f64);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum = sum.add(xk_over_kfact.mul_f64(sign * binomial(n + alpha, n - k)));
    }
    sum.hi + sum.lo
}

fn cs_norm(l: u32, n: usize) -> f64 {
    let alpha = 2 * l as usize + 1;
    (0.5 * (ln_factorial(n) - ln_factorial(n + alpha))).exp()
}

/// `<r|n>` written out: `sqrt(n!/(n+2l+1)!) (2br)^{l+1} e^{-br} L_n^{2l+1}(2br)`.
pub fn cs_explicit(l: u32, b: f64, n: usize, r: f64) -> f64 {
    let x = 2.0 * b * r;
    cs_norm(l, n) * x.powi(l as i32 + 1) * (-b * r).exp() * laguerre_series(n, 2 * l as usize + 1, x)
}

/// `d/dr <r|n>` using `d/dx L_n^a = -L_{n-1}^{a+1}`.
pub fn cs_explicit_derivative(l: u32, b: f64, n: usize, r: f64) -> f64 {
    let x = 2.0 * b * r;
    let alpha = 2 * l as usize + 1;
    let lag = laguerre_series(n, alpha, x);
    let dlag = if n == 0 {
        0.0
    } else {
        -laguerre_series(n - 1, alpha + 1, x)
    };
    let env = cs_norm(l, n) * x.powi(l as i32 + 1) * (-b * r).exp();
    env * (((l as f64 + 1.0) / r - b) * lag + 2.0 * b * dlag)
}

/// Plain Gauss–Laguerre rule for the weight `e^{-x}`, Newton on the
/// three-term recurrence with the usual asymptotic starting guesses.
pub struct PlainLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PlainLaguerre {
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let mut nodes: Vec<f64> = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = 0.0_f64;
        for i in 0..n {
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
                }
            };
            let mut p2 = 0.0;
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
                }
                pp = (nf * p1 - nf * p2) / z;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs() {
                    break;
                }
            }
            nodes.push(z);
            weights.push(-1.0 / (pp * nf * p2));
        }
        Self { nodes, weights }
    }

    /// `int_0^inf f(r) dr` for integrands of the form `e^{-rate r}` times a
    /// polynomial in `r`; exact up to polynomial degree `2n - 1`.
    pub fn integrate(&self, rate: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * x.exp() * f(x / rate))
            .sum::<f64>()
            / rate
    }
}

/// Largest deviation between the analytic overlap, kinetic and Coulomb
/// elements and their explicit integrals, for `n, m <= 12`.
pub fn worst_matrix_element_error(l: u32, b: f64) -> f64 {
    let rule = PlainLaguerre::new(RULE_NODES);
    let spec = BasisSpec::new(l, b, 13, 13).unwrap();
    let (mass, z, e2) = (1.0, -1.0, 1.0);
    let lf = f64::from(l);
    let mut worst = 0.0_f64;
    for n in 0..=12 {
        for m in 0..=12 {
            let phi = |r: f64| cs_explicit(l, b, n, r) * cs_explicit(l, b, m, r);
            let overlap = rule.integrate(2.0 * b, phi);
            let kinetic = rule.integrate(2.0 * b, |r| {
                cs_explicit_derivative(l, b, n, r) * cs_explicit_derivative(l, b, m, r)
                    + lf * (lf + 1.0) / (r * r) * phi(r)
            }) / (2.0 * mass);
            let coulomb = z * e2 * rule.integrate(2.0 * b, |r| phi(r) / r);
            for (a, q) in [
                (overlap_element(&spec, n, m), overlap),
                (kinetic_element(&spec, mass, n, m), kinetic),
                (coulomb_element(z, e2, n, m), coulomb),
            ] {
                worst = worst.max((a - q).abs() / q.abs().max(1.0));
            }
        }
    }
    worst
}

