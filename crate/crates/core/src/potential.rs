//! Radial short-range potentials.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// A local radial potential `v(r)`.
///
/// Quadrature works with `r v(r)`, which stays finite for potentials that are
/// no more singular than `1/r` at the origin.
pub trait RadialPotential: Send + Sync + fmt::Debug {
    fn value(&self, r: f64) -> Result<f64>;

    fn r_times_v(&self, r: f64) -> Result<f64> {
        Ok(r * self.value(r)?)
    }

    /// Short human-readable identifier, e.g. `yukawa(v0=2, alpha0=2)`.
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZeroPotential;

impl RadialPotential for ZeroPotential {
    fn value(&self, _r: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn r_times_v(&self, _r: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn describe(&self) -> String {
        "none".into()
    }
}

/// `v0 exp(-alpha0 r) / r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Yukawa {
    pub v0: f64,
    pub alpha0: f64,
}

impl Yukawa {
    pub const fn new(v0: f64, alpha0: f64) -> Self {
        Self { v0, alpha0 }
    }
}

impl RadialPotential for Yukawa {
    fn value(&self, r: f64) -> Result<f64> {
        Ok(self.v0 * (-self.alpha0 * r).exp() / r)
    }

    fn r_times_v(&self, r: f64) -> Result<f64> {
        Ok(self.v0 * (-self.alpha0 * r).exp())
    }

    fn describe(&self) -> String {
        format!("yukawa(v0={}, alpha0={})", self.v0, self.alpha0)
    }
}

/// Pure `strength / r`. Not short-range; used to cross-check the quadrature
/// against the analytic Coulomb matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombTail {
    pub strength: f64,
}

impl CoulombTail {
    pub const fn new(strength: f64) -> Self {
        Self { strength }
    }
}

impl RadialPotential for CoulombTail {
    fn value(&self, r: f64) -> Result<f64> {
        Ok(self.strength / r)
    }

    fn r_times_v(&self, _r: f64) -> Result<f64> {
        Ok(self.strength)
    }

    fn describe(&self) -> String {
        format!("coulomb({})", self.strength)
    }
}

/// Potential given on a grid `(r_i, v_i)`, interpolated by a natural cubic
/// spline. Evaluation outside `[r_0, r_last]` is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    r: Vec<f64>,
    v: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
    label: String,
}

impl Tabulated {
    pub fn new(r: Vec<f64>, v: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if r.len() != v.len() {
            return Err(Error::InvalidArgument("r and v columns differ in length".into()));
        }
        if r.len() < 3 {
            return Err(Error::InvalidArgument(
                "tabulated potential needs at least 3 points".into(),
            ));
        }
        if !r.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "tabulated radii must be strictly increasing".into(),
            ));
        }
        if r[0] < 0.0 || !r.iter().chain(&v).all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(
                "tabulated values must be finite with r >= 0".into(),
            ));
        }
        let m = natural_spline_second_derivatives(&r, &v);
        Ok(Self {
            r,
            v,
            m,
            label: label.into(),
        })
    }

    /// Reads two whitespace-separated columns `r v(r)`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text, path.display().to_string())
    }

    pub fn parse(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| {
                    Error::InvalidArgument(format!("line {}: expected two columns", lineno + 1))
                })?
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))
            };
            r.push(parse(cols.next())?);
            v.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
        }
        Self::new(r, v, label)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }
}

impl RadialPotential for Tabulated {
    fn value(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::PotentialOutOfRange { r: x });
        }
        let k = match self.r.partition_point(|&ri| ri <= x) {
            0 => 0,
            p => (p - 1).min(self.r.len() - 2),
        };
        let h = self.r[k + 1] - self.r[k];
        let a = (self.r[k + 1] - x) / h;
        let b = (x - self.r[k]) / h;
        Ok(a * self.v[k]
            + b * self.v[k + 1]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0)
    }

    fn describe(&self) -> String {
        format!("tabulated({})", self.label)
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        let p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for k in (0..n - 1).rev() {
        m[k] = m[k] * m[k + 1] + u[k];
    }
    m
}
