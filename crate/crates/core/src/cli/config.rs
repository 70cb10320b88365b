//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::green::{DEFAULT_CF_TOL, SPEED_OF_LIGHT};
use crate::solver::{DEFAULT_BISECT_TOL, DEFAULT_GRID_POINTS};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Scalar Schrödinger with Coulomb.
    Sch,
    /// Feshbach–Villars with Coulomb.
    Fv0,
    /// Feshbach–Villars with Coulomb plus the short-range potential.
    Fv0s,
}

impl FromStr for RunMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "sch" => Ok(Self::Sch),
            "fv0" => Ok(Self::Fv0),
            "fv0s" => Ok(Self::Fv0s),
            other => Err(ConfigError::new(
                "mode",
                format!("expected sch, fv0 or fv0s, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            other => Err(ConfigError::new(
                "format",
                format!("expected text or csv, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialChoice {
    None,
    Yukawa { v0: f64, alpha0: f64 },
    Tabulated(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    pub l: u32,
    pub b: f64,
    pub n: usize,
    pub n_big: usize,
    pub z: f64,
    pub mass: f64,
    pub c: f64,
    /// Only consulted in `fv0s` mode.
    pub potential: PotentialChoice,
    pub e_min: f64,
    pub e_max: f64,
    pub grid_points: usize,
    pub cf_tol: f64,
    pub bisect_tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_E_MIN: f64 = -0.6;
/// Just above the eleventh short-range level and below the twelfth Coulomb
/// level.
pub const DEFAULT_E_MAX: f64 = -0.0037;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::Fv0,
            l: 0,
            b: 1.0,
            n: 24,
            n_big: 48,
            z: -1.0,
            mass: 1.0,
            c: SPEED_OF_LIGHT,
            potential: PotentialChoice::Yukawa {
                v0: 2.0,
                alpha0: 2.0,
            },
            e_min: DEFAULT_E_MIN,
            e_max: DEFAULT_E_MAX,
            grid_points: DEFAULT_GRID_POINTS,
            cf_tol: DEFAULT_CF_TOL,
            bisect_tol: DEFAULT_BISECT_TOL,
            format: OutputFormat::Text,
            out: None,
        }
    }
}

const KEYS: [&str; 16] = [
    "mode",
    "l",
    "b",
    "N",
    "N_big",
    "Z",
    "mass",
    "c",
    "v0",
    "alpha0",
    "potential_file",
    "e_min",
    "e_max",
    "grid_points",
    "cf_tol",
    "bisect_tol",
];

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| ConfigError::new(key, format!("cannot parse `{value}`: {e}")))
}

impl RunConfig {
    /// Parses a config file body. Unset keys keep their defaults; `N_big`
    /// defaults to `2 N`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut n_big_set = false;
        let mut v0 = None;
        let mut alpha0 = None;
        let mut file = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::new(key, "unknown key"));
            }
            if value.is_empty() {
                return Err(ConfigError::new(key, "missing value"));
            }
            match key {
                "mode" => cfg.mode = value.parse()?,
                "l" => cfg.l = number(key, value)?,
                "b" => cfg.b = number(key, value)?,
                "N" => cfg.n = number(key, value)?,
                "N_big" => {
                    cfg.n_big = number(key, value)?;
                    n_big_set = true;
                }
                "Z" => cfg.z = number(key, value)?,
                "mass" => cfg.mass = number(key, value)?,
                "c" => cfg.c = number(key, value)?,
                "v0" => v0 = Some(number::<f64>(key, value)?),
                "alpha0" => alpha0 = Some(number::<f64>(key, value)?),
                "potential_file" => file = Some(PathBuf::from(value)),
                "e_min" => cfg.e_min = number(key, value)?,
                "e_max" => cfg.e_max = number(key, value)?,
                "grid_points" => cfg.grid_points = number(key, value)?,
                "cf_tol" => cfg.cf_tol = number(key, value)?,
                "bisect_tol" => cfg.bisect_tol = number(key, value)?,
                _ => unreachable!(),
            }
        }
        if !n_big_set {
            cfg.n_big = 2 * cfg.n;
        }
        cfg.potential = match (file, v0, alpha0) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(ConfigError::new(
                    "potential_file",
                    "cannot be combined with v0/alpha0",
                ))
            }
            (Some(path), None, None) => PotentialChoice::Tabulated(path),
            (None, v0, alpha0) => PotentialChoice::Yukawa {
                v0: v0.unwrap_or(2.0),
                alpha0: alpha0.unwrap_or(2.0),
            },
        };
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks the fields before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be positive, got {v}")))
            }
        };
        positive("b", self.b)?;
        positive("mass", self.mass)?;
        positive("c", self.c)?;
        positive("cf_tol", self.cf_tol)?;
        positive("bisect_tol", self.bisect_tol)?;
        if self.n == 0 {
            return Err(ConfigError::new("N", "must be at least 1"));
        }
        if self.n_big < self.n {
            return Err(ConfigError::new(
                "N_big",
                format!("must be at least N = {}, got {}", self.n, self.n_big),
            ));
        }
        if !(self.z.is_finite() && self.z < 0.0) {
            return Err(ConfigError::new("Z", "must be negative (attractive Coulomb)"));
        }
        if !(self.e_min < self.e_max && self.e_max < 0.0) {
            return Err(ConfigError::new(
                "e_min",
                format!("window needs e_min < e_max < 0, got [{}, {}]", self.e_min, self.e_max),
            ));
        }
        if self.grid_points < 16 {
            return Err(ConfigError::new("grid_points", "must be at least 16"));
        }
        if self.mode == RunMode::Fv0s {
            match &self.potential {
                PotentialChoice::None => {
                    return Err(ConfigError::new("v0", "fv0s mode needs a short-range potential"))
                }
                PotentialChoice::Yukawa { v0, alpha0 } => {
                    if !v0.is_finite() {
                        return Err(ConfigError::new("v0", "must be finite"));
                    }
                    positive("alpha0", *alpha0)?;
                }
                PotentialChoice::Tabulated(_) => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn keys_and_comments() {
        let cfg = RunConfig::parse(
            "# scalar run\nmode = sch\nN = 20  # basis\nb=0.5\nZ = -2\ne_max = -0.01\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, RunMode::Sch);
        assert_eq!((cfg.n, cfg.n_big), (20, 40));
        assert_eq!(cfg.b, 0.5);
        assert_eq!(cfg.z, -2.0);
        assert_eq!(cfg.e_max, -0.01);
    }

    #[test]
    fn explicit_big_size_is_kept() {
        let cfg = RunConfig::parse("N = 10\nN_big = 15").unwrap();
        assert_eq!(cfg.n_big, 15);
    }

    #[test]
    fn empty_potential_value_names_the_field() {
        let err = RunConfig::parse("mode = fv0s\nv0 =\n").unwrap_err();
        assert_eq!(err.field, "v0");
        let err = RunConfig::parse("mode = fv0s\npotential_file = \n").unwrap_err();
        assert_eq!(err.field, "potential_file");
    }

    #[test]
    fn fv0s_without_potential_is_rejected() {
        let cfg = RunConfig {
            mode: RunMode::Fv0s,
            potential: PotentialChoice::None,
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().field, "v0");
    }

    #[test]
    fn bad_input_is_reported_by_field() {
        assert_eq!(RunConfig::parse("foo = 1").unwrap_err().field, "foo");
        assert_eq!(RunConfig::parse("N = ten").unwrap_err().field, "N");
        assert_eq!(RunConfig::parse("mode = dirac").unwrap_err().field, "mode");
        assert_eq!(RunConfig::parse("just text").unwrap_err().field, "line 1");
        let both = RunConfig::parse("v0 = 1\npotential_file = v.dat").unwrap_err();
        assert_eq!(both.field, "potential_file");

        let cfg = RunConfig::parse("b = -1").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "b");
        let cfg = RunConfig::parse("e_min = -0.1\ne_max = -0.2").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "e_min");
        let cfg = RunConfig::parse("N = 10\nN_big = 5").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "N_big");
    }

    #[test]
    fn tabulated_file_choice() {
        let cfg = RunConfig::parse("potential_file = /tmp/v.dat").unwrap();
        assert_eq!(cfg.potential, PotentialChoice::Tabulated("/tmp/v.dat".into()));
    }
}
