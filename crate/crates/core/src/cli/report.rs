use std::fmt::Write as _;

use super::config::{OutputFormat, RunMode};
use crate::green::PhysicsParams;
use crate::oracle::{klein_gordon_level, schrodinger_level};
use crate::solver::BoundState;

pub const NO_STATES: &str = "no states found in window";
const CSV_HEADER: &str = "n,binding,oracle_sch,oracle_kg,diff,residual,cf_depth";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub binding: f64,
    pub oracle_sch: f64,
    /// `None` when the Klein–Gordon level is not real.
    pub oracle_kg: Option<f64>,
    /// Distance to the Schrödinger level in `sch` mode, to the Klein–Gordon
    /// level otherwise.
    pub diff: Option<f64>,
    pub residual: f64,
    pub cf_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: RunMode,
    pub rows: Vec<Row>,
    pub states: Vec<BoundState>,
}

impl Report {
    pub fn new(mode: RunMode, params: &PhysicsParams, l: u32, states: &[BoundState]) -> Self {
        let rows = states
            .iter()
            .map(|s| {
                let n = s.index as u32;
                let oracle_sch = schrodinger_level(params.z, params.mass, params.e2, n, l);
                let oracle_kg = klein_gordon_level(params, n, l).ok();
                let reference = match mode {
                    RunMode::Sch => Some(oracle_sch),
                    RunMode::Fv0 | RunMode::Fv0s => oracle_kg,
                };
                Row {
                    n: s.index,
                    binding: s.binding_energy,
                    oracle_sch,
                    oracle_kg,
                    diff: reference.map(|r| (s.binding_energy - r).abs()),
                    residual: s.residual,
                    cf_depth: s.cf_depth,
                }
            })
            .collect();
        Self {
            mode,
            rows,
            states: states.to_vec(),
        }
    }
}

/// Renders the report. Text mirrors the 8-decimal table layout; CSV keeps
/// 17 significant digits so values re-parse to the same `f64`.
pub fn emit_table(report: &Report, format: OutputFormat) -> Vec<u8> {
    let mut s = String::new();
    if report.rows.is_empty() {
        s.push_str(NO_STATES);
        s.push('\n');
        return s.into_bytes();
    }
    match format {
        OutputFormat::Text => {
            let _ = writeln!(
                s,
                "{:<3}{:>11}  {:>11}  {:>11}  {:>9}  {:>9}  {:>8}",
                "n", "binding", "oracle_sch", "oracle_kg", "diff", "residual", "cf_depth"
            );
            for r in &report.rows {
                let kg = r.oracle_kg.map_or("-".to_string(), |v| format!("{v:.8}"));
                let diff = r.diff.map_or("-".to_string(), |v| format!("{v:.2e}"));
                let _ = writeln!(
                    s,
                    "{:<3}{:>11.8}  {:>11.8}  {:>11}  {:>9}  {:>9.2e}  {:>8}",
                    r.n, r.binding, r.oracle_sch, kg, diff, r.residual, r.cf_depth
                );
            }
        }
        OutputFormat::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.16e}"));
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{},{},{:.16e},{}",
                    r.n,
                    r.binding,
                    r.oracle_sch,
                    opt(r.oracle_kg),
                    opt(r.diff),
                    r.residual,
                    r.cf_depth
                );
            }
        }
    }
    s.into_bytes()
}

/// Reads back CSV written by [`emit_table`]. Returns `None` on malformed input.
pub fn parse_csv(text: &str) -> Option<Vec<Row>> {
    let mut lines = text.lines();
    let first = lines.next()?;
    if first == NO_STATES {
        return Some(Vec::new());
    }
    if first != CSV_HEADER {
        return None;
    }
    let opt = |t: &str| -> Option<Option<f64>> {
        if t.is_empty() {
            Some(None)
        } else {
            t.parse().ok().map(Some)
        }
    };
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return None;
            }
            Some(Row {
                n: f[0].parse().ok()?,
                binding: f[1].parse().ok()?,
                oracle_sch: f[2].parse().ok()?,
                oracle_kg: opt(f[3])?,
                diff: opt(f[4])?,
                residual: f[5].parse().ok()?,
                cf_depth: f[6].parse().ok()?,
            })
        })
        .collect()
}
