//! Closed-form Coulomb levels (hbar = 1), as binding energies.

use crate::error::{Error, Result};
use crate::green::PhysicsParams;

/// `-m Z^2 e^4 / (2 (n + l + 1)^2)`.
pub fn schrodinger_level(z: f64, mass: f64, e2: f64, n: u32, l: u32) -> f64 {
    let principal = f64::from(n + l + 1);
    -mass * z * z * e2 * e2 / (2.0 * principal * principal)
}

/// Klein–Gordon Coulomb level minus the rest energy:
/// `m c^2 [1 + a^2 / (n + 1/2 + sqrt((l + 1/2)^2 - a^2))^2]^{-1/2} - m c^2`
/// with `a = |Z| e^2 / c`.
pub fn klein_gordon_level(params: &PhysicsParams, n: u32, l: u32) -> Result<f64> {
    let a = params.z.abs() * params.e2 / params.c;
    let half_l = f64::from(l) + 0.5;
    let discriminant = half_l * half_l - a * a;
    if discriminant < 0.0 {
        return Err(Error::ImaginaryRoot { discriminant });
    }
    let denom = f64::from(n) + 0.5 + discriminant.sqrt();
    let x = a * a / (denom * denom);
    // (1+x)^{-1/2} - 1 without cancellation.
    let s = (1.0 + x).sqrt();
    Ok(-params.rest_energy() * x / (s * (1.0 + s)))
}

/// Reference levels for one `(Z, l)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HydrogenLevels {
    pub z: f64,
    pub l: u32,
    /// `|Z| e^2 / c`.
    pub alpha: f64,
    pub schrodinger: Vec<f64>,
    pub klein_gordon: Vec<f64>,
}

impl HydrogenLevels {
    pub fn new(params: &PhysicsParams, l: u32, count: u32) -> Result<Self> {
        let klein_gordon = (0..count)
            .map(|n| klein_gordon_level(params, n, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            z: params.z,
            l,
            alpha: params.z.abs() * params.e2 / params.c,
            schrodinger: (0..count)
                .map(|n| schrodinger_level(params.z, params.mass, params.e2, n, l))
                .collect(),
            klein_gordon,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KG_TABLE: [f64; 11] = [
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

    #[test]
    fn schrodinger_values() {
        assert_eq!(schrodinger_level(-1.0, 1.0, 1.0, 0, 0), -0.5);
        assert!((schrodinger_level(-1.0, 1.0, 1.0, 2, 0) + 0.05555556).abs() < 5e-9);
        assert!((schrodinger_level(-1.0, 1.0, 1.0, 10, 0) + 0.00413223).abs() < 5e-9);
    }

    #[test]
    fn klein_gordon_matches_table_to_printed_digits() {
        let p = PhysicsParams::default();
        for (n, printed) in KG_TABLE.iter().enumerate() {
            let v = klein_gordon_level(&p, n as u32, 0).unwrap();
            assert!((v - printed).abs() <= 5e-9, "n={n}: {v:.10} vs {printed}");
        }
    }

    #[test]
    fn klein_gordon_is_more_bound_than_schrodinger() {
        let p = PhysicsParams::default();
        for n in 0..=10 {
            let kg = klein_gordon_level(&p, n, 0).unwrap();
            assert!(kg < schrodinger_level(-1.0, 1.0, 1.0, n, 0));
        }
    }

    #[test]
    fn nonrelativistic_limit() {
        let p = PhysicsParams {
            c: 1e6,
            ..PhysicsParams::default()
        };
        for n in 0..5 {
            let kg = klein_gordon_level(&p, n, 0).unwrap();
            assert!((kg - schrodinger_level(-1.0, 1.0, 1.0, n, 0)).abs() < 1e-11);
        }
    }

    #[test]
    fn supercritical_charge_is_rejected() {
        let p = PhysicsParams {
            z: -80.0,
            ..PhysicsParams::default()
        };
        assert!(matches!(
            klein_gordon_level(&p, 0, 0),
            Err(Error::ImaginaryRoot { .. })
        ));
        assert!(klein_gordon_level(&p, 0, 1).is_ok());
    }

    #[test]
    fn level_table() {
        let t = HydrogenLevels::new(&PhysicsParams::default(), 0, 11).unwrap();
        assert_eq!(t.klein_gordon.len(), 11);
        assert!((t.alpha - 1.0 / 137.03602).abs() < 1e-15);
    }
}
