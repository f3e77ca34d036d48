//! Hermite-Biehler structure functions `E = A - iB`, their rotations
//! `e^{i theta} E`, phases and node sets.
//!
//! Conventions: `E*(z) = conj(E(conj z))`, `A = (E + E*)/2`,
//! `B = (i/2)(E - E*)`; the phase `phi` is the continuous function with
//! `e^{i phi(x)} E(x)` real and `phi(0) = -arg E(0)`.

mod eval;
mod phase;
mod validate;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::BesselOrder;

pub use eval::{eval_structure, StructureValues};
pub use phase::{node_set, node_window, phase, phase_derivative, phase_derivative_closed_form, ZeroSet};
pub use validate::{hb_validate, upper_half_plane_grid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `E(z) = e^{-i tau z}`.
    PaleyWiener { tau: f64 },
    /// `E = A_alpha - i B_alpha` built from Bessel functions.
    Homogeneous { alpha: BesselOrder },
    /// `E(z) = e^{-i a z} prod (1 - z / conj(w_n))`, `w_n = x_n + i y_n`.
    ProductZeros { a: f64, zeros: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunction {
    pub family: Family,
    /// Rotation angle in `[0, pi)`: the function is `e^{i theta} E`.
    pub theta: f64,
}

impl StructureFunction {
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..PI).contains(&theta)) {
            return Err(Error::Domain(format!("theta must lie in [0, pi), got {theta}")));
        }
        match &family {
            Family::PaleyWiener { tau } => {
                if !(tau.is_finite() && *tau > 0.0) {
                    return Err(Error::Domain(format!("tau must be positive, got {tau}")));
                }
            }
            Family::Homogeneous { .. } => {}
            Family::ProductZeros { a, zeros } => {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(Error::Domain(format!("a must be non-negative, got {a}")));
                }
                if zeros.is_empty() && *a == 0.0 {
                    return Err(Error::Domain("product family needs a > 0 or at least one zero".into()));
                }
                for &(x, y) in zeros {
                    if !(x.is_finite() && y.is_finite() && y > 0.0) {
                        return Err(Error::Domain(format!("zero ({x}, {y}) must have y > 0")));
                    }
                }
            }
        }
        Ok(StructureFunction { family, theta })
    }

    pub fn paley_wiener(tau: f64) -> Result<Self> {
        Self::new(Family::PaleyWiener { tau }, 0.0)
    }

    pub fn homogeneous(alpha: f64) -> Result<Self> {
        Self::new(
            Family::Homogeneous {
                alpha: BesselOrder::new(alpha)?,
            },
            0.0,
        )
    }

    pub fn product(a: f64, zeros: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(Family::ProductZeros { a, zeros }, 0.0)
    }

    pub fn rotated(&self, theta: f64) -> Result<Self> {
        Self::new(self.family.clone(), theta)
    }

    /// `sum_n (1/y_n + |x_n| / |w_n|^2)` for the product family; bounds
    /// `sup |E'/E|` on the upper half-plane together with `a`.
    pub fn convergence_margin(&self) -> Option<f64> {
        match &self.family {
            Family::ProductZeros { zeros, .. } => Some(
                zeros
                    .iter()
                    .map(|&(x, y)| 1.0 / y + x.abs() / (x * x + y * y))
                    .sum(),
            ),
            _ => None,
        }
    }

    /// Common period of `|E(x)|^{-2}`-weighted integrands, when there is one.
    pub fn oscillation_period(&self) -> Option<f64> {
        match &self.family {
            Family::PaleyWiener { tau } => Some(PI / tau),
            Family::Homogeneous { .. } => Some(PI),
            Family::ProductZeros { a, .. } if *a > 0.0 => Some(PI / a),
            Family::ProductZeros { .. } => None,
        }
    }

    /// Whether `H(E)` is finite-dimensional (product family with `a = 0`).
    pub fn finite_dimensional(&self) -> bool {
        matches!(&self.family, Family::ProductZeros { a, .. } if *a == 0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawStructure::from(self)).expect("structure function serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawStructure = serde_json::from_str(s)?;
        raw.try_into()
    }
}

/// Canonical JSON layout: `schema, family, tau | alpha | (a, zeros), theta`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    #[serde(default = "default_schema")]
    schema: u32,
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zeros: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    theta: f64,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl From<&StructureFunction> for RawStructure {
    fn from(sf: &StructureFunction) -> Self {
        let mut raw = RawStructure {
            schema: SCHEMA_VERSION,
            family: String::new(),
            tau: None,
            alpha: None,
            a: None,
            zeros: None,
            theta: sf.theta,
        };
        match &sf.family {
            Family::PaleyWiener { tau } => {
                raw.family = "paley_wiener".into();
                raw.tau = Some(*tau);
            }
            Family::Homogeneous { alpha } => {
                raw.family = "homogeneous".into();
                raw.alpha = Some(alpha.alpha());
            }
            Family::ProductZeros { a, zeros } => {
                raw.family = "product".into();
                raw.a = Some(*a);
                raw.zeros = Some(zeros.iter().map(|&(x, y)| [x, y]).collect());
            }
        }
        raw
    }
}

impl TryFrom<RawStructure> for StructureFunction {
    type Error = Error;
    fn try_from(raw: RawStructure) -> Result<Self> {
        if raw.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", raw.schema)));
        }
        let missing = |field: &str| Error::Parse(format!("family '{}' requires field '{field}'", raw.family));
        let family = match raw.family.as_str() {
            "paley_wiener" => Family::PaleyWiener {
                tau: raw.tau.ok_or_else(|| missing("tau"))?,
            },
            "homogeneous" => Family::Homogeneous {
                alpha: BesselOrder::new(raw.alpha.ok_or_else(|| missing("alpha"))?)?,
            },
            "product" => Family::ProductZeros {
                a: raw.a.unwrap_or(0.0),
                zeros: raw.zeros.unwrap_or_default().iter().map(|z| (z[0], z[1])).collect(),
            },
            other => return Err(Error::Parse(format!("unknown family '{other}'"))),
        };
        StructureFunction::new(family, raw.theta)
    }
}

impl Serialize for StructureFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawStructure::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStructure::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_json_round_trips_byte_for_byte() {
        let cases = [
            StructureFunction::paley_wiener(1.0).unwrap(),
            StructureFunction::homogeneous(0.5).unwrap().rotated(0.25).unwrap(),
            StructureFunction::product(0.0, vec![(2.0, 2.0), (4.0, 1.0)]).unwrap(),
        ];
        for sf in cases {
            let s = sf.to_json();
            let back = StructureFunction::from_json(&s).unwrap();
            assert_eq!(back, sf);
            assert_eq!(back.to_json(), s);
        }
        assert_eq!(
            StructureFunction::paley_wiener(2.0).unwrap().to_json(),
            r#"{"schema":1,"family":"paley_wiener","tau":2.0,"theta":0.0}"#
        );
    }

    #[test]
    fn invalid_configurations() {
        assert!(StructureFunction::paley_wiener(0.0).is_err());
        assert!(StructureFunction::homogeneous(-1.5).is_err());
        assert!(StructureFunction::product(0.0, vec![(1.0, -1.0)]).is_err());
        assert!(StructureFunction::paley_wiener(1.0).unwrap().rotated(PI).is_err());
        assert!(matches!(
            StructureFunction::from_json(r#"{"family":"paley_wiener"}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            StructureFunction::from_json(r#"{"family":"bogus","tau":1}"#),
            Err(Error::Parse(_))
        ));
        assert!(StructureFunction::from_json(r#"{"schema":2,"family":"paley_wiener","tau":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_random(tau in 1e-3f64..1e3, theta in 0.0f64..3.14, zs in proptest::collection::vec((-1e3f64..1e3, 1e-3f64..1e3), 1..6)) {
            for sf in [
                StructureFunction::new(Family::PaleyWiener { tau }, theta).unwrap(),
                StructureFunction::new(Family::ProductZeros { a: tau, zeros: zs.clone() }, theta).unwrap(),
            ] {
                let s = sf.to_json();
                let back = StructureFunction::from_json(&s).unwrap();
                prop_assert_eq!(back.to_json(), s);
                prop_assert_eq!(back, sf);
            }
        }
    }
}
