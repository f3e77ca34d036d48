//! Bessel functions of the first kind and the entire functions
//! `A_a(z) = G(a+1) (z/2)^-a J_a(z)`, `B_a(z) = G(a+1) (z/2)^-a J_{a+1}(z)`
//! that make up the homogeneous structure functions.

mod bessel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bessel::{bessel_j, bessel_j_real, homogeneous_eval, HomogeneousValues, MAX_ARGUMENT, SERIES_LIMIT};

/// Bessel order `alpha > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > -1.0 {
            Ok(BesselOrder(alpha))
        } else {
            Err(Error::Domain(format!("Bessel order must exceed -1, got {alpha}")))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        BesselOrder::new(alpha)
    }
}

impl From<BesselOrder> for f64 {
    fn from(o: BesselOrder) -> f64 {
        o.0
    }
}

/// `Gamma(x)` for real `x`.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
