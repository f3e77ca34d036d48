use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{eval_structure, Family, StructureFunction};
use crate::error::{Error, Result};
use crate::numerics::{find_nodes_by_phase, gauss_legendre, wrap_pi, PhaseFunction, ScaledPhase};

/// Relative size of `B(t)` accepted at a node.
pub const NODE_TOL: f64 = 1e-10;
const MAX_WINDOW_RADIUS: f64 = 1e6;

/// `phi'(x) = Re(i E'(x) / E(x))`.
pub fn phase_derivative(sf: &StructureFunction, x: f64) -> Result<f64> {
    let v = eval_structure(sf, Complex64::new(x, 0.0), 1)?;
    Ok((Complex64::i() * v.e[1] / v.e[0]).re)
}

/// Closed-form `phi'` where one exists (Paley-Wiener and product families).
pub fn phase_derivative_closed_form(sf: &StructureFunction, x: f64) -> Option<f64> {
    match &sf.family {
        Family::PaleyWiener { tau } => Some(*tau),
        Family::ProductZeros { a, zeros } => Some(
            a + zeros
                .iter()
                .map(|&(xn, yn)| yn / ((x - xn).powi(2) + yn * yn))
                .sum::<f64>(),
        ),
        Family::Homogeneous { .. } => None,
    }
}

/// The continuous phase with `phi(0) = -arg E(0)`.
pub fn phase(sf: &StructureFunction, x: f64) -> Result<f64> {
    match &sf.family {
        Family::PaleyWiener { tau } => Ok(tau * x - sf.theta),
        Family::ProductZeros { a, zeros } => Ok(product_phase(*a, zeros, sf.theta, x)),
        Family::Homogeneous { .. } => {
            // integrate phi' from the anchor, then snap to the exact value mod pi
            let (nodes, weights) = gauss_legendre(16);
            let panels = (x.abs() / 2.0).ceil().max(1.0) as usize;
            let h = x / panels as f64;
            let mut integral = 0.0;
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * h;
                for (u, w) in nodes.iter().zip(&weights) {
                    integral += w * 0.5 * h * phase_derivative(sf, mid + 0.5 * h * u)?;
                }
            }
            let approx = -sf.theta + integral;
            let e = eval_structure(sf, Complex64::new(x, 0.0), 0)?.e[0];
            Ok(approx + wrap_pi(-e.arg() - approx))
        }
    }
}

fn product_phase(a: f64, zeros: &[(f64, f64)], theta: f64, x: f64) -> f64 {
    // -arg(1 - x / conj(w)) = -[arg(conj(w) - x) - arg(conj(w))], continuous in x
    a * x
        - theta
        - zeros
            .iter()
            .map(|&(xn, yn)| (-yn).atan2(xn - x) - (-yn).atan2(xn))
            .sum::<f64>()
}

struct SfPhase<'a>(&'a StructureFunction);

impl PhaseFunction for SfPhase<'_> {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let sf = self.0;
        match &sf.family {
            Family::PaleyWiener { tau } => Ok((tau * x - sf.theta, *tau)),
            Family::ProductZeros { a, zeros } => Ok((
                product_phase(*a, zeros, sf.theta, x),
                phase_derivative_closed_form(sf, x).expect("closed form"),
            )),
            Family::Homogeneous { .. } => {
                let v = eval_structure(sf, Complex64::new(x, 0.0), 1)?;
                Ok((-v.e[0].arg(), (Complex64::i() * v.e[1] / v.e[0]).re))
            }
        }
    }

    fn continuous(&self) -> bool {
        !matches!(self.0.family, Family::Homogeneous { .. })
    }
}

/// Real points where `power * phi = residue (mod pi)`: the zeros of `B` for
/// `e^{i residue} E^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub sf: StructureFunction,
    /// Exponent of the working function `E^power`.
    pub power: u32,
    pub residue: f64,
    pub range: (f64, f64),
    pub nodes: Vec<f64>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.gaps().into_iter().reduce(f64::min)
    }

    /// Index of the node closest to the origin.
    pub fn center_index(&self) -> Option<usize> {
        (0..self.nodes.len()).min_by(|&i, &j| self.nodes[i].abs().total_cmp(&self.nodes[j].abs()))
    }
}

/// Nodes of `B` for `e^{i residue} E` in `range`, checked against `|B(t)| <= 1e-10 |E(t)|`.
pub fn node_set(sf: &StructureFunction, residue: f64, range: (f64, f64)) -> Result<ZeroSet> {
    nodes_of_power(sf, 1, residue, range)
}

fn nodes_of_power(sf: &StructureFunction, power: u32, residue: f64, range: (f64, f64)) -> Result<ZeroSet> {
    let phase = ScaledPhase {
        inner: SfPhase(sf),
        factor: power as f64,
    };
    let nodes = find_nodes_by_phase(&phase, range, residue)?;
    let rot = Complex64::from_polar(1.0, residue);
    for &t in &nodes {
        let e = eval_structure(sf, Complex64::new(t, 0.0), 0)?.e[0].powu(power);
        let ratio = (rot * e).im.abs() / e.norm();
        if ratio > NODE_TOL {
            return Err(Error::InvalidNode { t, ratio });
        }
    }
    Ok(ZeroSet {
        sf: sf.clone(),
        power,
        residue,
        range,
        nodes,
    })
}

/// Nodes of `B` for `e^{i residue} E^power`, `per_side` on each side of the
/// node nearest the origin (fewer if the space runs out of nodes).
pub fn node_window(sf: &StructureFunction, power: u32, residue: f64, per_side: usize) -> Result<ZeroSet> {
    if power == 0 {
        return Err(Error::Domain("power must be at least 1".into()));
    }
    let d0 = phase_derivative(sf, 0.0)?;
    let mut radius = ((per_side + 2) as f64 * std::f64::consts::PI / (power as f64 * d0)).max(4.0);
    let limit = match &sf.family {
        Family::ProductZeros { zeros, a } if *a == 0.0 => zeros
            .iter()
            .map(|&(x, y)| x.abs() + y)
            .fold(1.0, f64::max)
            * 1e3,
        _ => MAX_WINDOW_RADIUS,
    }
    .min(MAX_WINDOW_RADIUS);
    loop {
        let set = nodes_of_power(sf, power, residue, (-radius, radius))?;
        if let Some(c) = set.center_index() {
            let enough = c >= per_side && set.nodes.len() - c > per_side;
            if enough || radius >= limit {
                let lo = c.saturating_sub(per_side);
                let hi = (c + per_side + 1).min(set.nodes.len());
                let nodes = set.nodes[lo..hi].to_vec();
                let range = (nodes[0], *nodes.last().expect("non-empty"));
                return Ok(ZeroSet { nodes, range, ..set });
            }
        } else if radius >= limit {
            return Ok(set);
        }
        radius = (2.0 * radius).min(limit);
    }
}
