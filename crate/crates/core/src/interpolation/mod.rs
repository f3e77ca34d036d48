//! Taylor data of `B` at its zeros, the interpolation bases `B_{nu,j}` and
//! `G_{nu,j}`, sampling and reconstruction.
//!
//! At a node `t` write `q(h) = B(t + h) / h`. Then `B_{nu,j}(z, t) = B(z)^nu / (z - t)^j`,
//! `b_{nu,j}(t)` are the Taylor coefficients of `q^nu`, `a_{nu,n}(t)` those of
//! `q^{-nu}`, and
//! `G_{nu,j}(z, t) = (1/j!) sum_{n=1}^{nu-j} a_{nu,nu-j-n}(t) B_{nu,n}(z, t)`
//! satisfies `G_{nu,j}^{(l)}(s, t) = delta_{st} delta_{lj}` on the node set.

mod samples;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::SpaceSpec;
use crate::numerics::{factorial, invert_power_series, PowerSeries};
use crate::structure::{eval_structure, ZeroSet};

pub use samples::{reconstruct, reconstruct_with, sample, Reconstruction, SampleSet};

/// Below this distance from the node the basis functions use their Taylor expansion.
pub const NEAR_NODE_RADIUS: f64 = 1e-4;
/// Relative size of `B'(t)` below which a node is rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Extra orders kept in the local expansion of `q^nu`.
const LOCAL_ORDERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    B,
    G,
}

/// Taylor data at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEntry {
    pub t: f64,
    pub nu: u32,
    pub b_prime: f64,
    /// `b_{nu,j}(t)` for `j = 0..nu`.
    pub bcoeffs: Vec<f64>,
    /// `a_{nu,n}(t)` for `n = 0..nu` (more if requested).
    pub acoeffs: Vec<f64>,
    /// Series of `q^nu` about `t`, for evaluation near the node.
    local: PowerSeries,
}

/// All basis entries over a node set.
#[derive(Debug, Clone)]
pub struct InterpolationBasis {
    pub space: SpaceSpec,
    pub entries: Vec<BasisEntry>,
}

impl InterpolationBasis {
    pub fn new(space: &SpaceSpec, nodes: &ZeroSet) -> Result<Self> {
        let entries = nodes.nodes.iter().map(|&t| basis_coeffs(space, t)).collect::<Result<_>>()?;
        Ok(InterpolationBasis {
            space: space.clone(),
            entries,
        })
    }
}

pub fn basis_coeffs(space: &SpaceSpec, t: f64) -> Result<BasisEntry> {
    basis_coeffs_to_order(space, t, space.nu as usize - 1)
}

/// As [`basis_coeffs`], with `a_{nu,n}` computed up to `n = a_order`.
pub fn basis_coeffs_to_order(space: &SpaceSpec, t: f64, a_order: usize) -> Result<BasisEntry> {
    let nu = space.nu as usize;
    let order = (nu + LOCAL_ORDERS).max(a_order);
    let v = eval_structure(&space.sf, Complex64::new(t, 0.0), order + 1)?;
    let scale = v.e[0].norm();
    let ratio = v.b[0].norm() / scale;
    if ratio > crate::kernels::NODE_TOL {
        return Err(Error::InvalidNode { t, ratio });
    }
    let b_prime = v.b[1].re;
    if b_prime.abs() < DEGENERATE_TOL * scale {
        return Err(Error::DegenerateNode {
            t,
            ratio: b_prime.abs() / scale,
        });
    }
    let center = Complex64::new(t, 0.0);
    let mut b = PowerSeries::from_derivatives(center, &v.b);
    // the node is an exact zero of q's numerator
    b.coeffs[0] = Complex64::default();
    let q = b.shift_down();
    let q_nu = q.pow(space.nu, order);
    let a = invert_power_series(&q_nu, a_order)?;
    Ok(BasisEntry {
        t,
        nu: space.nu,
        b_prime,
        bcoeffs: q_nu.coeffs[..nu].iter().map(|c| c.re).collect(),
        acoeffs: a.coeffs.iter().map(|c| c.re).collect(),
        local: q_nu,
    })
}

impl BasisEntry {
    /// `B_{nu,n}(z, t)` for `n = 1..=nu`, given `B(z)^nu`.
    fn b_values(&self, z: Complex64, b_pow: Complex64) -> Vec<Complex64> {
        let nu = self.nu as usize;
        let h = z - self.t;
        if h.norm() < NEAR_NODE_RADIUS {
            // B^nu / h^n = q^nu h^(nu - n)
            let q = self.local.eval(z);
            return (1..=nu).map(|n| q * h.powu((nu - n) as u32)).collect();
        }
        let inv = 1.0 / h;
        let mut out = Vec::with_capacity(nu);
        let mut cur = b_pow;
        for _ in 0..nu {
            cur *= inv;
            out.push(cur);
        }
        out
    }

    /// `G_{nu,j}(z, t)` for `j = 0..nu` from the `B_{nu,n}` values.
    fn g_from_b(&self, bv: &[Complex64]) -> Vec<Complex64> {
        let nu = self.nu as usize;
        (0..nu)
            .map(|j| {
                let s: Complex64 = (1..=nu - j).map(|n| self.acoeffs[nu - j - n] * bv[n - 1]).sum();
                s / factorial(j)
            })
            .collect()
    }

    /// `B_{nu,n}(z, t)` and their `z`-derivatives, given `B(z)` and `B'(z)`.
    fn b_values_with_derivative(&self, z: Complex64, b: Complex64, bp: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let nu = self.nu as usize;
        let h = z - self.t;
        if h.norm() < NEAR_NODE_RADIUS {
            let (q, dq) = self.local.eval_with_derivative(z);
            return (1..=nu)
                .map(|n| {
                    let m = (nu - n) as u32;
                    let d = dq * h.powu(m) + if m > 0 { m as f64 * q * h.powu(m - 1) } else { Complex64::default() };
                    (q * h.powu(m), d)
                })
                .unzip();
        }
        let b_pow = b.powu(self.nu);
        let db_pow = self.nu as f64 * b.powu(self.nu - 1) * bp;
        (1..=nu)
            .map(|n| {
                let hn = h.powu(n as u32);
                (b_pow / hn, db_pow / hn - n as f64 * b_pow / (hn * h))
            })
            .unzip()
    }

    /// `G_{nu,j}(z, t)` and `G_{nu,j}'(z, t)` for all `j`, given `B(z)` and `B'(z)`.
    pub(crate) fn g_values_with_derivative(&self, z: Complex64, b: Complex64, bp: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let (v, d) = self.b_values_with_derivative(z, b, bp);
        (self.g_from_b(&v), self.g_from_b(&d))
    }

    /// `G_{nu,j}(z, t)` for all `j`, given `B(z)^nu`.
    pub(crate) fn g_values(&self, z: Complex64, b_pow: Complex64) -> Vec<Complex64> {
        self.g_from_b(&self.b_values(z, b_pow))
    }
}

/// `B(z)^nu` for the space.
pub(crate) fn b_power(space: &SpaceSpec, z: Complex64) -> Result<Complex64> {
    Ok(eval_structure(&space.sf, z, 0)?.b[0].powu(space.nu))
}

/// `B_{nu,j}(z, t)` (`1 <= j <= nu`) or `G_{nu,j}(z, t)` (`0 <= j < nu`).
pub fn eval_basis(space: &SpaceSpec, entry: &BasisEntry, kind: BasisKind, j: usize, z: Complex64) -> Result<Complex64> {
    let nu = space.nu as usize;
    let ok = match kind {
        BasisKind::B => (1..=nu).contains(&j),
        BasisKind::G => j < nu,
    };
    if !ok {
        return Err(Error::Domain(format!("{kind:?} index {j} out of range for nu = {nu}")));
    }
    let bv = entry.b_values(z, b_power(space, z)?);
    Ok(match kind {
        BasisKind::B => bv[j - 1],
        BasisKind::G => entry.g_from_b(&bv)[j],
    })
}

/// The matrix `M` with `G_{nu,j} = sum_n M[j][n-1] B_{nu,n}`, and its inverse.
pub fn g_to_b_matrix(entry: &BasisEntry) -> (DMatrix<f64>, DMatrix<f64>) {
    let nu = entry.nu as usize;
    let m = DMatrix::from_fn(nu, nu, |j, col| {
        let n = col + 1;
        if n <= nu - j {
            entry.acoeffs[nu - j - n] / factorial(j)
        } else {
            0.0
        }
    });
    let inv = m.clone().try_inverse().expect("anti-triangular with non-zero anti-diagonal");
    (m, inv)
}

/// A basis function `B_{nu,j}(., t)` or `G_{nu,j}(., t)` as an entire function.
pub struct BasisFunction {
    pub space: SpaceSpec,
    pub entry: BasisEntry,
    pub kind: BasisKind,
    pub j: usize,
}

impl BasisFunction {
    pub fn new(space: &SpaceSpec, t: f64, kind: BasisKind, j: usize) -> Result<Self> {
        let entry = basis_coeffs(space, t)?;
        eval_basis(space, &entry, kind, j, Complex64::new(t, 0.0))?;
        Ok(BasisFunction {
            space: space.clone(),
            entry,
            kind,
            j,
        })
    }
}

impl crate::function::EntireFunction for BasisFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_basis(&self.space, &self.entry, self.kind, self.j, z)
    }

    fn name(&self) -> String {
        format!("{:?}_{{{},{}}}(., {})", self.kind, self.space.nu, self.j, self.entry.t)
    }
}
