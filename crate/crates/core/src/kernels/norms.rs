//! Weighted inner products `<F, G> = int F conj(G) |E|^{-2 nu} dx` and their
//! discrete counterparts `sum_t F(t) conj(G(t)) / K_nu(t, t)` over the zeros of `B_nu`.
//!
//! The discrete sum is taken symmetrically in node index around the node
//! nearest the origin, with a smooth taper on `N <= |i - c| <= 2N`. For terms
//! with an asymptotic expansion in the index the tapered sums converge like a
//! series in `1/N`, which a Richardson table in `1/N` removes as `N` grows.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{kernel_diag, SpaceSpec};
use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::numerics::quadrature::{extrapolated, push_level_at, taper_weight};
use crate::numerics::QuadratureResult;
use crate::structure::node_window;

const FIRST_HALF_WIDTH: usize = 16;
const MAX_HALF_WIDTH: usize = 4096;
const MIN_LEVELS: usize = 4;
// Window growth per level. Every term is cached, so slow growth costs little
// and keeps the extrapolation table within the asymptotic regime.
const GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Continuous,
    Discrete,
}

/// `<F, G>` in `H(E^nu)`, or `||F||^2` when `g` is `None`.
pub fn norm_and_inner(
    space: &SpaceSpec,
    f: &dyn EntireFunction,
    g: Option<&dyn EntireFunction>,
    mode: NormMode,
    tol: f64,
) -> Result<QuadratureResult> {
    let res = inner_products(space, f, &[g.unwrap_or(f)], mode, tol)?;
    let mut r = res[0];
    if g.is_none() {
        r.value.im = 0.0;
    }
    Ok(r)
}

/// `<F, G_k>` for every `G_k`, sharing the evaluations of `F` and of the weight.
pub fn inner_products(
    space: &SpaceSpec,
    f: &dyn EntireFunction,
    gs: &[&dyn EntireFunction],
    mode: NormMode,
    tol: f64,
) -> Result<Vec<QuadratureResult>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let term = |x: f64, weight: f64, out: &mut [Complex64]| -> Result<()> {
        let z = Complex64::new(x, 0.0);
        let fx = checked(f, z)?;
        for (o, g) in out.iter_mut().zip(gs) {
            *o = fx * checked(*g, z)?.conj() * weight;
        }
        Ok(())
    };
    match mode {
        NormMode::Continuous => space
            .quadrature(tol)
            .integrate_many(gs.len(), |x, out| term(x, space.weight(x)?, out)),
        NormMode::Discrete => discrete_sums(space, gs.len(), tol, |t, out| term(t, 1.0 / kernel_diag(space, t)?, out)),
    }
}

fn checked(f: &dyn EntireFunction, z: Complex64) -> Result<Complex64> {
    let v = f.eval(z)?;
    if !v.is_finite() {
        return Err(Error::eval(z, format!("{} is not finite", f.name())));
    }
    Ok(v)
}

pub(crate) fn discrete_sums<T>(space: &SpaceSpec, dim: usize, tol: f64, term: T) -> Result<Vec<QuadratureResult>>
where
    T: Fn(f64, &mut [Complex64]) -> Result<()>,
{
    discrete_sums_scaled(space, dim, tol, term, |l1| l1.to_vec())
}

/// As [`discrete_sums`], with each component accepted once its error is
/// below `tol` times `scale(l1)[d]` instead of its own absolute sum `l1[d]`.
pub(crate) fn discrete_sums_scaled<T, S>(space: &SpaceSpec, dim: usize, tol: f64, term: T, scale: S) -> Result<Vec<QuadratureResult>>
where
    T: Fn(f64, &mut [Complex64]) -> Result<()>,
    S: Fn(&[f64]) -> Vec<f64>,
{
    // terms keyed by node offset from the centre node
    let mut cache: HashMap<i64, (f64, Vec<Complex64>)> = HashMap::new();
    let mut table: Vec<Vec<Vec<Complex64>>> = Vec::new();
    let mut steps: Vec<f64> = Vec::new();
    let mut half = FIRST_HALF_WIDTH;
    loop {
        let set = node_window(&space.sf, space.nu, 0.0, 2 * half)?;
        let c = set.center_index().ok_or_else(|| Error::Range("no nodes of B_nu found".into()))? as i64;
        let mut sum = vec![Complex64::default(); dim];
        let mut l1 = vec![0.0; dim];
        for (i, &t) in set.nodes.iter().enumerate() {
            let offset = i as i64 - c;
            let fresh = match cache.get(&offset) {
                Some((s, _)) => (s - t).abs() > 1e-9 * t.abs().max(1.0),
                None => true,
            };
            if fresh {
                let mut v = vec![Complex64::default(); dim];
                term(t, &mut v)?;
                cache.insert(offset, (t, v));
            }
            let w = taper_weight(offset.unsigned_abs() as f64 / half as f64);
            let v = &cache[&offset].1;
            for d in 0..dim {
                sum[d] += w * v[d];
                l1[d] += v[d].norm();
            }
        }
        let edge = set.nodes[0].abs().max(set.nodes[set.nodes.len() - 1].abs());

        // the whole node set fits in the window: the sum is exact
        if set.len() < 4 * half + 1 {
            return Ok((0..dim)
                .map(|d| QuadratureResult {
                    value: set.nodes.iter().enumerate().map(|(i, _)| cache[&(i as i64 - c)].1[d]).sum(),
                    error_estimate: 4.0 * f64::EPSILON * set.len() as f64 * l1[d],
                    truncation_point: edge,
                })
                .collect());
        }

        steps.push(1.0 / half as f64);
        push_level_at(&mut table, &sum, &steps);
        if table.len() >= MIN_LEVELS {
            let (values, err) = extrapolated(&table);
            let reference = scale(&l1);
            if (0..dim).all(|d| err[d] <= tol * reference[d].max(f64::MIN_POSITIVE)) {
                return Ok((0..dim)
                    .map(|d| QuadratureResult {
                        value: values[d],
                        error_estimate: err[d],
                        truncation_point: edge,
                    })
                    .collect());
            }
            if half >= MAX_HALF_WIDTH {
                let worst = (0..dim)
                    .max_by(|&a, &b| (err[a] / reference[a]).total_cmp(&(err[b] / reference[b])))
                    .unwrap_or(0);
                return Err(Error::Quadrature {
                    value: values[worst].norm(),
                    estimate: err[worst],
                });
            }
        }
        half = (half as f64 * GROWTH).ceil() as usize;
    }
}
