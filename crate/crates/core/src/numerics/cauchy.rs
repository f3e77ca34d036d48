use std::f64::consts::PI;

use num_complex::Complex64;

use super::PowerSeries;
use crate::error::{Error, Result};

/// Default agreement required between successive circle refinements, relative to
/// the largest sample magnitude on the circle.
pub const DEFAULT_CAUCHY_TOL: f64 = 1e-13;
const MAX_POINTS: usize = 4096;

/// Taylor coefficients of an analytic `f` at `center` from the trapezoid rule on a
/// circle of the given radius. The number of circle points starts at
/// `4 (order + 1)` (rounded up to a power of two) and doubles until two successive
/// coefficient vectors agree.
pub fn taylor_coeffs_cauchy<F>(
    f: F,
    center: Complex64,
    radius: f64,
    order: usize,
    tol: f64,
) -> Result<PowerSeries>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = taylor_coeffs_cauchy_many(|z| Ok(vec![f(z)?]), 1, center, radius, order, tol)?;
    Ok(out.pop().expect("one component"))
}

/// Vector-valued variant: `f` returns `dim` values per circle point, so expensive
/// shared work (e.g. evaluating `B(z)` once for many basis functions) happens once.
pub fn taylor_coeffs_cauchy_many<F>(
    f: F,
    dim: usize,
    center: Complex64,
    radius: f64,
    order: usize,
    tol: f64,
) -> Result<Vec<PowerSeries>>
where
    F: Fn(Complex64) -> Result<Vec<Complex64>>,
{
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
    }
    let mut m = (4 * (order + 1)).max(8).next_power_of_two();
    let point = |k: usize, m: usize| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64);

    let sample = |z: Complex64| -> Result<Vec<Complex64>> {
        let v = f(z)?;
        if v.len() != dim {
            return Err(Error::eval(z, format!("expected {dim} values, got {}", v.len())));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::eval(z, "non-finite value on Cauchy circle"));
        }
        Ok(v)
    };

    let mut samples: Vec<Vec<Complex64>> = (0..m).map(|k| sample(point(k, m))).collect::<Result<_>>()?;
    let mut coeffs = coefficients(&samples, dim, radius, order);

    loop {
        let m2 = 2 * m;
        // interleave: old samples sit at even indices of the refined grid
        let mut refined = Vec::with_capacity(m2);
        for (k, old) in samples.into_iter().enumerate() {
            refined.push(old);
            refined.push(sample(point(2 * k + 1, m2))?);
        }
        samples = refined;
        m = m2;
        let next = coefficients(&samples, dim, radius, order);

        let scale = samples
            .iter()
            .flat_map(|v| v.iter().map(|x| x.norm()))
            .fold(f64::MIN_POSITIVE, f64::max);
        let change = next
            .iter()
            .zip(&coeffs)
            .flat_map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .enumerate()
                    .map(|(n, (x, y))| (x - y).norm() * radius.powi(n as i32))
            })
            .fold(0.0, f64::max);
        coeffs = next;
        if change <= tol * scale {
            break;
        }
        if m >= MAX_POINTS {
            let best = series(center, &coeffs[0]);
            return Err(Error::Convergence {
                points: m,
                change: change / scale,
                best: Box::new(best),
            });
        }
    }
    Ok(coeffs.iter().map(|c| series(center, c)).collect())
}

fn series(center: Complex64, c: &[Complex64]) -> PowerSeries {
    PowerSeries::new(center, c.to_vec())
}

/// `c_n = (1/M) sum_k f(z_k) e^{-2 pi i n k / M} / r^n` per component.
fn coefficients(samples: &[Vec<Complex64>], dim: usize, radius: f64, order: usize) -> Vec<Vec<Complex64>> {
    let m = samples.len();
    let mut out = vec![vec![Complex64::default(); order + 1]; dim];
    for n in 0..=order {
        let scale = 1.0 / (m as f64 * radius.powi(n as i32));
        for (k, v) in samples.iter().enumerate() {
            // reduce n k mod M before forming the angle to keep it small
            let phase = Complex64::from_polar(1.0, -2.0 * PI * ((n * k) % m) as f64 / m as f64);
            for (d, x) in v.iter().enumerate() {
                out[d][n] += x * phase;
            }
        }
        for comp in out.iter_mut() {
            comp[n] *= scale;
        }
    }
    out
}
