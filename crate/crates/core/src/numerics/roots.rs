//! Solutions of `phi(t) = theta (mod pi)` for strictly increasing phases.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const BISECTION_WIDTH: f64 = 1e-3;
const PHASE_TOL: f64 = 1e-13;
const MAX_REFINE_STEPS: usize = 200;
const MAX_WALK_STEP: f64 = 2.0;

/// A phase function and its derivative.
pub trait PhaseFunction {
    /// `(phi(x), phi'(x))`. Unless [`continuous`](Self::continuous) is true
    /// only `phi mod pi` is meaningful.
    fn eval(&self, x: f64) -> Result<(f64, f64)>;

    /// Whether `eval` returns one continuous branch of the phase.
    fn continuous(&self) -> bool {
        false
    }
}

impl<P: PhaseFunction + ?Sized> PhaseFunction for &P {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        (**self).eval(x)
    }
    fn continuous(&self) -> bool {
        (**self).continuous()
    }
}

/// Phase given on a continuous branch (closed forms).
pub struct ClosedFormPhase<F>(pub F);

impl<F: Fn(f64) -> Result<(f64, f64)>> PhaseFunction for ClosedFormPhase<F> {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        (self.0)(x)
    }
    fn continuous(&self) -> bool {
        true
    }
}

/// Phase known only modulo pi (e.g. `-arg E(x)`).
pub struct WrappedPhase<F>(pub F);

impl<F: Fn(f64) -> Result<(f64, f64)>> PhaseFunction for WrappedPhase<F> {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        (self.0)(x)
    }
}

/// `factor * phi`: the phase of `E^factor` for integer factors.
pub struct ScaledPhase<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: PhaseFunction> PhaseFunction for ScaledPhase<P> {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let (p, d) = self.inner.eval(x)?;
        Ok((self.factor * p, self.factor * d))
    }
    fn continuous(&self) -> bool {
        self.inner.continuous()
    }
}

/// Representative of `v` modulo pi in `[-pi/2, pi/2)`.
pub fn wrap_pi(v: f64) -> f64 {
    let r = v - PI * (v / PI).round();
    if r >= PI / 2.0 {
        r - PI
    } else {
        r
    }
}

/// All `t` in `[lo, hi]` with `phi(t) = residue (mod pi)`, strictly increasing.
pub fn find_nodes_by_phase<P: PhaseFunction>(phase: &P, range: (f64, f64), residue: f64) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Domain(format!("invalid node range [{lo}, {hi}]")));
    }
    if !residue.is_finite() {
        return Err(Error::Domain("residue must be finite".into()));
    }
    let eval = |x: f64| -> Result<(f64, f64)> {
        let (p, d) = phase.eval(x)?;
        if !(p.is_finite() && d.is_finite()) {
            return Err(Error::eval(x, "non-finite phase"));
        }
        if d <= 0.0 {
            return Err(Error::Monotonicity { x, derivative: d });
        }
        Ok((p, d))
    };
    let mut nodes = if phase.continuous() {
        continuous_nodes(&eval, lo, hi, residue)?
    } else {
        walked_nodes(&eval, lo, hi, residue)?
    };
    nodes.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.abs().max(1.0));
    Ok(nodes)
}

fn continuous_nodes(eval: &dyn Fn(f64) -> Result<(f64, f64)>, lo: f64, hi: f64, residue: f64) -> Result<Vec<f64>> {
    let (p_lo, _) = eval(lo)?;
    let (p_hi, _) = eval(hi)?;
    let k_first = ((p_lo - residue) / PI).ceil() as i64;
    let k_last = ((p_hi - residue) / PI).floor() as i64;
    let mut nodes = Vec::new();
    let mut left = lo;
    for k in k_first..=k_last {
        let level = residue + k as f64 * PI;
        let g = |x: f64| -> Result<(f64, f64)> {
            let (p, d) = eval(x)?;
            Ok((p - level, d))
        };
        let t = refine(&g, left, hi)?;
        nodes.push(t);
        left = t;
    }
    Ok(nodes)
}

fn walked_nodes(eval: &dyn Fn(f64) -> Result<(f64, f64)>, lo: f64, hi: f64, residue: f64) -> Result<Vec<f64>> {
    let resid = |p: f64| wrap_pi(p - residue);
    let (p0, mut d0) = eval(lo)?;
    let mut r0 = resid(p0);
    let mut x0 = lo;
    let mut nodes = Vec::new();
    if r0 == 0.0 {
        nodes.push(lo);
    }
    while x0 < hi {
        let mut step = (0.5 / d0).min(MAX_WALK_STEP).min(hi - x0);
        let (x1, r1, d1, delta) = loop {
            let x1 = if step >= hi - x0 { hi } else { x0 + step };
            let (p1, d1) = eval(x1)?;
            let (_, dm) = eval(0.5 * (x0 + x1))?;
            // keep the phase increment over a step well below pi/2
            if step * d1.max(dm) > 0.75 && step > 1e-9 {
                step *= 0.5;
                continue;
            }
            let r1 = resid(p1);
            break (x1, r1, d1, wrap_pi(r1 - r0));
        };
        let u1 = r0 + delta;
        // the increment stays below pi/2, so at most one crossing of 0
        if r0 < 0.0 && u1 >= 0.0 {
            let g = |x: f64| -> Result<(f64, f64)> {
                let (p, d) = eval(x)?;
                Ok((r0 + wrap_pi(resid(p) - r0), d))
            };
            nodes.push(refine(&g, x0, x1)?);
        }
        x0 = x1;
        r0 = r1;
        d0 = d1;
    }
    Ok(nodes)
}

/// Root of the increasing `g` in `[a, b]` by bisection down to a short
/// bracket, then Newton with bisection safeguard.
fn refine(g: &dyn Fn(f64) -> Result<(f64, f64)>, mut a: f64, mut b: f64) -> Result<f64> {
    let (ga, _) = g(a)?;
    if ga >= 0.0 {
        return Ok(a);
    }
    let (gb, _) = g(b)?;
    if gb <= 0.0 {
        return Ok(b);
    }
    while b - a > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        let (gm, _) = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if gm < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_REFINE_STEPS {
        let (gx, dx) = g(x)?;
        if gx.abs() <= PHASE_TOL {
            return Ok(x);
        }
        if gx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - gx / dx;
        let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if next == x || b - a <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
