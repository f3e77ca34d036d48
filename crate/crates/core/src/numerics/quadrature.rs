//! Adaptive Gauss-Legendre integration over the real line.
//!
//! The window `[-T, T]` grows geometrically. Each partial integral is closed
//! off with a smooth taper on `T <= |x| <= 2T`; for integrands that are
//! (oscillating) expansions in `1/x` the tapered partial integrals then behave
//! like `I - sum_k c_k / T^k` up to super-algebraically small terms, and a
//! Richardson table in `1/T` removes the algebraic tail. Panels lie on a fixed
//! grid and every abscissa is evaluated once, so `T` can grow by less than a
//! factor of two per level; the table then stays within the asymptotic regime.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GL_DEGREE: usize = 16;
const MAX_RICHARDSON_COLUMNS: usize = 6;
/// Doublings of `T` over which `int |f|` must keep growing to signal divergence.
const DIVERGENCE_RUN: usize = 8;
/// Levels per doubling of `T`.
const LEVELS_PER_DOUBLING: usize = 3;
const MIN_LEVELS: usize = 7;
const MAX_BISECTION_DEPTH: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Half-width of the last window that was integrated directly.
    pub truncation_point: f64,
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_DEGREE))
}

/// Window-doubling integrator for `int_R f(x) dx` (or `int_0^inf`).
#[derive(Debug, Clone)]
pub struct LineQuadrature {
    /// Relative tolerance, measured against `int |f|`.
    pub tol: f64,
    /// Initial half-width of the window.
    pub start: f64,
    /// Common period of the integrand's oscillations, if any. Windows are
    /// aligned to multiples of it and panels are at most half a period wide.
    pub period: Option<f64>,
    /// Maximum initial panel width (at most half a period when a period is
    /// given); `None` without a period grows panels with |x|.
    pub panel_width: Option<f64>,
    pub half_line: bool,
    pub max_doublings: usize,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        LineQuadrature {
            tol: 1e-10,
            start: 16.0,
            period: None,
            panel_width: Some(2.0),
            half_line: false,
            max_doublings: 12,
        }
    }
}

/// Integrates `f` over the real line with default settings.
pub fn integrate_weighted_line<F>(f: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64>,
{
    LineQuadrature {
        tol,
        ..Default::default()
    }
    .integrate(|x| f(x).map(|v| Complex64::new(v, 0.0)))
}

impl LineQuadrature {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_start(mut self, start: f64) -> Self {
        self.start = start.max(1.0);
        self
    }

    pub fn with_period(mut self, period: Option<f64>) -> Self {
        self.period = period;
        self
    }

    pub fn with_panel_width(mut self, width: Option<f64>) -> Self {
        self.panel_width = width;
        self
    }

    pub fn half_line(mut self) -> Self {
        self.half_line = true;
        self
    }

    pub fn integrate<F>(&self, f: F) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let res = self.integrate_many(1, |x, out| {
            out[0] = f(x)?;
            Ok(())
        })?;
        Ok(res[0])
    }

    /// Integrates `dim` integrands sharing one evaluation per abscissa.
    pub fn integrate_many<F>(&self, dim: usize, f: F) -> Result<Vec<QuadratureResult>>
    where
        F: Fn(f64, &mut [Complex64]) -> Result<()>,
    {
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        let start = match self.period {
            Some(p) if p > 0.0 => (self.start.max(1.0) / p).ceil() * p,
            _ => self.start.max(1.0),
        };
        let mut panel = PanelIntegrator {
            f: &f,
            dim,
            tol: self.tol,
            buf: vec![Complex64::default(); dim],
            width: match (self.period, self.panel_width) {
                (Some(p), Some(w)) => Some(w.min(0.5 * p)),
                (Some(p), None) => Some(0.5 * p),
                (None, w) => w,
            },
            right: 0.0,
            left: 0.0,
            quad_err: vec![0.0; dim],
            pending: Points::default(),
        };

        // everything with |x| <= T, folded in as T passes it
        let mut inner = vec![Complex64::default(); dim];
        let mut inner_l1 = vec![0.0; dim];
        let mut active = Points::default();
        let mut history: Vec<Vec<f64>> = Vec::new(); // int_{|x| <= T} |f| per level
        let mut growing_run = vec![0usize; dim];
        let mut table: Vec<Vec<Vec<Complex64>>> = Vec::new(); // [level][column][component]
        let mut steps: Vec<f64> = Vec::new();
        let growth = 2f64.powf(1.0 / LEVELS_PER_DOUBLING as f64);
        let max_levels = self.max_doublings * LEVELS_PER_DOUBLING;

        let mut big_t = start;
        let mut last = None;
        for level in 0..=max_levels {
            panel.cover(2.0 * big_t, self.half_line)?;
            active.append(&mut panel.pending);
            active.fold_inside(big_t, dim, &mut inner, &mut inner_l1);

            let mut tapered = inner.clone();
            let mut l1 = inner_l1.clone();
            for (k, &x) in active.x.iter().enumerate() {
                let tw = taper_weight(x.abs() / big_t);
                for d in 0..dim {
                    let v = active.v[k * dim + d];
                    tapered[d] += v * tw;
                    l1[d] += v.norm();
                }
            }

            history.push(inner_l1.clone());
            let s = LEVELS_PER_DOUBLING;
            if level >= 2 * s {
                let (now, mid, old) = (&history[level], &history[level - s], &history[level - 2 * s]);
                for d in 0..dim {
                    let shell = now[d] - mid[d];
                    if shell > 0.0 && shell >= 0.9 * (mid[d] - old[d]) {
                        growing_run[d] += 1;
                    } else {
                        growing_run[d] = 0;
                    }
                    if growing_run[d] >= DIVERGENCE_RUN * s {
                        return Err(Error::Divergence {
                            window: big_t,
                            partial: inner[d].norm(),
                        });
                    }
                }
            }

            steps.push(1.0 / big_t);
            push_level_at(&mut table, &tapered, &steps);
            let (values, rich_err) = extrapolated(&table);
            let err: Vec<f64> = (0..dim).map(|d| rich_err[d] + panel.quad_err[d]).collect();
            if table.len() >= MIN_LEVELS && (0..dim).all(|d| growing_run[d] == 0 && err[d] <= self.tol * l1[d].max(f64::MIN_POSITIVE)) {
                return Ok((0..dim)
                    .map(|d| QuadratureResult {
                        value: values[d],
                        error_estimate: err[d],
                        truncation_point: 2.0 * big_t,
                    })
                    .collect());
            }
            last = Some((values, err, l1));
            big_t *= growth;
        }
        let (values, err, l1) = last.expect("at least one level");
        let worst = (0..dim)
            .max_by(|&a, &b| (err[a] / l1[a].max(f64::MIN_POSITIVE)).total_cmp(&(err[b] / l1[b].max(f64::MIN_POSITIVE))))
            .unwrap_or(0);
        Err(Error::Quadrature {
            value: values[worst].norm(),
            estimate: err[worst],
        })
    }
}

/// Richardson row for a level computed at step `steps[m]`, the earlier rows
/// at `steps[..m]`: polynomial extrapolation to step 0 in Neville form.
pub(crate) fn push_level_at(table: &mut Vec<Vec<Vec<Complex64>>>, partial: &[Complex64], steps: &[f64]) {
    let m = table.len();
    debug_assert_eq!(steps.len(), m + 1);
    let mut row = vec![partial.to_vec()];
    for j in 1..=m.min(MAX_RICHARDSON_COLUMNS) {
        let factor = steps[m - j] / steps[m] - 1.0;
        let prev_row = &table[m - 1];
        let col: Vec<Complex64> = row[j - 1]
            .iter()
            .zip(&prev_row[j - 1])
            .map(|(cur, old)| cur + (cur - old) / factor)
            .collect();
        row.push(col);
    }
    table.push(row);
}

/// Best extrapolant per component and its error estimate. Every column of the
/// last row is a candidate, scored by its distance to the same column of the
/// previous row and to the column below it. Low columns reach back fewer
/// levels, so they win while the early levels are still pre-asymptotic.
pub(crate) fn extrapolated(table: &[Vec<Vec<Complex64>>]) -> (Vec<Complex64>, Vec<f64>) {
    let last = table.last().expect("non-empty table");
    let dim = last[0].len();
    if table.len() < 2 {
        return (last[last.len() - 1].clone(), vec![f64::INFINITY; dim]);
    }
    let prev = &table[table.len() - 2];
    let mut values = last[last.len() - 1].clone();
    let mut err = vec![f64::INFINITY; dim];
    for j in 1..last.len().min(prev.len()) {
        for d in 0..dim {
            let e = (last[j][d] - prev[j][d]).norm().max((last[j][d] - last[j - 1][d]).norm());
            if e < err[d] {
                err[d] = e;
                values[d] = last[j][d];
            }
        }
    }
    (values, err)
}

/// Weighted integrand values `w_k f(x_k)` at quadrature abscissae.
#[derive(Default)]
struct Points {
    x: Vec<f64>,
    v: Vec<Complex64>,
}

impl Points {
    fn append(&mut self, other: &mut Points) {
        self.x.append(&mut other.x);
        self.v.append(&mut other.v);
    }

    /// Moves the points with `|x| <= t` into the running sums.
    fn fold_inside(&mut self, t: f64, dim: usize, sum: &mut [Complex64], l1: &mut [f64]) {
        let mut keep = 0;
        for k in 0..self.x.len() {
            if self.x[k].abs() <= t {
                for d in 0..dim {
                    let v = self.v[k * dim + d];
                    sum[d] += v;
                    l1[d] += v.norm();
                }
            } else {
                self.x[keep] = self.x[k];
                for d in 0..dim {
                    self.v[keep * dim + d] = self.v[k * dim + d];
                }
                keep += 1;
            }
        }
        self.x.truncate(keep);
        self.v.truncate(keep * dim);
    }
}

struct PanelIntegrator<'a, F> {
    f: &'a F,
    dim: usize,
    tol: f64,
    buf: Vec<Complex64>,
    /// Maximum initial panel width (half a period for oscillatory integrands).
    width: Option<f64>,
    /// Covered region `[-left, right]`.
    right: f64,
    left: f64,
    quad_err: Vec<f64>,
    /// Accepted abscissae not yet handed to the caller.
    pending: Points,
}

impl<F> PanelIntegrator<'_, F>
where
    F: Fn(f64, &mut [Complex64]) -> Result<()>,
{
    fn panel_width(&self, r: f64) -> f64 {
        match self.width {
            Some(w) => w,
            None => (0.125 * r).max(1.0),
        }
    }

    /// Extends the covered region to `[-radius, radius]` (or `[0, radius]`).
    fn cover(&mut self, radius: f64, half_line: bool) -> Result<()> {
        while self.right < radius {
            let (lo, hi) = (self.right, self.right + self.panel_width(self.right));
            let whole = self.gl(lo, hi)?;
            self.adapt(lo, hi, whole, 0)?;
            self.right = hi;
        }
        while !half_line && self.left < radius {
            let (lo, hi) = (-(self.left + self.panel_width(self.left)), -self.left);
            let whole = self.gl(lo, hi)?;
            self.adapt(lo, hi, whole, 0)?;
            self.left = -lo;
        }
        Ok(())
    }

    fn adapt(&mut self, a: f64, b: f64, whole: Panel, depth: usize) -> Result<()> {
        let mid = 0.5 * (a + b);
        let left = self.gl(a, mid)?;
        let right = self.gl(mid, b)?;
        let mut ok = true;
        let mut errs = vec![0.0; self.dim];
        for d in 0..self.dim {
            let fine = left.sum[d] + right.sum[d];
            errs[d] = (fine - whole.sum[d]).norm();
            let l1 = left.abs[d] + right.abs[d];
            // never ask a panel for more than rounding allows: oscillatory
            // integrands lose about |x| eps in their phase
            let noise = 64.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
            let target = (1e-2 * self.tol).max(noise) * l1;
            if errs[d] > target && errs[d] > 1e-300 {
                ok = false;
            }
        }
        if ok || depth >= MAX_BISECTION_DEPTH {
            for d in 0..self.dim {
                self.quad_err[d] += errs[d];
            }
            for p in [left, right] {
                self.pending.x.extend_from_slice(&p.x);
                self.pending.v.extend_from_slice(&p.v);
            }
            return Ok(());
        }
        self.adapt(a, mid, left, depth + 1)?;
        self.adapt(mid, b, right, depth + 1)
    }

    /// 16-point rule on [a, b]: integral, integral of the modulus and the
    /// weighted values per abscissa.
    fn gl(&mut self, a: f64, b: f64) -> Result<Panel> {
        let (nodes, weights) = gl16();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut p = Panel {
            sum: vec![Complex64::default(); self.dim],
            abs: vec![0.0; self.dim],
            x: Vec::with_capacity(nodes.len()),
            v: Vec::with_capacity(nodes.len() * self.dim),
        };
        for (&x, &w) in nodes.iter().zip(weights) {
            let t = mid + half * x;
            self.buf.iter_mut().for_each(|v| *v = Complex64::default());
            (self.f)(t, &mut self.buf)?;
            p.x.push(t);
            for d in 0..self.dim {
                let v = self.buf[d];
                if !v.is_finite() {
                    return Err(Error::eval(t, "non-finite integrand"));
                }
                let wv = v * (w * half);
                p.sum[d] += wv;
                p.abs[d] += wv.norm();
                p.v.push(wv);
            }
        }
        Ok(p)
    }
}

struct Panel {
    sum: Vec<Complex64>,
    abs: Vec<f64>,
    x: Vec<f64>,
    v: Vec<Complex64>,
}

/// Smooth cut-off: 1 for `s <= 1`, 0 for `s >= 2`, infinitely differentiable.
pub(crate) fn taper_weight(s: f64) -> f64 {
    let psi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let (a, b) = (psi(2.0 - s), psi(s - 1.0));
    if a + b == 0.0 {
        return if s <= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}
