use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{standard_corpus, CorpusFunction, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::function::{EntireFunction, FnEntire};
use crate::kernels::{norm_and_inner, NormMode, SpaceSpec};
use crate::report::{DiagnosticReport, Relation};
use crate::structure::{eval_structure, node_window, phase_derivative, Family, StructureFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Corpus size for the estimate of `D`.
    pub corpus_size: usize,
    pub seed: u64,
    pub tol: f64,
    /// `phi'` and `|B/(E(x - t))|` are sampled on `[-x, x]`.
    pub grid_half_width: f64,
    pub grid_points: usize,
    /// Nodes on each side of the origin for the separation checks.
    pub window: usize,
    pub hilbert_instances: usize,
    pub pp_instances: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            corpus_size: 50,
            seed: DEFAULT_SEED,
            tol: 1e-8,
            grid_half_width: 50.0,
            grid_points: 2001,
            window: 20,
            hilbert_instances: 100,
            pp_instances: 20,
        }
    }
}

/// Empirical norm of differentiation on `H(E^nu)`: the largest
/// `||F'|| / ||F||` over the standard corpus. Returns the estimate and the
/// per-member ratios.
pub fn estimate_d(space: &SpaceSpec, corpus_size: usize, seed: u64, tol: f64) -> Result<(f64, Vec<f64>)> {
    let corpus = standard_corpus(space, corpus_size, seed)?;
    let mut ratios = Vec::with_capacity(corpus.len());
    for f in &corpus {
        let r = space.quadrature(tol).integrate_many(2, |x, out| {
            let w = space.weight(x)?;
            let d = f.derivatives(Complex64::new(x, 0.0), 1)?;
            out[0] = Complex64::new(d[0].norm_sqr() * w, 0.0);
            out[1] = Complex64::new(d[1].norm_sqr() * w, 0.0);
            Ok(())
        })?;
        ratios.push((r[1].value.re / r[0].value.re).sqrt());
    }
    let d = ratios.iter().copied().fold(0.0, f64::max);
    Ok((d, ratios))
}

/// `sum_{m != n} a_n conj(a_m) / (lambda_n - lambda_m)^2` (real by symmetry).
pub fn hilbert_sum(lambdas: &[f64], a: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for (n, (ln, an)) in lambdas.iter().zip(a).enumerate() {
        for (m, (lm, am)) in lambdas.iter().zip(a).enumerate() {
            if m != n {
                s += (an * am.conj()).re / (ln - lm).powi(2);
            }
        }
    }
    s
}

/// `(1 + e^{6 tau p alpha}) / (pi alpha)` with `alpha = min(eps/2, h/2)`;
/// `h = None` when `E` has no zeros.
pub fn polya_plancherel_constant(tau: f64, p: f64, eps: f64, h: Option<f64>) -> f64 {
    let alpha = match h {
        Some(h) => (0.5 * eps).min(0.5 * h),
        None => 0.5 * eps,
    };
    (1.0 + (6.0 * tau * p * alpha).exp()) / (PI * alpha)
}

/// `inf_n y_n` over the zeros `x_n - i y_n` of `E`, or `None` without zeros.
/// For the homogeneous family the zeros are located by Newton's method from
/// seeds along `|x| <= 60`; their depth grows with `|x_n|`, so the shallowest
/// ones lie in that range.
pub fn lowest_zero_depth(sf: &StructureFunction) -> Result<Option<f64>> {
    match &sf.family {
        Family::PaleyWiener { .. } => Ok(None),
        Family::ProductZeros { zeros, .. } => Ok(zeros.iter().map(|z| z.1).reduce(f64::min)),
        Family::Homogeneous { alpha } => {
            if alpha.alpha() == -0.5 {
                return Ok(None);
            }
            let mut best: Option<f64> = None;
            for i in 0..=120 {
                for y0 in [0.5, 1.0, 2.0, 3.0] {
                    if let Some(z) = newton_zero(sf, Complex64::new(0.5 * i as f64, -y0)) {
                        if z.im < -1e-8 {
                            best = Some(best.map_or(-z.im, |b: f64| b.min(-z.im)));
                        }
                    }
                }
            }
            Ok(best)
        }
    }
}

fn newton_zero(sf: &StructureFunction, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..60 {
        let v = eval_structure(sf, z, 1).ok()?;
        let dz = v.e[0] / v.e[1];
        if !dz.is_finite() {
            return None;
        }
        z -= dz;
        if z.norm() > 200.0 {
            return None;
        }
        if dz.norm() < 1e-12 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

fn grid(cfg: &SuiteConfig) -> Vec<f64> {
    let n = cfg.grid_points.max(2);
    (0..n)
        .map(|k| -cfg.grid_half_width + 2.0 * cfg.grid_half_width * k as f64 / (n - 1) as f64)
        .collect()
}

/// `sup phi'` on the grid, never below its limit 1 for the homogeneous family.
fn phase_sup(sf: &StructureFunction, xs: &[f64]) -> Result<f64> {
    let mut sup = match sf.family {
        Family::Homogeneous { .. } => 1.0,
        _ => 0.0,
    };
    for &x in xs {
        sup = f64::max(sup, phase_derivative(sf, x)?);
    }
    Ok(sup)
}

fn random_separated(rng: &mut ChaCha8Rng, n: usize, sep: f64) -> Vec<f64> {
    let tight = rng.random_bool(0.5);
    let mut x = rng.random_range(-20.0..0.0);
    (0..n)
        .map(|_| {
            let cur = x;
            x += if tight { sep } else { sep * (1.0 + rng.random_range(0.0..1.0)) };
            cur
        })
        .collect()
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// The Hilbert-type bounds on randomized separated sets: reports the largest
/// ratios `S / (pi^2/(3 s^2) sum |a|^2)` and `-S / (pi^2/(6 s^2) sum |a|^2)`.
pub fn hilbert_report(instances: usize, seed: u64) -> DiagnosticReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut upper, mut lower) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..instances {
        let n = rng.random_range(1..=50);
        let sigma = rng.random_range(0.5..5.0);
        let lambdas = random_separated(&mut rng, n, sigma);
        let a = random_coeffs(&mut rng, n);
        let mass: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        let s = hilbert_sum(&lambdas, &a);
        upper = upper.max(s / (PI * PI / (3.0 * sigma * sigma) * mass));
        lower = lower.max(-s / (PI * PI / (6.0 * sigma * sigma) * mass));
    }
    DiagnosticReport::check("hilbert_inequality", vec![upper, lower], vec![1.0], Relation::Le, 0.0)
        .with_context("instances", instances)
        .with_context("seed", seed)
}

/// `sum |F(lambda)/E(lambda)|^2 <= C ||F||_E^2` over `cfg.pp_instances`
/// random (corpus member, `eps`-separated set) pairs in `H(E)`, with `tau`
/// the sampled `sup phi'`.
pub fn polya_plancherel_report(sf: &StructureFunction, cfg: &SuiteConfig) -> Result<DiagnosticReport> {
    let tau = phase_sup(sf, &grid(cfg))?;
    let space = SpaceSpec::new(sf.clone(), 1)?;
    let h = lowest_zero_depth(sf)?;
    let corpus: Vec<CorpusFunction> = standard_corpus(&space, cfg.pp_instances, cfg.seed ^ 0x5050)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7070);
    let mut worst = 0.0f64;
    for f in &corpus {
        let n = rng.random_range(5..=50);
        let eps = rng.random_range(0.5..3.0);
        let lambdas = random_separated(&mut rng, n, eps);
        let mut lhs = 0.0;
        for &l in &lambdas {
            let e = eval_structure(sf, Complex64::new(l, 0.0), 0)?.e[0];
            lhs += (f.eval(Complex64::new(l, 0.0))? / e).norm_sqr();
        }
        let norm = norm_and_inner(&space, f, None, NormMode::Continuous, cfg.tol)?.value.re;
        let bound = polya_plancherel_constant(tau, 2.0, eps, h) * norm;
        worst = worst.max(lhs / bound);
    }
    let mut r = DiagnosticReport::check("polya_plancherel", vec![worst], vec![1.0], Relation::Le, 0.0)
        .with_context("instances", cfg.pp_instances)
        .with_context("tau", tau)
        .with_tolerance("quadrature", cfg.tol);
    if let Some(h) = h {
        r = r.with_context("zero_depth", h);
    }
    Ok(r)
}

/// `||A||_E` and `||B||_E` must both diverge.
fn components_not_in_space(sf: &StructureFunction, tol: f64) -> Result<DiagnosticReport> {
    let space = SpaceSpec::new(sf.clone(), 1)?;
    let mut diverged = Vec::with_capacity(2);
    for (name, pick) in [("A", 0usize), ("B", 1usize)] {
        let sf = sf.clone();
        let f = FnEntire::new(name, move |z| {
            let v = eval_structure(&sf, z, 0)?;
            Ok(if pick == 0 { v.a[0] } else { v.b[0] })
        });
        diverged.push(match norm_and_inner(&space, &f, None, NormMode::Continuous, tol) {
            Err(Error::Divergence { .. }) => 1.0,
            Ok(_) | Err(Error::Quadrature { .. }) => 0.0,
            Err(e) => return Err(e),
        });
    }
    Ok(DiagnosticReport::check("components_not_in_space", diverged, vec![1.0], Relation::Ge, 0.0).with_tolerance("quadrature", tol))
}

/// Estimates `D`, then checks the phase bound, node separation, the
/// `|B/(E(x - t))|` bound, the Hilbert-type and Polya-Plancherel
/// inequalities, and the divergence of `||A||_E`, `||B||_E`.
pub fn inequality_suite(space: &SpaceSpec, cfg: &SuiteConfig) -> Result<Vec<DiagnosticReport>> {
    if !(cfg.tol > 0.0) || cfg.window == 0 {
        return Err(Error::Domain("tolerance must be positive and the window at least 1".into()));
    }
    let sf = &space.sf;
    let (d, _) = estimate_d(space, cfg.corpus_size, cfg.seed, cfg.tol)?;
    let bound = d * (space.nu as f64).sqrt();
    let xs = grid(cfg);
    let tau = phase_sup(sf, &xs)?;
    let nodes = node_window(sf, 1, 0.0, cfg.window)?;
    let d_ctx = |r: DiagnosticReport| {
        r.with_context("d_estimate", d)
            .with_context("nu", space.nu)
            .with_context("corpus", cfg.corpus_size)
            .with_context("seed", cfg.seed)
    };

    let phase = d_ctx(DiagnosticReport::check("phase_upper_bound", vec![tau], vec![bound], Relation::Le, 0.0))
        .with_context("grid_half_width", cfg.grid_half_width);

    let min_gap = nodes.min_gap().unwrap_or(f64::INFINITY);
    let separation = d_ctx(DiagnosticReport::check(
        "node_separation",
        vec![if min_gap.is_finite() { min_gap } else { f64::MAX }],
        vec![PI / bound],
        Relation::Ge,
        0.0,
    ))
    .with_context("nodes", nodes.len());

    let mut bt = 0.0f64;
    for &x in &xs {
        let v = eval_structure(sf, Complex64::new(x, 0.0), 0)?;
        let q = v.b[0].norm() / v.e[0].norm();
        for &t in &nodes.nodes {
            if (x - t).abs() > 1e-8 {
                bt = bt.max(q / (x - t).abs());
            }
        }
    }
    let bt = d_ctx(DiagnosticReport::check("bt_bound", vec![bt], vec![bound], Relation::Le, 0.0));

    let consistent = [&phase, &separation, &bt].iter().all(|r| r.pass);
    let mut consistency = d_ctx(DiagnosticReport::check("d_consistency", vec![d], vec![0.0], Relation::Gt, 0.0));
    if !consistent {
        consistency = consistency.fail_because("the estimated D violates at least one of its consequences");
    }

    Ok(vec![
        phase,
        separation,
        bt,
        consistency,
        hilbert_report(cfg.hilbert_instances, cfg.seed),
        polya_plancherel_report(sf, cfg)?,
        components_not_in_space(sf, cfg.tol)?,
    ])
}
