use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{default_probe_nodes, frame_report, inequality_suite, minimality_report, thm3_sweep, FrameOptions, SuiteConfig};
use crate::corpus::{g_combination_corpus, standard_corpus, CorpusFunction, LiftedByB, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::interpolation::{sample, BasisFunction, BasisKind};
use crate::kernels::{inner_products, kernel_eval, node_kernel_diag, norm_and_inner, KernelFunction, NormMode, SpaceSpec};
use crate::report::{DiagnosticReport, Relation};
use crate::structure::{hb_validate, node_window, upper_half_plane_grid, ZeroSet};

/// Settings for [`verify_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: f64,
    /// Corpus size for the norm, reproducing and sandwich checks.
    pub corpus_size: usize,
    /// Nodes on each side of the origin for the kernel, delta and minimality checks.
    pub window: usize,
    pub frame_corpus: usize,
    pub frame_window: usize,
    pub probe_nodes: usize,
    pub suite: SuiteConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            tol: 1e-10,
            corpus_size: 10,
            window: 10,
            frame_corpus: 20,
            frame_window: 50,
            probe_nodes: 8,
            suite: SuiteConfig::default(),
        }
    }
}

/// `K_nu(t, t)` from the node formula against the confluent kernel, relative.
pub fn kernel_diagonal_report(space: &SpaceSpec, nodes: &ZeroSet) -> Result<DiagnosticReport> {
    let mut worst = 0.0f64;
    for &t in &nodes.nodes {
        let exact = node_kernel_diag(space, t)?;
        let k = kernel_eval(space, Complex64::new(t, 0.0), Complex64::new(t, 0.0))?;
        worst = worst.max((k - exact).norm() / exact);
    }
    Ok(DiagnosticReport::check("kernel_node_diagonal", vec![worst], vec![1e-10], Relation::Le, 0.0)
        .with_context("nu", space.nu)
        .with_context("nodes", nodes.len()))
}

/// `|<F, K(w, .)> - F(w)|` relative to `||F|| sqrt(K(w, w))`.
pub fn reproducing_report(space: &SpaceSpec, corpus: &[CorpusFunction], points: &[Complex64], tol: f64) -> Result<DiagnosticReport> {
    let kernels: Vec<KernelFunction> = points.iter().map(|&w| KernelFunction { space: space.clone(), w }).collect();
    let gs: Vec<&dyn EntireFunction> = kernels.iter().map(|k| k as &dyn EntireFunction).collect();
    let mut worst = 0.0f64;
    for f in corpus {
        let norm = norm_and_inner(space, f, None, NormMode::Continuous, tol)?.value.re.sqrt();
        let ips = inner_products(space, f, &gs, NormMode::Continuous, tol)?;
        for (ip, &w) in ips.iter().zip(points) {
            let scale = norm * kernel_eval(space, w, w)?.re.sqrt();
            worst = worst.max((ip.value - f.eval(w)?).norm() / scale);
        }
    }
    Ok(DiagnosticReport::check("reproducing_property", vec![worst], vec![1e-8], Relation::Le, 0.0)
        .with_tolerance("quadrature", tol)
        .with_context("nu", space.nu)
        .with_context("corpus", corpus.len())
        .with_context("points", points.len()))
}

/// Continuous and discrete norms on the corpus, relative difference.
pub fn norm_identity_report(space: &SpaceSpec, corpus: &[CorpusFunction], tol: f64) -> Result<DiagnosticReport> {
    let mut worst = 0.0f64;
    for f in corpus {
        let c = norm_and_inner(space, f, None, NormMode::Continuous, tol)?.value.re;
        let d = norm_and_inner(space, f, None, NormMode::Discrete, tol)?.value.re;
        worst = worst.max((c - d).abs() / c);
    }
    Ok(DiagnosticReport::check("norm_identity", vec![worst], vec![1e-6], Relation::Le, 0.0)
        .with_tolerance("quadrature", tol)
        .with_context("nu", space.nu)
        .with_context("corpus", corpus.len()))
}

/// `|<B_{nu,1}(., s), B_{nu,1}(., t)>| / (||.|| ||.||)` over all pairs of `nodes`.
pub fn orthogonality_report(space: &SpaceSpec, nodes: &[f64], tol: f64) -> Result<DiagnosticReport> {
    let fs: Vec<BasisFunction> = nodes.iter().map(|&t| BasisFunction::new(space, t, BasisKind::B, 1)).collect::<Result<_>>()?;
    let gs: Vec<&dyn EntireFunction> = fs.iter().map(|f| f as &dyn EntireFunction).collect();
    let gram: Vec<Vec<Complex64>> = fs
        .iter()
        .map(|f| Ok(inner_products(space, f, &gs, NormMode::Continuous, tol)?.into_iter().map(|r| r.value).collect()))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            worst = worst.max(gram[i][j].norm() / (gram[i][i].re * gram[j][j].re).sqrt());
        }
    }
    let pairs = fs.len() * fs.len().saturating_sub(1) / 2;
    Ok(DiagnosticReport::check("orthogonality", vec![worst], vec![1e-6], Relation::Le, 0.0)
        .with_tolerance("quadrature", tol)
        .with_context("nu", space.nu)
        .with_context("pairs", pairs))
}

/// `nu^{-1/2} ||F||_E <= ||B^{nu-1} F||_{E^nu} <= ||F||_E` on a corpus of `H(E)`.
pub fn sandwich_reports(space: &SpaceSpec, corpus_size: usize, seed: u64, tol: f64) -> Result<[DiagnosticReport; 2]> {
    let base = SpaceSpec::new(space.sf.clone(), 1)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for f in standard_corpus(&base, corpus_size, seed)? {
        let n1 = norm_and_inner(&base, &f, None, NormMode::Continuous, tol)?.value.re;
        let lifted = LiftedByB { space: space.clone(), f };
        let n2 = norm_and_inner(space, &lifted, None, NormMode::Continuous, tol)?.value.re;
        let r = (n2 / n1).sqrt();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let ctx = |r: DiagnosticReport| {
        r.with_tolerance("quadrature", tol)
            .with_context("nu", space.nu)
            .with_context("corpus", corpus_size)
            .with_context("seed", seed)
    };
    Ok([
        ctx(DiagnosticReport::check("sandwich_upper", vec![hi], vec![1.0], Relation::Le, 1e-6)),
        ctx(DiagnosticReport::check("sandwich_lower", vec![lo], vec![1.0 / (space.nu as f64).sqrt()], Relation::Ge, 1e-6)),
    ])
}

/// `max |G^(l)_{nu,j}(s, t) - delta_st delta_lj|` over the window.
pub fn delta_report(space: &SpaceSpec, nodes: &ZeroSet) -> Result<DiagnosticReport> {
    let mut worst = 0.0f64;
    for (i, &t) in nodes.nodes.iter().enumerate() {
        for j in 0..space.nu as usize {
            let g = BasisFunction::new(space, t, BasisKind::G, j)?;
            let s = sample(space, &g, nodes)?;
            for (k, vals) in s.values.iter().enumerate() {
                for (l, v) in vals.iter().enumerate() {
                    let expect = if k == i && l == j { 1.0 } else { 0.0 };
                    worst = worst.max((v - expect).norm());
                }
            }
        }
    }
    Ok(DiagnosticReport::check("delta_property", vec![worst], vec![1e-8], Relation::Le, 0.0)
        .with_context("nu", space.nu)
        .with_context("nodes", nodes.len()))
}

fn random_points(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Every identity, inequality and probe report for one space. Independent
/// groups run on separate threads; the order of the result is fixed.
pub fn verify_suite(space: &SpaceSpec, cfg: &VerifyConfig) -> Result<Vec<DiagnosticReport>> {
    if !(cfg.tol > 0.0) || cfg.window == 0 || cfg.frame_window == 0 {
        return Err(Error::Domain("tolerance must be positive and windows at least 1".into()));
    }
    let nodes = node_window(&space.sf, 1, 0.0, cfg.window)?;
    let corpus = standard_corpus(space, cfg.corpus_size, cfg.seed)?;
    let tol = cfg.tol;

    type Group<'a> = Box<dyn FnOnce() -> Result<Vec<DiagnosticReport>> + Send + 'a>;
    let groups: Vec<Group> = vec![
        Box::new(|| {
            let x_max = nodes.nodes.iter().fold(1.0f64, |m, t| m.max(t.abs()));
            let hb = hb_validate(&space.sf, &upper_half_plane_grid(x_max, 0.05, 5.0, 81, 8))?;
            Ok(vec![hb, kernel_diagonal_report(space, &nodes)?, delta_report(space, &nodes)?])
        }),
        Box::new(|| {
            let points = random_points(3, cfg.seed ^ 0x3);
            Ok(vec![reproducing_report(space, &corpus, &points, tol)?, norm_identity_report(space, &corpus, tol)?])
        }),
        Box::new(|| {
            let c = nodes.center_index().unwrap_or(0);
            let lo = c.saturating_sub(2);
            let hi = (c + 3).min(nodes.len());
            let mut out = vec![orthogonality_report(space, &nodes.nodes[lo..hi], tol)?];
            out.extend(sandwich_reports(space, cfg.corpus_size, cfg.seed, tol)?);
            Ok(out)
        }),
        Box::new(|| inequality_suite(space, &cfg.suite)),
        Box::new(|| {
            let c = nodes.center_index().unwrap_or(0);
            let mut out: Vec<DiagnosticReport> = (0..space.nu as usize).map(|j| minimality_report(space, &nodes, c, j)).collect::<Result<_>>()?;
            let fc = g_combination_corpus(space, cfg.frame_corpus, 3, cfg.window, cfg.seed)?;
            let refs: Vec<&dyn EntireFunction> = fc.iter().map(|f| f as &dyn EntireFunction).collect();
            let window = node_window(&space.sf, 1, 0.0, cfg.frame_window)?;
            let opts = FrameOptions { tol: tol.max(1e-10), ..Default::default() };
            out.push(frame_report(space, &refs, &window, opts)?.report.with_context("seed", cfg.seed));
            if space.nu >= 2 {
                let probe = default_probe_nodes(space, cfg.probe_nodes)?;
                out.push(thm3_sweep(space, &probe, 1e-8_f64.max(tol))?);
            }
            Ok(out)
        }),
    ];
    let results: Vec<Result<Vec<DiagnosticReport>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = groups.into_iter().map(|g| scope.spawn(g)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Range("a report thread panicked".into()))))
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::StructureFunction;

    #[test]
    fn identities_hold_on_paley_wiener() {
        let s = SpaceSpec::new(StructureFunction::paley_wiener(1.0).unwrap(), 2).unwrap();
        let nodes = node_window(&s.sf, 1, 0.0, 4).unwrap();
        let corpus = standard_corpus(&s, 4, 3).unwrap();
        let reports = [
            kernel_diagonal_report(&s, &nodes).unwrap(),
            delta_report(&s, &nodes).unwrap(),
            reproducing_report(&s, &corpus, &random_points(2, 1), 1e-10).unwrap(),
            norm_identity_report(&s, &corpus, 1e-10).unwrap(),
            orthogonality_report(&s, &nodes.nodes[2..6], 1e-10).unwrap(),
        ];
        for r in reports.iter().chain(sandwich_reports(&s, 4, 3, 1e-10).unwrap().iter()) {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn orthogonality_detects_a_repeated_node() {
        let s = SpaceSpec::new(StructureFunction::paley_wiener(1.0).unwrap(), 2).unwrap();
        let r = orthogonality_report(&s, &[0.0, 0.0], 1e-10).unwrap();
        assert!(!r.pass && (r.measured[0] - 1.0).abs() < 1e-8);
    }
}
