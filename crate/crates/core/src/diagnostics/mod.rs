//! Frame ratios, minimality, the phase-derivative probe, and the inequality suite.

mod identities;
mod inequalities;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::interpolation::{b_power, basis_coeffs, reconstruct_with, sample, BasisEntry, BasisFunction, BasisKind};
use crate::kernels::{discrete_sums_scaled, kernel_diag, node_kernel_diag, norm_and_inner, NormMode, SpaceSpec};
use crate::report::{DiagnosticReport, Relation};
use crate::structure::{hb_validate, phase_derivative, upper_half_plane_grid, Family, ZeroSet};

pub use identities::{
    delta_report, kernel_diagonal_report, norm_identity_report, orthogonality_report, reproducing_report, sandwich_reports, verify_suite,
    VerifyConfig,
};
pub use inequalities::{
    estimate_d, hilbert_report, hilbert_sum, inequality_suite, lowest_zero_depth, polya_plancherel_constant, polya_plancherel_report,
    SuiteConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOptions {
    pub tol: f64,
    /// Required lower bound for `phi'` at the window nodes.
    pub delta: f64,
    /// Largest accepted `max / min` of each ratio over the corpus.
    pub max_spread: f64,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            tol: 1e-10,
            delta: 0.1,
            max_spread: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub id: String,
    pub r_d: f64,
    pub r_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub report: DiagnosticReport,
    pub rows: Vec<FrameRow>,
}

/// Checks `phi'(t) >= delta` on the window and `|E*| < |E|` with finite
/// `sup |E'/E|` on a strip above it. Returns the failure reason, if any.
pub fn frame_preconditions(space: &SpaceSpec, nodes: &ZeroSet, delta: f64) -> Result<Option<String>> {
    for &t in &nodes.nodes {
        let d = phase_derivative(&space.sf, t)?;
        if d < delta {
            return Ok(Some(format!("phi'({t}) = {d:.3e} is below delta = {delta}")));
        }
    }
    let x_max = nodes.nodes.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    let hb = hb_validate(&space.sf, &upper_half_plane_grid(x_max, 0.05, 5.0, 81, 8))?;
    let sup = hb.context["sup_log_derivative"].as_f64().unwrap_or(f64::INFINITY);
    if !hb.pass || !sup.is_finite() {
        return Ok(Some("structure function fails the Hermite-Biehler check".into()));
    }
    Ok(None)
}

/// `<F, G_{nu,j}(., t)>` for every entry and `j` (entry-major), plus `||F||^2` last.
/// Each inner product is resolved to `tol` relative to `||F|| ||G_{nu,j}(., t)||`,
/// its Cauchy-Schwarz scale, rather than to its own (possibly tiny) size.
pub fn g_coefficients(space: &SpaceSpec, f: &dyn EntireFunction, entries: &[BasisEntry], tol: f64) -> Result<Vec<Complex64>> {
    let nu = space.nu as usize;
    let m = entries.len() * nu;
    // layout: inner products, then |G|^2 terms, then |F|^2
    let dim = 2 * m + 1;
    // the discrete form of the inner product: one evaluation per node of B_nu
    let res = discrete_sums_scaled(
        space,
        dim,
        tol,
        |x, out| {
            let z = Complex64::new(x, 0.0);
            let w = 1.0 / kernel_diag(space, x)?;
            let fv = f.eval(z)?;
            let fx = fv * w;
            let bp = b_power(space, z)?;
            for (k, e) in entries.iter().enumerate() {
                for (j, g) in e.g_values(z, bp).into_iter().enumerate() {
                    out[k * nu + j] = fx * g.conj();
                    out[m + k * nu + j] = Complex64::new(g.norm_sqr() * w, 0.0);
                }
            }
            out[dim - 1] = Complex64::new(fv.norm_sqr() * w, 0.0);
            Ok(())
        },
        |l1| {
            let f2 = l1[dim - 1];
            (0..dim)
                .map(|d| match d {
                    d if d < m => l1[d].max((f2 * l1[m + d]).sqrt()),
                    // the |G|^2 sums only set the scale
                    d if d < 2 * m => f64::INFINITY,
                    _ => l1[d],
                })
                .collect()
        },
    )?;
    let mut out: Vec<Complex64> = res[..m].iter().map(|r| r.value).collect();
    out.push(res[dim - 1].value);
    Ok(out)
}

/// `r_D = sum_t sum_j |F^(j)(t)|^2 / K_nu(t, t) / ||F||^2` and
/// `r_G = sum_t sum_j K_nu(t, t) |<F, G_{nu,j}(., t)>|^2 / ||F||^2` per corpus member.
pub fn frame_report(space: &SpaceSpec, corpus: &[&dyn EntireFunction], nodes: &ZeroSet, opts: FrameOptions) -> Result<FrameReport> {
    if corpus.is_empty() {
        return Err(Error::Domain("empty corpus".into()));
    }
    let precondition = frame_preconditions(space, nodes, opts.delta)?;
    let entries: Vec<BasisEntry> = nodes.nodes.iter().map(|&t| basis_coeffs(space, t)).collect::<Result<_>>()?;
    let kernels: Vec<f64> = nodes.nodes.iter().map(|&t| node_kernel_diag(space, t)).collect::<Result<_>>()?;
    let nu = space.nu as usize;
    let mut rows = Vec::with_capacity(corpus.len());
    for f in corpus {
        let coeffs = g_coefficients(space, *f, &entries, opts.tol)?;
        let norm = coeffs[coeffs.len() - 1].re;
        let r_d = sample(space, *f, nodes)?.weighted_square_sum()? / norm;
        let r_g = kernels
            .iter()
            .enumerate()
            .map(|(k, kt)| kt * coeffs[k * nu..(k + 1) * nu].iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / norm;
        rows.push(FrameRow { id: f.name(), r_d, r_g });
    }
    let stats = |v: Vec<f64>| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    };
    let (d_lo, d_hi) = stats(rows.iter().map(|r| r.r_d).collect());
    let (g_lo, g_hi) = stats(rows.iter().map(|r| r.r_g).collect());
    let mut report = DiagnosticReport::check(
        "frame_ratio_spread",
        vec![d_hi / d_lo, g_hi / g_lo],
        vec![opts.max_spread],
        Relation::Le,
        0.0,
    )
    .with_tolerance("quadrature", opts.tol)
    .with_tolerance("delta", opts.delta)
    .with_context("nu", space.nu)
    .with_context("nodes", nodes.len())
    .with_context("window", vec![nodes.range.0, nodes.range.1])
    .with_context("corpus", corpus.len())
    .with_context("r_d_min", d_lo)
    .with_context("r_d_max", d_hi)
    .with_context("r_g_min", g_lo)
    .with_context("r_g_max", g_hi);
    if !(d_lo > 0.0 && g_lo > 0.0) {
        report = report.fail_because("a frame ratio vanished");
    }
    if let Some(reason) = precondition {
        report = report.fail_because(format!("preconditions unmet: {reason}"));
    }
    Ok(FrameReport { report, rows })
}

/// Reconstructs `G_{nu,j}(., t_i)` from its own samples with its `(i, j)`
/// term removed; the sup discrepancy on `[t - 1, t + 1]` must reach 0.5.
pub fn minimality_report(space: &SpaceSpec, nodes: &ZeroSet, i: usize, j: usize) -> Result<DiagnosticReport> {
    let t = *nodes
        .nodes
        .get(i)
        .ok_or_else(|| Error::Domain(format!("node index {i} out of range")))?;
    let g = BasisFunction::new(space, t, BasisKind::G, j)?;
    let samples = sample(space, &g, nodes)?;
    let grid: Vec<Complex64> = (0..=200).map(|k| Complex64::new(t - 1.0 + 0.01 * k as f64, 0.0)).collect();
    let r = reconstruct_with(space, &samples, &grid, Some((i, j)))?;
    let mut worst = 0.0f64;
    for (z, v) in grid.iter().zip(&r.values) {
        worst = worst.max((v - g.eval(*z)?).norm());
    }
    Ok(DiagnosticReport::check("minimality", vec![worst], vec![0.5], Relation::Ge, 0.0)
        .with_context("t", t)
        .with_context("j", j)
        .with_context("nu", space.nu)
        .with_context("nodes", nodes.len()))
}

/// `rho(t) = sum_j |F^(j)(t)|^2 / K_nu(t, t) / ||F||^2` for `F = B_{nu,1}(., t)`.
/// Only `F^(nu-1)(t) = (nu-1)! B'(t)^nu` is non-zero.
pub fn thm3_rho(space: &SpaceSpec, t: f64, tol: f64) -> Result<f64> {
    if space.nu < 2 {
        return Err(Error::Domain("the probe needs nu >= 2".into()));
    }
    let f = BasisFunction::new(space, t, BasisKind::B, 1)?;
    let norm = norm_and_inner(space, &f, None, NormMode::Continuous, tol)?.value.re;
    let fact = crate::numerics::factorial(space.nu as usize - 1);
    let top = fact * f.entry.b_prime.powi(space.nu as i32);
    Ok(top * top / node_kernel_diag(space, t)? / norm)
}

/// `rho(t)` alongside `phi'(t)^{2 nu - 2}` at one node.
pub fn thm3_probe(space: &SpaceSpec, t: f64, tol: f64) -> Result<DiagnosticReport> {
    thm3_sweep(space, &[t], tol)
}

/// `rho` at each node in order. On the product family, wherever `phi'`
/// decreases from one node to the next, `rho` must decrease as well.
pub fn thm3_sweep(space: &SpaceSpec, nodes: &[f64], tol: f64) -> Result<DiagnosticReport> {
    if nodes.is_empty() {
        return Err(Error::Domain("no nodes to probe".into()));
    }
    let mut rho = Vec::with_capacity(nodes.len());
    let mut dphi = Vec::with_capacity(nodes.len());
    for &t in nodes {
        rho.push(thm3_rho(space, t, tol)?);
        dphi.push(phase_derivative(&space.sf, t)?);
    }
    let pow: Vec<f64> = dphi.iter().map(|d| d.powi(2 * space.nu as i32 - 2)).collect();
    let mut report = DiagnosticReport::check("thm3_probe", rho.clone(), vec![0.0], Relation::Gt, 0.0)
        .with_tolerance("quadrature", tol)
        .with_context("nu", space.nu)
        .with_context("phase_derivative", dphi.clone())
        .with_context("phase_deriv_pow", pow)
        .with_abscissa(nodes.to_vec());
    if matches!(space.sf.family, Family::ProductZeros { .. }) {
        for k in 1..nodes.len() {
            if dphi[k] < dphi[k - 1] && rho[k] >= rho[k - 1] {
                report = report.fail_because(format!("rho does not decrease from t = {} to t = {}", nodes[k - 1], nodes[k]));
                break;
            }
        }
    }
    Ok(report)
}

/// The node of `B` nearest each given abscissa.
pub fn nearest_nodes(space: &SpaceSpec, targets: &[f64]) -> Result<Vec<f64>> {
    targets
        .iter()
        .map(|&x| {
            let d = phase_derivative(&space.sf, x)?;
            let r = (2.0 * std::f64::consts::PI / d).max(1.0);
            let set = crate::structure::node_set(&space.sf, 0.0, (x - r, x + r))?;
            set.nodes
                .iter()
                .copied()
                .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
                .ok_or_else(|| Error::Range(format!("no node of B near {x}")))
        })
        .collect()
}

/// Default probe nodes: nodes nearest the zeros' real parts for the product
/// family, otherwise the first `count` non-negative nodes.
pub fn default_probe_nodes(space: &SpaceSpec, count: usize) -> Result<Vec<f64>> {
    match &space.sf.family {
        Family::ProductZeros { zeros, .. } if !zeros.is_empty() => {
            let xs: Vec<f64> = zeros.iter().map(|z| z.0).take(count).collect();
            nearest_nodes(space, &xs)
        }
        _ => {
            let set = crate::structure::node_window(&space.sf, 1, 0.0, count)?;
            Ok(set.nodes.into_iter().filter(|t| *t >= 0.0).take(count).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{g_combination_corpus, CorpusFunction};
    use crate::function::{sinc, FnEntire};
    use crate::structure::{node_window, StructureFunction};

    fn pw(nu: u32) -> SpaceSpec {
        SpaceSpec::new(StructureFunction::paley_wiener(1.0).unwrap(), nu).unwrap()
    }

    fn refs(c: &[CorpusFunction]) -> Vec<&dyn EntireFunction> {
        c.iter().map(|f| f as &dyn EntireFunction).collect()
    }

    #[test]
    fn sinc_frame_ratio_is_one() {
        let s = pw(1);
        let f = FnEntire::new("sinc", |z| Ok(sinc(z)));
        let nodes = node_window(&s.sf, 1, 0.0, 10).unwrap();
        let r = frame_report(&s, &[&f], &nodes, FrameOptions::default()).unwrap();
        assert!((r.rows[0].r_d - 1.0).abs() < 1e-8, "{:?}", r.rows);
        assert!((r.rows[0].r_g - 1.0).abs() < 1e-8, "{:?}", r.rows);
        assert!(r.report.pass);
    }

    #[test]
    fn g_combination_ratios_are_bounded() {
        let s = pw(2);
        let corpus = g_combination_corpus(&s, 20, 3, 10, 1).unwrap();
        let nodes = node_window(&s.sf, 1, 0.0, 50).unwrap();
        let r = frame_report(&s, &refs(&corpus), &nodes, FrameOptions::default()).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
        assert_eq!(r.rows.len(), 20);
    }

    #[test]
    fn minimality_at_the_centre() {
        let s = pw(2);
        let nodes = node_window(&s.sf, 1, 0.0, 10).unwrap();
        let c = nodes.center_index().unwrap();
        let r = minimality_report(&s, &nodes, c, 0).unwrap();
        assert!(r.pass && (r.measured[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn probe_on_paley_wiener_is_translation_invariant() {
        let s = pw(2);
        let nodes = default_probe_nodes(&s, 4).unwrap();
        let r = thm3_sweep(&s, &nodes, 1e-10).unwrap();
        assert!(r.pass);
        let rho0 = r.measured[0];
        assert!(r.measured.iter().all(|v| (v / rho0 - 1.0).abs() < 1e-6), "{:?}", r.measured);
        let pow = r.context["phase_deriv_pow"].as_array().unwrap();
        assert!((pow[0].as_f64().unwrap() - 1.0).abs() < 1e-14);
        // sin^2 z / z = z - z^3/3 + ...: the only sample is F'(0) = 1
        let f = BasisFunction::new(&s, 0.0, BasisKind::B, 1).unwrap();
        let d = f.derivatives(Complex64::default(), 1).unwrap();
        assert!(d[0].norm() < 1e-14 && (d[1] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn low_phase_derivative_flags_preconditions() {
        let zeros = (1..=8).map(|n| (2f64.powi(n), 2f64.powi(n) / (n * n) as f64)).collect();
        let s = SpaceSpec::new(StructureFunction::product(0.0, zeros).unwrap(), 1).unwrap();
        let nodes = node_window(&s.sf, 1, 0.0, 4).unwrap();
        let reason = frame_preconditions(&s, &nodes, 10.0).unwrap();
        assert!(reason.is_some());
        assert!(frame_preconditions(&s, &nodes, 1e-6).unwrap().is_none());
    }
}
