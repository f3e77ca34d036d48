use num_complex::Complex64;

use super::{eval_structure, Family, StructureFunction};
use crate::error::{Error, Result};
use crate::report::{DiagnosticReport, Relation};

/// `|E*(z)| < |E(z)|` at every sample (all in the open upper half-plane);
/// also records `sup |E'/E|` over the samples and, for the product family,
/// the closed bound `a + sum (1/y_n + |x_n|/|w_n|^2)` it must respect.
pub fn hb_validate(sf: &StructureFunction, samples: &[Complex64]) -> Result<DiagnosticReport> {
    if samples.is_empty() {
        return Err(Error::Domain("no sample points".into()));
    }
    let mut max_ratio = 0.0f64;
    let mut sup_log_derivative = 0.0f64;
    for &z in samples {
        if !(z.im > 0.0) {
            return Err(Error::Domain(format!("sample {z} is not in the upper half-plane")));
        }
        let v = eval_structure(sf, z, 1)?;
        max_ratio = max_ratio.max(v.e_star[0].norm() / v.e[0].norm());
        sup_log_derivative = sup_log_derivative.max((v.e[1] / v.e[0]).norm());
    }
    let mut report = DiagnosticReport::check("hermite_biehler", vec![max_ratio], vec![1.0], Relation::Lt, 0.0)
        .with_context("sup_log_derivative", sup_log_derivative)
        .with_context("samples", samples.len());
    if let (Family::ProductZeros { a, .. }, Some(margin)) = (&sf.family, sf.convergence_margin()) {
        let bound = a + margin;
        report = report.with_context("log_derivative_bound", bound);
        if sup_log_derivative > bound {
            report = report.fail_because("sup |E'/E| exceeds the closed bound");
        }
    }
    Ok(report)
}

/// `nx * ny` points `x + iy`, `|x| <= x_max`, `y_min <= y <= y_max`.
pub fn upper_half_plane_grid(x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Vec<Complex64> {
    let step = |lo: f64, hi: f64, n: usize, k: usize| if n <= 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
    (0..nx)
        .flat_map(|i| (0..ny).map(move |j| Complex64::new(step(-x_max, x_max, nx, i), step(y_min, y_max, ny, j))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paley_wiener_ratio_is_exponential() {
        let sf = StructureFunction::paley_wiener(1.0).unwrap();
        let grid = upper_half_plane_grid(5.0, 0.1, 5.0, 21, 12);
        let r = hb_validate(&sf, &grid).unwrap();
        assert!(r.pass);
        assert!((r.measured[0] - (-0.2f64).exp()).abs() < 1e-14);
        assert!((r.context["sup_log_derivative"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_family_respects_closed_bound() {
        let zeros = (1..=8).map(|n| (2f64.powi(n), 2f64.powi(n) / (n * n) as f64)).collect();
        let sf = StructureFunction::product(0.0, zeros).unwrap();
        let grid = upper_half_plane_grid(300.0, 0.01, 5.0, 121, 12);
        let r = hb_validate(&sf, &grid).unwrap();
        assert!(r.pass, "{r:?}");
        let sup = r.context["sup_log_derivative"].as_f64().unwrap();
        assert!(sup <= r.context["log_derivative_bound"].as_f64().unwrap());
    }

    #[test]
    fn homogeneous_passes() {
        let sf = StructureFunction::homogeneous(0.5).unwrap();
        let grid = upper_half_plane_grid(5.0, 0.1, 5.0, 21, 12);
        assert!(hb_validate(&sf, &grid).unwrap().pass);
    }

    #[test]
    fn rejects_points_off_the_half_plane() {
        let sf = StructureFunction::paley_wiener(1.0).unwrap();
        assert!(hb_validate(&sf, &[Complex64::new(1.0, 0.0)]).is_err());
    }
}
