//! Reproducing kernels of `H(E^nu)`, weighted norms and inner products, and
//! the discrete norm identity over the zeros of `B_nu`.

mod norms;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{factorial, LineQuadrature, PowerSeries};
use crate::structure::{eval_structure, Family, StructureFunction, ZeroSet};

pub(crate) use norms::discrete_sums_scaled;
pub use norms::{inner_products, norm_and_inner, NormMode};

/// Below this distance between `z` and `conj(w)` the kernel uses its confluent form.
pub const CONFLUENT_RADIUS: f64 = 1e-6;
/// Relative size of `B(t)` accepted at a node.
pub const NODE_TOL: f64 = 1e-10;

/// The space `H(E^nu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub sf: StructureFunction,
    pub nu: u32,
}

impl SpaceSpec {
    pub fn new(sf: StructureFunction, nu: u32) -> Result<Self> {
        if nu == 0 {
            return Err(Error::Domain("nu must be at least 1".into()));
        }
        Ok(SpaceSpec { sf, nu })
    }

    /// Derivatives of `E^nu` and `(E^nu)*` at `z` up to `order`.
    pub fn working_values(&self, z: Complex64, order: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let v = eval_structure(&self.sf, z, order)?;
        if self.nu == 1 {
            return Ok((v.e, v.e_star));
        }
        Ok((power_derivatives(&v.e, self.nu, z), power_derivatives(&v.e_star, self.nu, z)))
    }

    /// `|E(x)|^{-2 nu}`.
    pub fn weight(&self, x: f64) -> Result<f64> {
        let e = eval_structure(&self.sf, Complex64::new(x, 0.0), 0)?.e[0];
        let w = e.norm().powi(-2 * self.nu as i32);
        if !w.is_finite() {
            return Err(Error::Range(format!("weight |E|^-2nu overflows at x = {x}")));
        }
        Ok(w)
    }

    /// Line quadrature adapted to the space: windows aligned with the
    /// oscillation period and started beyond the product zeros.
    pub fn quadrature(&self, tol: f64) -> LineQuadrature {
        let start = match &self.sf.family {
            Family::ProductZeros { zeros, .. } => zeros.iter().map(|&(x, y)| 2.0 * (x.abs() + y)).fold(16.0, f64::max),
            _ => 16.0,
        };
        let q = LineQuadrature::default().with_tol(tol).with_start(start);
        match self.sf.oscillation_period() {
            Some(p) => q.with_period(Some(p)).with_panel_width(Some(0.5 * p / self.nu as f64)),
            None => q.with_panel_width(None),
        }
    }
}

fn power_derivatives(d: &[Complex64], nu: u32, z: Complex64) -> Vec<Complex64> {
    let order = d.len() - 1;
    PowerSeries::from_derivatives(z, d).pow(nu, order).derivatives()
}

/// `K_nu(w, z)`: `(E(z) conj(E(w)) - E*(z) conj(E*(w))) / (2 pi i (conj(w) - z))`
/// with `E^nu` in place of `E`; confluent near `z = conj(w)`.
pub fn kernel_eval(space: &SpaceSpec, w: Complex64, z: Complex64) -> Result<Complex64> {
    let u = w.conj();
    let h = z - u;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    if h.norm() > CONFLUENT_RADIUS {
        let (ez, esz) = space.working_values(z, 0)?;
        let (eu, esu) = space.working_values(u, 0)?;
        // conj(E(w)) = E*(u), conj(E*(w)) = E(u)
        return Ok((ez[0] * esu[0] - esz[0] * eu[0]) / (two_pi_i * (u - z)));
    }
    // numerator N(z) = E(z) E*(u) - E*(z) E(u) vanishes at u
    let (e, es) = space.working_values(u, 2)?;
    let n1 = e[1] * es[0] - es[1] * e[0];
    let n2 = e[2] * es[0] - es[2] * e[0];
    Ok(-(n1 + 0.5 * n2 * h) / two_pi_i)
}

/// `K_nu(w, z)` and its derivative in `z`.
pub fn kernel_eval_with_derivative(space: &SpaceSpec, w: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let u = w.conj();
    let h = z - u;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    if h.norm() > DERIVATIVE_SERIES_RADIUS {
        let (ez, esz) = space.working_values(z, 1)?;
        let (eu, esu) = space.working_values(u, 0)?;
        let n = ez[0] * esu[0] - esz[0] * eu[0];
        let dn = ez[1] * esu[0] - esz[1] * eu[0];
        let k = n / (two_pi_i * (u - z));
        let dk = (dn * (u - z) + n) / (two_pi_i * (u - z) * (u - z));
        return Ok((k, dk));
    }
    // K = -sum_{k>=1} N^(k)(u) h^(k-1) / k! / (2 pi i)
    let (e, es) = space.working_values(u, DERIVATIVE_SERIES_ORDER)?;
    let n: Vec<Complex64> = (0..=DERIVATIVE_SERIES_ORDER).map(|k| e[k] * es[0] - es[k] * e[0]).collect();
    let (mut k, mut dk) = (Complex64::default(), Complex64::default());
    for m in 1..=DERIVATIVE_SERIES_ORDER {
        let c = n[m] / factorial(m);
        k += c * h.powu(m as u32 - 1);
        if m >= 2 {
            dk += c * (m - 1) as f64 * h.powu(m as u32 - 2);
        }
    }
    Ok((-k / two_pi_i, -dk / two_pi_i))
}

const DERIVATIVE_SERIES_RADIUS: f64 = 1e-2;
const DERIVATIVE_SERIES_ORDER: usize = 8;

/// `K_nu(x, x) = nu |E(x)|^{2 nu - 2} (B'(x) A(x) - A'(x) B(x)) / pi` for real `x`.
pub fn kernel_diag(space: &SpaceSpec, x: f64) -> Result<f64> {
    let v = eval_structure(&space.sf, Complex64::new(x, 0.0), 1)?;
    let k1 = (v.b[1].re * v.a[0].re - v.a[1].re * v.b[0].re) / PI;
    Ok(space.nu as f64 * v.e[0].norm().powi(2 * space.nu as i32 - 2) * k1)
}

/// `K_nu(t, t) = (nu / pi) A(t)^{2 nu - 1} B'(t)` at a zero `t` of `B`.
pub fn node_kernel_diag(space: &SpaceSpec, t: f64) -> Result<f64> {
    let v = eval_structure(&space.sf, Complex64::new(t, 0.0), 1)?;
    let ratio = v.b[0].norm() / v.e[0].norm();
    if ratio > NODE_TOL {
        return Err(Error::InvalidNode { t, ratio });
    }
    let a = v.a[0].re;
    Ok(space.nu as f64 / PI * a.powi(2 * space.nu as i32 - 1) * v.b[1].re)
}

/// `K_nu(t, t)` at every node of a zero set of `B` (power 1, residue 0).
pub fn node_kernels(space: &SpaceSpec, nodes: &ZeroSet) -> Result<Vec<f64>> {
    nodes.nodes.iter().map(|&t| node_kernel_diag(space, t)).collect()
}

/// The reproducing kernel `K_nu(w, .)` as an entire function.
pub struct KernelFunction {
    pub space: SpaceSpec,
    pub w: Complex64,
}

impl crate::function::EntireFunction for KernelFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        kernel_eval(&self.space, self.w, z)
    }

    fn derivatives_with_radius(&self, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
        match order {
            0 => Ok(vec![self.eval(z)?]),
            1 => {
                let (k, dk) = kernel_eval_with_derivative(&self.space, self.w, z)?;
                Ok(vec![k, dk])
            }
            _ => crate::function::cauchy_derivatives(self, z, order, radius),
        }
    }

    fn name(&self) -> String {
        format!("K_{}({}, .)", self.space.nu, self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::node_set;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pw(tau: f64, nu: u32) -> SpaceSpec {
        SpaceSpec::new(StructureFunction::paley_wiener(tau).unwrap(), nu).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn paley_wiener_kernel_is_sinc() {
        for tau in [1.0, 2.5] {
            let s = pw(tau, 1);
            assert!((kernel_eval(&s, c(0.0), c(0.0)).unwrap() - c(tau / PI)).norm() < 1e-15);
            let w = Complex64::new(0.4, 0.3);
            let z = Complex64::new(-1.2, 0.5);
            let d = z - w.conj();
            let expect = (tau * d).sin() / (PI * d);
            assert!((kernel_eval(&s, w, z).unwrap() - expect).norm() < 1e-14);
        }
        assert!((kernel_eval(&pw(1.0, 2), c(0.0), c(0.0)).unwrap() - c(2.0 / PI)).norm() < 1e-15);
    }

    #[test]
    fn node_diagonal_paley_wiener() {
        assert!((node_kernel_diag(&pw(1.0, 2), PI).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!((node_kernel_diag(&pw(1.0, 1), 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(matches!(node_kernel_diag(&pw(1.0, 1), 1.0), Err(Error::InvalidNode { .. })));
    }

    #[test]
    fn confluent_and_quotient_forms_agree() {
        let s = SpaceSpec::new(StructureFunction::homogeneous(0.0).unwrap(), 1).unwrap();
        let t = node_set(&s.sf, 0.0, (0.5, 5.0)).unwrap().nodes[0];
        let diag = kernel_eval(&s, c(t), c(t)).unwrap();
        let v = eval_structure(&s.sf, c(t), 1).unwrap();
        assert!((PI * diag.re - v.b[1].re * v.a[0].re).abs() < 1e-14);
        let near = kernel_eval(&s, c(t), c(t + 1e-4)).unwrap();
        let near_confluent = kernel_eval(&s, c(t), c(t + 1e-7)).unwrap();
        assert!((near - diag).norm() < 1e-4 * diag.norm());
        assert!((near_confluent - diag).norm() < 1e-7 * diag.norm());
        // just outside the switch the quotient still matches the confluent form
        let z = c(t + 1.0001e-6);
        let quotient = kernel_eval(&s, c(t), z).unwrap();
        let (e, es) = s.working_values(c(t), 2).unwrap();
        let h = z - c(t);
        let confluent = -((e[1] * es[0] - es[1] * e[0]) + 0.5 * h * (e[2] * es[0] - es[2] * e[0])) / Complex64::new(0.0, 2.0 * PI);
        assert!((quotient - confluent).norm() < 1e-9 * diag.norm());
    }

    #[test]
    fn node_diagonal_matches_kernel_all_families() {
        let families = [
            StructureFunction::paley_wiener(1.3).unwrap(),
            StructureFunction::homogeneous(0.0).unwrap(),
            StructureFunction::homogeneous(1.5).unwrap().rotated(0.7).unwrap(),
            StructureFunction::product(0.0, (1..=8).map(|n| (2f64.powi(n), 2f64.powi(n) / (n * n) as f64)).collect()).unwrap(),
        ];
        for sf in families {
            for nu in [1, 2, 3] {
                let s = SpaceSpec::new(sf.clone(), nu).unwrap();
                let nodes = node_set(&sf, 0.0, (-30.0, 300.0)).unwrap();
                for &t in nodes.nodes.iter().take(20) {
                    let a = node_kernel_diag(&s, t).unwrap();
                    let b = kernel_eval(&s, c(t), c(t)).unwrap();
                    let d = kernel_diag(&s, t).unwrap();
                    assert!(a > 0.0);
                    assert!((a - b.re).abs() <= 1e-10 * a && b.im.abs() <= 1e-10 * a, "{sf:?} nu={nu} t={t}");
                    assert!((a - d).abs() <= 1e-10 * a);
                }
            }
        }
    }

    #[test]
    fn kernel_derivative_matches_cauchy_circles() {
        use crate::function::{cauchy_derivatives, EntireFunction};
        let s = SpaceSpec::new(StructureFunction::homogeneous(0.5).unwrap(), 2).unwrap();
        let f = KernelFunction {
            space: s.clone(),
            w: Complex64::new(0.7, 0.4),
        };
        for z in [Complex64::new(-3.0, 0.0), Complex64::new(0.7, -0.395), Complex64::new(0.7, -0.4), Complex64::new(2.0, 1.0)] {
            let exact = f.derivatives(z, 1).unwrap();
            let circle = cauchy_derivatives(&f, z, 1, 0.3).unwrap();
            assert!((exact[1] - circle[1]).norm() < 1e-10 * circle[1].norm().max(1e-3), "{z}: {} vs {}", exact[1], circle[1]);
        }
    }

    #[test]
    fn hermitian_symmetry_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spaces = [
            pw(1.0, 2),
            SpaceSpec::new(StructureFunction::homogeneous(0.5).unwrap(), 2).unwrap(),
            SpaceSpec::new(StructureFunction::product(0.2, vec![(1.0, 0.5), (-2.0, 1.5)]).unwrap(), 3).unwrap(),
        ];
        for s in &spaces {
            for _ in 0..50 {
                let w = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-2.0..2.0));
                let z = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-2.0..2.0));
                let kwz = kernel_eval(s, w, z).unwrap();
                let kzw = kernel_eval(s, z, w).unwrap();
                assert!((kwz - kzw.conj()).norm() <= 1e-12 * kwz.norm().max(1e-300) + 1e-300);
                let x = rng.random_range(-50.0..50.0);
                assert!(kernel_diag(s, x).unwrap() > 0.0);
            }
        }
    }
}
