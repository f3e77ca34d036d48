use num_complex::Complex64;

use super::{Family, StructureFunction};
use crate::error::{Error, Result};
use crate::numerics::{factorial, PowerSeries};
use crate::special::homogeneous_eval;

/// `E, E*, A, B` of the rotated function and their derivatives
/// (index k holds the k-th derivative).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureValues {
    pub e: Vec<Complex64>,
    pub e_star: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

pub fn eval_structure(sf: &StructureFunction, z: Complex64, max_order: usize) -> Result<StructureValues> {
    if !z.is_finite() {
        return Err(Error::eval(z, "non-finite argument"));
    }
    let (e0, es0) = match &sf.family {
        Family::PaleyWiener { tau } => {
            let i = Complex64::i();
            let (e, es) = ((-i * tau * z).exp(), (i * tau * z).exp());
            let (mut de, mut des) = (Vec::with_capacity(max_order + 1), Vec::with_capacity(max_order + 1));
            let (mut pe, mut pes) = (e, es);
            for _ in 0..=max_order {
                de.push(pe);
                des.push(pes);
                pe *= -i * tau;
                pes *= i * tau;
            }
            (de, des)
        }
        Family::Homogeneous { alpha } => {
            let v = homogeneous_eval(*alpha, z, max_order)?;
            let i = Complex64::i();
            let e = v.a.iter().zip(&v.b).map(|(a, b)| a - i * b).collect();
            let es = v.a.iter().zip(&v.b).map(|(a, b)| a + i * b).collect();
            (e, es)
        }
        Family::ProductZeros { a, zeros } => {
            let i = Complex64::i();
            let conj_w = zeros.iter().map(|&(x, y)| Complex64::new(x, -y));
            let w = zeros.iter().map(|&(x, y)| Complex64::new(x, y));
            (
                product_derivatives(-i * a, conj_w, z, max_order),
                product_derivatives(i * a, w, z, max_order),
            )
        }
    };
    let rot = Complex64::from_polar(1.0, sf.theta);
    let e: Vec<Complex64> = e0.iter().map(|v| v * rot).collect();
    let e_star: Vec<Complex64> = es0.iter().map(|v| v * rot.conj()).collect();
    let half_i = Complex64::new(0.0, 0.5);
    let a = e.iter().zip(&e_star).map(|(e, s)| 0.5 * (e + s)).collect();
    let b = e.iter().zip(&e_star).map(|(e, s)| half_i * (e - s)).collect();
    let out = StructureValues { e, e_star, a, b };
    if out.e.iter().chain(&out.e_star).any(|v| !v.is_finite()) {
        return Err(Error::Range(format!("structure function overflows at z = {z}")));
    }
    Ok(out)
}

/// Derivatives of `e^{c z} prod (1 - z / r)` at `z`: Taylor coefficients of the
/// product of the linear factors in `h = zeta - z`, times the exponential series.
fn product_derivatives(c: Complex64, roots: impl Iterator<Item = Complex64>, z: Complex64, order: usize) -> Vec<Complex64> {
    let mut series = PowerSeries::new(z, vec![(c * z).exp()]);
    let mut ck = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        ck *= c;
        series.coeffs.push(series.coeffs[0] * ck / factorial(k));
    }
    for r in roots {
        let factor = PowerSeries::new(z, vec![1.0 - z / r, -1.0 / r]);
        series = series.mul(&factor, order);
    }
    series.derivatives()
}
