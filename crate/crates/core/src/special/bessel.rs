use std::f64::consts::PI;

use num_complex::Complex64;

use super::{gamma, BesselOrder};
use crate::error::{Error, Result};
use crate::numerics::dd::{CDd, Dd};

/// Below this modulus the ascending series (in double-double) is used,
/// above it the Hankel expansion.
pub const SERIES_LIMIT: f64 = 30.0;
/// Largest supported |z|.
pub const MAX_ARGUMENT: f64 = 1e6;

const MAX_SERIES_TERMS: usize = 2000;
const MIN_HANKEL_TERMS: usize = 10;

/// `A^(k)(z)` and `B^(k)(z)` for `k = 0..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousValues {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// `A_alpha`, `B_alpha` and their derivatives at `z`.
pub fn homogeneous_eval(order: BesselOrder, z: Complex64, max_order: usize) -> Result<HomogeneousValues> {
    let alpha = order.alpha();
    if !z.is_finite() {
        return Err(Error::eval(z, "non-finite argument"));
    }
    if z.norm() > MAX_ARGUMENT {
        return Err(Error::Range(format!("|z| = {:e} exceeds {MAX_ARGUMENT:e}", z.norm())));
    }
    let out = if z.norm() <= SERIES_LIMIT {
        series_eval(alpha, z, max_order)
    } else if z.re >= 0.0 {
        asymptotic_eval(alpha, z, max_order)
    } else {
        // A is even and B is odd
        let mut v = asymptotic_eval(alpha, -z, max_order);
        for (k, (a, b)) in v.a.iter_mut().zip(v.b.iter_mut()).enumerate() {
            if k % 2 == 1 {
                *a = -*a;
            } else {
                *b = -*b;
            }
        }
        v
    };
    if out.a.iter().chain(&out.b).any(|v| !v.is_finite()) {
        return Err(Error::Range(format!("A/B overflow at z = {z}")));
    }
    Ok(out)
}

/// `J_alpha(z)` on the principal branch of `(z/2)^alpha`.
pub fn bessel_j(order: BesselOrder, z: Complex64) -> Result<Complex64> {
    let alpha = order.alpha();
    if z == Complex64::default() {
        return zero_value(alpha).map(|v| Complex64::new(v, 0.0));
    }
    let a = homogeneous_eval(order, z, 0)?.a[0];
    Ok((z / 2.0).powf(alpha) / gamma(alpha + 1.0) * a)
}

/// `J_alpha(x)` for real `x`; negative `x` only for integer orders.
pub fn bessel_j_real(order: BesselOrder, x: f64) -> Result<f64> {
    let alpha = order.alpha();
    if x == 0.0 {
        return zero_value(alpha);
    }
    if x < 0.0 {
        if alpha.fract() != 0.0 {
            return Err(Error::Domain(format!("J_{alpha}(x) is not real for x = {x} < 0")));
        }
        let sign = if (alpha as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * bessel_j_real(order, -x)?);
    }
    let a = homogeneous_eval(order, Complex64::new(x, 0.0), 0)?.a[0].re;
    Ok((x / 2.0).powf(alpha) / gamma(alpha + 1.0) * a)
}

fn zero_value(alpha: f64) -> Result<f64> {
    match alpha {
        a if a == 0.0 => Ok(1.0),
        a if a > 0.0 => Ok(0.0),
        _ => Err(Error::Range(format!("J_{alpha} is unbounded at 0"))),
    }
}

fn series_eval(alpha: f64, z: Complex64, max_order: usize) -> HomogeneousValues {
    let zd = CDd::new(z);
    let z2 = zd * zd;
    let two_alpha = Dd::new(2.0 * alpha);
    // A = sum c_m z^m over even m, c_{m+2} = -c_m / ((m+2)(m+2+2a))
    let ratio_a = |m: usize| -Dd::ONE / (Dd::new((m + 2) as f64) * (two_alpha + Dd::new((m + 2) as f64)));
    // B = sum c_m z^m over odd m, c_1 = 1/(2(a+1)), c_{m+2} = -c_m / ((m+1)(m+3+2a))
    let ratio_b = |m: usize| -Dd::ONE / (Dd::new((m + 1) as f64) * (two_alpha + Dd::new((m + 3) as f64)));
    let b1 = Dd::ONE / (two_alpha + Dd::new(2.0));
    let a = (0..=max_order)
        .map(|n| series_derivative(zd, z2, 0, Dd::ONE, &ratio_a, n).to_c64())
        .collect();
    let b = (0..=max_order)
        .map(|n| series_derivative(zd, z2, 1, b1, &ratio_b, n).to_c64())
        .collect();
    HomogeneousValues { a, b }
}

/// n-th derivative of `sum_k c_{m0+2k} z^{m0+2k}` with `c_{m+2} = c_m ratio(m)`.
fn series_derivative(z: CDd, z2: CDd, m0: usize, c0: Dd, ratio: &dyn Fn(usize) -> Dd, n: usize) -> CDd {
    let mut m = m0;
    let mut c = c0;
    while m < n {
        c = c * ratio(m);
        m += 2;
    }
    // first surviving term: c_m m!/(m-n)! z^(m-n), with m - n in {0, 1}
    let falling = (0..n).fold(Dd::ONE, |acc, i| acc * Dd::new((m - i) as f64));
    let mut term = CDd::ONE.scale(c * falling);
    if m > n {
        term = term * z;
    }
    let mut sum = CDd::ZERO;
    let mut largest = 0.0f64;
    for _ in 0..MAX_SERIES_TERMS {
        sum = sum + term;
        let size = term.norm();
        largest = largest.max(size);
        let mf = m as f64;
        let growth = Dd::new((mf + 2.0) * (mf + 1.0)) / Dd::new((mf + 2.0 - n as f64) * (mf + 1.0 - n as f64));
        term = (term * z2).scale(ratio(m) * growth);
        m += 2;
        // terms decrease monotonically once m exceeds |z|
        if (m as f64) > z.norm() + n as f64 && term.norm() <= 1e-34 * largest {
            break;
        }
    }
    sum
}

fn asymptotic_eval(alpha: f64, z: Complex64, max_order: usize) -> HomogeneousValues {
    let (ja, jb) = (hankel_core(alpha, z), hankel_core(alpha + 1.0, z));
    // G(a+1) (z/2)^-a sqrt(2/(pi z))
    let pref = gamma(alpha + 1.0) * 2f64.powf(alpha) * (2.0 / PI).sqrt() * z.powf(-alpha - 0.5);
    let mut a = vec![pref * ja];
    let mut b = vec![pref * jb];
    // A' = -B, B' = A - (2a+1) B / z, differentiated with Leibniz' rule
    let inv_z_derivs: Vec<Complex64> = (0..max_order)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * crate::numerics::factorial(m) / z.powu(m as u32 + 1)
        })
        .collect();
    for n in 0..max_order {
        let next_a = -b[n];
        let coupling: Complex64 = (0..=n)
            .map(|k| crate::numerics::binomial(n, k) * b[k] * inv_z_derivs[n - k])
            .sum();
        let next_b = a[n] - (2.0 * alpha + 1.0) * coupling;
        a.push(next_a);
        b.push(next_b);
    }
    HomogeneousValues { a, b }
}

/// `P cos(chi) - Q sin(chi)` of the Hankel expansion, `chi = z - (nu/2 + 1/4) pi`.
fn hankel_core(nu: f64, z: Complex64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * z);
        let size = next.norm();
        if size == 0.0 {
            break;
        }
        // stop at the smallest term of the asymptotic series
        if k > MIN_HANKEL_TERMS && size > last {
            break;
        }
        term = next;
        last = size;
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if size < 1e-17 * p.norm().max(q.norm()) {
            break;
        }
    }
    let c = (0.5 * nu + 0.25) * PI;
    let (cz, sz) = (z.cos(), z.sin());
    let (cc, sc) = (c.cos(), c.sin());
    let cos_chi = cz * cc + sz * sc;
    let sin_chi = sz * cc - cz * sc;
    p * cos_chi - q * sin_chi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> BesselOrder {
        BesselOrder::new(a).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn elementary_values() {
        assert_eq!(bessel_j_real(order(0.0), 0.0).unwrap(), 1.0);
        let v = bessel_j_real(order(0.5), PI / 2.0).unwrap();
        assert!(rel(v, 2.0 / PI) < 1e-13, "{v}");
        assert!(bessel_j_real(order(0.0), 2.404825557695773).unwrap().abs() < 1e-11);
    }

    #[test]
    fn reference_values() {
        // high-precision reference values
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (1.0, 1.0, 0.440_050_585_744_933_5),
            (0.0, 100.0, 0.019_985_850_304_223_122),
            (1.5, 37.5, -0.128_406_991_017_849_97),
            (0.5, 500.0, -0.016_691_259_174_642_977),
            (3.0, 10.0, 0.058_379_379_305_186_81),
            (-0.75, 2.5, -0.500_897_314_476_769_5),
            (0.3, 29.0, -0.127_550_298_916_825_2),
            (0.3, 31.0, -0.014_925_566_605_561_776),
        ];
        for (a, x, expect) in cases {
            let v = bessel_j_real(order(a), x).unwrap();
            assert!(rel(v, expect) < 1e-12, "J_{a}({x}) = {v}, expected {expect}");
        }
        let v = bessel_j(order(2.0), Complex64::new(3.0, 2.0)).unwrap();
        let expect = Complex64::new(1.221_309_098_878_201_3, 0.125_946_272_384_649_72);
        assert!((v - expect).norm() / expect.norm() < 1e-12, "{v}");
        let v = bessel_j(order(0.0), Complex64::new(40.0, 5.0)).unwrap();
        let expect = Complex64::new(-0.035_264_723_523_106_12, -9.328_185_352_847_307);
        assert!((v - expect).norm() / expect.norm() < 1e-12, "{v}");
    }

    #[test]
    fn negative_arguments() {
        let v = bessel_j_real(order(1.0), -1.0).unwrap();
        assert!(rel(v, -0.440_050_585_744_933_5) < 1e-13);
        assert!(bessel_j_real(order(0.5), -1.0).is_err());
        assert!(matches!(bessel_j_real(order(0.0), 2e6), Err(Error::Range(_))));
    }

    #[test]
    fn half_integer_reduces_to_trigonometric() {
        for x in [0.3, 1.7, 4.0, 29.9, 30.1, 47.0, 250.0] {
            let v = homogeneous_eval(order(-0.5), c(x), 2).unwrap();
            assert!((v.a[0] - c(x.cos())).norm() < 1e-12, "A({x})");
            assert!((v.b[0] - c(x.sin())).norm() < 1e-12, "B({x})");
            assert!((v.a[1] + c(x.sin())).norm() < 1e-12, "A'({x})");
            assert!((v.b[2] + c(x.sin())).norm() < 1e-11, "B''({x})");
        }
        let z = Complex64::new(-35.0, 1.5);
        let v = homogeneous_eval(order(-0.5), z, 1).unwrap();
        assert!((v.a[0] - z.cos()).norm() < 1e-12 * z.cos().norm());
        assert!((v.b[1] - z.cos()).norm() < 1e-12 * z.cos().norm());
    }

    #[test]
    fn values_at_origin() {
        for a in [0.0, 0.5, 3.0] {
            let v = homogeneous_eval(order(a), c(0.0), 1).unwrap();
            assert_eq!(v.a[0], c(1.0));
            assert_eq!(v.b[0], c(0.0));
            // B'(0) = 1/(2(a+1)): the limit of A - (2a+1)B/z at the origin
            assert!((v.b[1] - c(0.5 / (a + 1.0))).norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_relations() {
        let v = homogeneous_eval(order(0.0), c(2.0), 1).unwrap();
        assert!((v.a[1] + v.b[0]).norm() < 1e-12);
        // recurrence oracle on both sides of the regime switch
        for a in [0.0, 0.5, 1.0, 2.7] {
            for z in [Complex64::new(1.3, 0.4), Complex64::new(12.0, -2.0), Complex64::new(45.0, 0.7)] {
                let v = homogeneous_eval(order(a), z, 3).unwrap();
                let scale = v.a[0].norm().max(v.b[0].norm());
                for n in 0..3 {
                    assert!((v.a[n + 1] + v.b[n]).norm() < 1e-12 * scale);
                }
                let b1 = v.a[0] - (2.0 * a + 1.0) * v.b[0] / z;
                assert!((v.b[1] - b1).norm() < 1e-12 * scale, "a={a} z={z}");
            }
        }
    }

    #[test]
    fn regimes_agree_on_overlap_band() {
        for a in [0.0, 0.5, 1.0, 3.0] {
            let mut x = 25.0;
            while x <= 35.0 {
                let s = series_eval(a, c(x), 1);
                let h = asymptotic_eval(a, c(x), 1);
                let scale = s.a[0].norm().max(s.b[0].norm());
                for k in 0..2 {
                    assert!((s.a[k] - h.a[k]).norm() < 1e-10 * scale, "A^({k}) a={a} x={x}");
                    assert!((s.b[k] - h.b[k]).norm() < 1e-10 * scale, "B^({k}) a={a} x={x}");
                }
                x += 0.25;
            }
        }
    }

    #[test]
    fn wronskian_is_positive() {
        for a in [0.0, 0.5, 1.0, 2.0] {
            for i in 1..=500 {
                let x = 0.1 * i as f64;
                let v = homogeneous_eval(order(a), c(x), 1).unwrap();
                let w = (v.a[0] * v.b[1] - v.a[1] * v.b[0]).re;
                assert!(w > 0.0, "a={a} x={x} w={w}");
            }
        }
    }

    #[test]
    fn modulus_band() {
        for a in [0.0, 0.5, 1.0] {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..=2000 {
                let x = 1.0 + 199.0 * i as f64 / 2000.0;
                let v = homogeneous_eval(order(a), c(x), 0).unwrap();
                let m = (v.a[0] - Complex64::i() * v.b[0]).norm() * x.powf(a + 0.5);
                lo = lo.min(m);
                hi = hi.max(m);
            }
            assert!(hi / lo <= 3.0, "a={a}: {lo}..{hi}");
        }
    }
}
