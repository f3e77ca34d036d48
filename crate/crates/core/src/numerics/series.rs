use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated Taylor series `sum c_n (z - center)^n`, `n = 0..=order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        PowerSeries { center, coeffs }
    }

    pub fn real(center: f64, coeffs: &[f64]) -> Self {
        Self::new(
            Complex64::new(center, 0.0),
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncated(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        Self::new(self.center, self.coeffs[..n].to_vec())
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let h = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * h + c)
    }

    /// Value and first derivative of the truncated polynomial.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let h = z - self.center;
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp) = (zero, zero);
        for &c in self.coeffs.iter().rev() {
            dp = dp * h + p;
            p = p * h + c;
        }
        (p, dp)
    }

    /// `k!` times the k-th coefficient.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default() * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..self.coeffs.len()).map(|k| self.derivative(k)).collect()
    }

    /// Series from derivative values `f^(k)(center)`.
    pub fn from_derivatives(center: Complex64, derivs: &[Complex64]) -> Self {
        Self::new(
            center,
            derivs
                .iter()
                .enumerate()
                .map(|(k, &d)| d / factorial(k))
                .collect(),
        )
    }

    /// Cauchy product truncated to `order`.
    pub fn mul(&self, other: &PowerSeries, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n)
                    .filter(|&k| k < self.coeffs.len() && n - k < other.coeffs.len())
                    .map(|k| self.coeffs[k] * other.coeffs[n - k])
                    .sum()
            })
            .collect();
        Self::new(self.center, coeffs)
    }

    /// `self^power` truncated to `order`, by repeated Cauchy products.
    pub fn pow(&self, power: u32, order: usize) -> Self {
        let mut acc = Self::new(self.center, vec![Complex64::new(1.0, 0.0)]);
        for _ in 0..power {
            acc = acc.mul(self, order);
        }
        if acc.coeffs.len() < order + 1 {
            acc.coeffs.resize(order + 1, Complex64::default());
        }
        acc
    }

    /// Series of `f(z) / (z - center)` for `f(center) = 0`: drops `c_0`, shifts down.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() < 2 {
            return Self::new(self.center, vec![Complex64::default()]);
        }
        Self::new(self.center, self.coeffs[1..].to_vec())
    }
}

/// Reciprocal series: `a_0 = 1/b_0`, `sum_{j<=l} a_j b_{l-j} = 0` for `1 <= l <= order`.
pub fn invert_power_series(b: &PowerSeries, order: usize) -> Result<PowerSeries> {
    let b0 = b.coeffs[0];
    if b0.norm() == 0.0 || !b0.is_finite() {
        return Err(Error::SingularSeries);
    }
    let mut a = Vec::with_capacity(order + 1);
    a.push(b0.inv());
    for l in 1..=order {
        let s: Complex64 = (0..l)
            .filter(|&j| l - j < b.coeffs.len())
            .map(|j| a[j] * b.coeffs[l - j])
            .sum();
        a.push(-s / b0);
    }
    Ok(PowerSeries::new(b.center, a))
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
