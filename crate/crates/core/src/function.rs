use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{taylor_coeffs_cauchy, DEFAULT_CAUCHY_TOL};

/// Radius of the Cauchy circle used when a function has no closed-form derivatives.
pub const DEFAULT_DERIVATIVE_RADIUS: f64 = 0.5;

/// An entire function that can be evaluated at complex points.
pub trait EntireFunction: Send + Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    /// `F^(k)(z)` for `k = 0..=order`; by default from a Cauchy circle.
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        self.derivatives_with_radius(z, order, DEFAULT_DERIVATIVE_RADIUS)
    }

    /// As [`derivatives`](Self::derivatives), with a hint for the Cauchy radius
    /// (ignored by functions with closed-form derivatives).
    fn derivatives_with_radius(&self, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
        cauchy_derivatives(self, z, order, radius)
    }

    fn name(&self) -> String {
        "F".into()
    }
}

/// Derivatives of `f` at `z` from a trapezoid rule on a circle of the given radius.
pub fn cauchy_derivatives<F: EntireFunction + ?Sized>(f: &F, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
    if order == 0 {
        return Ok(vec![f.eval(z)?]);
    }
    Ok(taylor_coeffs_cauchy(|u| f.eval(u), z, radius, order, DEFAULT_CAUCHY_TOL)?.derivatives())
}

/// Adapts a closure to [`EntireFunction`] (derivatives via Cauchy circles).
pub struct FnEntire<F> {
    f: F,
    name: String,
}

impl<F> FnEntire<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnEntire { f, name: name.into() }
    }
}

impl<F> EntireFunction for FnEntire<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Send + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.f)(z)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

impl<T: EntireFunction + ?Sized> EntireFunction for Box<T> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (**self).eval(z)
    }
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        (**self).derivatives(z, order)
    }
    fn derivatives_with_radius(&self, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
        (**self).derivatives_with_radius(z, order, radius)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: EntireFunction + ?Sized> EntireFunction for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (**self).eval(z)
    }
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        (**self).derivatives(z, order)
    }
    fn derivatives_with_radius(&self, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
        (**self).derivatives_with_radius(z, order, radius)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// `sin(z)/z` with the removable singularity filled in.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_derivatives_use_cauchy_circles() {
        let f = FnEntire::new("exp2", |z: Complex64| Ok((2.0 * z).exp()));
        let d = f.derivatives(Complex64::new(0.3, 0.0), 3).unwrap();
        let base = (0.6f64).exp();
        for (k, v) in d.iter().enumerate() {
            assert!((v.re - base * 2f64.powi(k as i32)).abs() < 1e-12 * base * 8.0);
        }
        assert_eq!(f.name(), "exp2");
    }

    #[test]
    fn sinc_is_smooth_at_origin() {
        for x in [0.0, 1e-6, 9.9e-5, 1.01e-4, 0.5] {
            let z = Complex64::new(x, 0.0);
            let exact = if x == 0.0 { 1.0 } else { x.sin() / x };
            assert!((sinc(z).re - exact).abs() <= 2.0 * f64::EPSILON);
        }
    }
}
