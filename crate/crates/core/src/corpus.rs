//! Seeded test-function families for the property suites and diagnostics:
//! kernels at fixed points, random `G`-combinations, `B^{nu-1}`-lifted kernels
//! of `H(E)` and, for Paley-Wiener spaces, dilated sinc powers.
//!
//! Members depend only on `(space, size, seed)` and [`CORPUS_VERSION`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::function::{cauchy_derivatives, sinc, EntireFunction};
use crate::interpolation::{basis_coeffs, eval_basis, BasisEntry, BasisKind};
use crate::kernels::{kernel_eval, kernel_eval_with_derivative, SpaceSpec};
use crate::structure::{eval_structure, node_window, Family};

pub const CORPUS_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Debug, Clone)]
pub enum CorpusKind {
    /// `K_nu(w, .)`.
    Kernel { w: Complex64 },
    /// `sum c G_{nu,j}(., t)`.
    GCombination { terms: Vec<(BasisEntry, usize, Complex64)> },
    /// `B^{nu-1} K_1(w, .)`.
    LiftedKernel { w: Complex64 },
    /// `sinc(s z)^p`.
    DilatedSinc { scale: f64, power: u32 },
}

#[derive(Debug, Clone)]
pub struct CorpusFunction {
    pub id: String,
    pub space: SpaceSpec,
    pub kind: CorpusKind,
}

impl EntireFunction for CorpusFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match &self.kind {
            CorpusKind::Kernel { w } => kernel_eval(&self.space, *w, z),
            CorpusKind::GCombination { terms } => {
                let mut s = Complex64::default();
                for (entry, j, c) in terms {
                    s += c * eval_basis(&self.space, entry, BasisKind::G, *j, z)?;
                }
                Ok(s)
            }
            CorpusKind::LiftedKernel { w } => {
                let base = SpaceSpec::new(self.space.sf.clone(), 1)?;
                let b = eval_structure(&self.space.sf, z, 0)?.b[0];
                Ok(b.powu(self.space.nu - 1) * kernel_eval(&base, *w, z)?)
            }
            CorpusKind::DilatedSinc { scale, power } => Ok(sinc(scale * z).powu(*power)),
        }
    }

    /// Closed forms for the first derivative; Cauchy circles beyond.
    fn derivatives_with_radius(&self, z: Complex64, order: usize, radius: f64) -> Result<Vec<Complex64>> {
        if order == 0 {
            return Ok(vec![self.eval(z)?]);
        }
        if order > 1 {
            return cauchy_derivatives(self, z, order, radius);
        }
        let (v, d) = match &self.kind {
            CorpusKind::Kernel { w } => kernel_eval_with_derivative(&self.space, *w, z)?,
            CorpusKind::GCombination { terms } => {
                let b = eval_structure(&self.space.sf, z, 1)?.b;
                let (mut v, mut d) = (Complex64::default(), Complex64::default());
                for (entry, j, c) in terms {
                    let (g, dg) = entry.g_values_with_derivative(z, b[0], b[1]);
                    v += c * g[*j];
                    d += c * dg[*j];
                }
                (v, d)
            }
            CorpusKind::LiftedKernel { w } => {
                let base = SpaceSpec::new(self.space.sf.clone(), 1)?;
                let b = eval_structure(&self.space.sf, z, 1)?.b;
                let (k, dk) = kernel_eval_with_derivative(&base, *w, z)?;
                let m = self.space.nu - 1;
                let bm = b[0].powu(m);
                let dbm = if m == 0 { Complex64::default() } else { m as f64 * b[0].powu(m - 1) * b[1] };
                (bm * k, dbm * k + bm * dk)
            }
            CorpusKind::DilatedSinc { scale, power } => {
                let x = scale * z;
                let s = sinc(x);
                let p = *power;
                (s.powu(p), p as f64 * s.powu(p - 1) * scale * sinc_derivative(x))
            }
        };
        Ok(vec![v, d])
    }

    fn name(&self) -> String {
        self.id.clone()
    }
}

fn sinc_derivative(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let x2 = x * x;
        return x * (-1.0 / 3.0 + x2 / 30.0);
    }
    (x * x.cos() - x.sin()) / (x * x)
}

/// `F'` as an entire function.
pub struct Derivative<F>(pub F);

impl<F: EntireFunction> EntireFunction for Derivative<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.0.derivatives(z, 1)?[1])
    }

    fn name(&self) -> String {
        format!("({})'", self.0.name())
    }
}

/// `B^{nu-1} F` for `F` in `H(E)`: maps `H(E)` into `H(E^nu)`.
pub struct LiftedByB<F> {
    pub space: SpaceSpec,
    pub f: F,
}

impl<F: EntireFunction> EntireFunction for LiftedByB<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let b = eval_structure(&self.space.sf, z, 0)?.b[0];
        Ok(b.powu(self.space.nu - 1) * self.f.eval(z)?)
    }

    fn name(&self) -> String {
        format!("B^{} {}", self.space.nu - 1, self.f.name())
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0))
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `size` functions of `H(E^nu)`, cycling through the available kinds.
pub fn standard_corpus(space: &SpaceSpec, size: usize, seed: u64) -> Result<Vec<CorpusFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = node_window(&space.sf, 1, 0.0, 10)?;
    let pw_tau = match space.sf.family {
        Family::PaleyWiener { tau } => Some(tau),
        _ => None,
    };
    let kinds = if pw_tau.is_some() { 4 } else { 3 };
    let mut out = Vec::with_capacity(size);
    for i in 0..size {
        let (id, kind) = match i % kinds {
            0 => {
                let w = random_point(&mut rng);
                (format!("kernel-{i}"), CorpusKind::Kernel { w })
            }
            1 => {
                let terms = random_g_terms(space, &nodes.nodes, 3, &mut rng)?;
                (format!("g-combination-{i}"), CorpusKind::GCombination { terms })
            }
            2 => {
                let w = random_point(&mut rng);
                (format!("lifted-kernel-{i}"), CorpusKind::LiftedKernel { w })
            }
            _ => {
                let tau = pw_tau.expect("only Paley-Wiener spaces cycle through sinc powers");
                let power = rng.random_range(1..=space.nu + 1);
                let scale = tau * space.nu as f64 / power as f64 * rng.random_range(0.3..1.0);
                (format!("dilated-sinc-{i}"), CorpusKind::DilatedSinc { scale, power })
            }
        };
        out.push(CorpusFunction {
            id,
            space: space.clone(),
            kind,
        });
    }
    Ok(out)
}

/// `size` random combinations of `terms` basis functions `G_{nu,j}(., t)`
/// with nodes among the `2 half_window + 1` nodes nearest the origin.
pub fn g_combination_corpus(space: &SpaceSpec, size: usize, terms: usize, half_window: usize, seed: u64) -> Result<Vec<CorpusFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = node_window(&space.sf, 1, 0.0, half_window)?;
    (0..size)
        .map(|i| {
            Ok(CorpusFunction {
                id: format!("g-combination-{i}"),
                space: space.clone(),
                kind: CorpusKind::GCombination {
                    terms: random_g_terms(space, &nodes.nodes, terms, &mut rng)?,
                },
            })
        })
        .collect()
}

fn random_g_terms(space: &SpaceSpec, nodes: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(BasisEntry, usize, Complex64)>> {
    (0..count)
        .map(|_| {
            let t = nodes[rng.random_range(0..nodes.len())];
            let j = rng.random_range(0..space.nu as usize);
            Ok((basis_coeffs(space, t)?, j, random_coeff(rng)))
        })
        .collect()
}
