use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{b_power, basis_coeffs, BasisEntry};
use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::kernels::{node_kernel_diag, SpaceSpec};
use crate::structure::ZeroSet;

/// Derivative data `F^(j)(t)`, `j < nu`, at every node of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub space: SpaceSpec,
    pub nodes: ZeroSet,
    pub values: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    j: usize,
    value_re: f64,
    value_im: f64,
}

impl SampleSet {
    pub fn new(space: &SpaceSpec, nodes: ZeroSet, values: Vec<Vec<Complex64>>) -> Result<Self> {
        let nu = space.nu as usize;
        if values.len() != nodes.len() {
            return Err(Error::Domain(format!("{} value vectors for {} nodes", values.len(), nodes.len())));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.len() != nu) {
            return Err(Error::Domain(format!("node {} carries {} values, expected {nu}", nodes.nodes[i], v.len())));
        }
        Ok(SampleSet {
            space: space.clone(),
            nodes,
            values,
        })
    }

    /// `sum_t sum_j |F^(j)(t)|^2 / K_nu(t, t)`.
    pub fn weighted_square_sum(&self) -> Result<f64> {
        self.partial_square_sum(0..self.nodes.len())
    }

    fn partial_square_sum(&self, idx: impl Iterator<Item = usize>) -> Result<f64> {
        let mut s = 0.0;
        for i in idx {
            let k = node_kernel_diag(&self.space, self.nodes.nodes[i])?;
            s += self.values[i].iter().map(|v| v.norm_sqr()).sum::<f64>() / k;
        }
        Ok(s)
    }

    /// CSV with header `t,j,value_re,value_im`, one row per (node, order).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (t, vals) in self.nodes.nodes.iter().zip(&self.values) {
            for (j, v) in vals.iter().enumerate() {
                wr.serialize(Row {
                    t: *t,
                    j,
                    value_re: v.re,
                    value_im: v.im,
                })?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`write_csv`](Self::write_csv); rows of one
    /// node must be consecutive with `j = 0..nu`.
    pub fn read_csv<R: Read>(space: &SpaceSpec, r: R) -> Result<Self> {
        let nu = space.nu as usize;
        let mut rd = csv::Reader::from_reader(r);
        let mut nodes: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<Complex64>> = Vec::new();
        for (line, row) in rd.deserialize::<Row>().enumerate() {
            let row = row?;
            let at = || format!("line {}", line + 2);
            if !(row.t.is_finite() && row.value_re.is_finite() && row.value_im.is_finite()) {
                return Err(Error::Parse(format!("{}: non-finite field", at())));
            }
            let v = Complex64::new(row.value_re, row.value_im);
            if row.j == 0 {
                if let Some(last) = values.last() {
                    if last.len() != nu {
                        return Err(Error::Parse(format!("{}: node {} has {} of {nu} orders", at(), nodes.last().unwrap(), last.len())));
                    }
                }
                if nodes.last().is_some_and(|&p| row.t <= p) {
                    return Err(Error::Parse(format!("{}: nodes must be strictly increasing", at())));
                }
                nodes.push(row.t);
                values.push(vec![v]);
            } else {
                match (nodes.last(), values.last_mut()) {
                    (Some(&t), Some(last)) if t == row.t && last.len() == row.j && row.j < nu => last.push(v),
                    _ => return Err(Error::Parse(format!("{}: unexpected order j = {} at t = {}", at(), row.j, row.t))),
                }
            }
        }
        if values.last().is_some_and(|v| v.len() != nu) {
            return Err(Error::Parse(format!("last node has fewer than {nu} orders")));
        }
        let range = match (nodes.first(), nodes.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0.0, 0.0),
        };
        let set = ZeroSet {
            sf: space.sf.clone(),
            power: 1,
            residue: 0.0,
            range,
            nodes,
        };
        SampleSet::new(space, set, values)
    }
}

/// `F^(j)(t)` for `j < nu` at every node; Cauchy radii default to half the
/// distance to the nearest neighbouring node (at most 1).
pub fn sample(space: &SpaceSpec, f: &dyn EntireFunction, nodes: &ZeroSet) -> Result<SampleSet> {
    let order = space.nu as usize - 1;
    let n = nodes.nodes.len();
    let mut values = Vec::with_capacity(n);
    for (i, &t) in nodes.nodes.iter().enumerate() {
        let mut gap = f64::INFINITY;
        if i > 0 {
            gap = gap.min(t - nodes.nodes[i - 1]);
        }
        if i + 1 < n {
            gap = gap.min(nodes.nodes[i + 1] - t);
        }
        let radius = (0.5 * gap).min(1.0);
        let d = f.derivatives_with_radius(Complex64::new(t, 0.0), order, radius)?;
        if let Some(bad) = d.iter().find(|v| !v.is_finite()) {
            return Err(Error::eval(t, format!("{} derivative is {bad}", f.name())));
        }
        values.push(d);
    }
    SampleSet::new(space, nodes.clone(), values)
}

/// Reconstructed values with truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub values: Vec<Complex64>,
    /// Weighted square sum over the outermost tenth of the nodes.
    pub tail_indicator: f64,
    pub weighted_square_sum: f64,
    pub window: (f64, f64),
    pub terms: usize,
}

/// `sum_t sum_j F^(j)(t) G_{nu,j}(z, t)` over the sample window at each `z`.
pub fn reconstruct(space: &SpaceSpec, samples: &SampleSet, zs: &[Complex64]) -> Result<Reconstruction> {
    reconstruct_with(space, samples, zs, None)
}

/// As [`reconstruct`], leaving out the term of order `j` at the node with index
/// `i` in the sample set when `skip = Some((i, j))`.
pub fn reconstruct_with(
    space: &SpaceSpec,
    samples: &SampleSet,
    zs: &[Complex64],
    skip: Option<(usize, usize)>,
) -> Result<Reconstruction> {
    if samples.nodes.is_empty() {
        return Err(Error::Domain("sample set is empty".into()));
    }
    if samples.space.nu != space.nu {
        return Err(Error::Domain(format!("samples carry nu = {}, space has nu = {}", samples.space.nu, space.nu)));
    }
    let nodes = &samples.nodes.nodes;
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].abs().total_cmp(&nodes[b].abs()).then(nodes[a].total_cmp(&nodes[b])));
    let entries: Vec<BasisEntry> = order.iter().map(|&i| basis_coeffs(space, nodes[i])).collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(zs.len());
    let mut terms = Vec::with_capacity(nodes.len() * space.nu as usize);
    for &z in zs {
        let b_pow = b_power(space, z)?;
        terms.clear();
        for (&i, entry) in order.iter().zip(&entries) {
            let g = entry.g_values(z, b_pow);
            for (j, (gv, fv)) in g.iter().zip(&samples.values[i]).enumerate() {
                if skip != Some((i, j)) {
                    terms.push(gv * fv);
                }
            }
        }
        values.push(pairwise_sum(&terms));
    }
    let tail_count = nodes.len().div_ceil(10);
    let tail = samples.partial_square_sum(order[nodes.len() - tail_count..].iter().copied())?;
    Ok(Reconstruction {
        values,
        tail_indicator: tail,
        weighted_square_sum: samples.weighted_square_sum()?,
        window: (nodes[0], nodes[nodes.len() - 1]),
        terms: nodes.len() * space.nu as usize - usize::from(skip.is_some()),
    })
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{sinc, FnEntire};
    use crate::interpolation::{BasisFunction, BasisKind};
    use crate::kernels::{norm_and_inner, KernelFunction, NormMode};
    use crate::structure::{node_set, node_window, StructureFunction};
    use std::f64::consts::PI;

    fn pw(nu: u32) -> SpaceSpec {
        SpaceSpec::new(StructureFunction::paley_wiener(1.0).unwrap(), nu).unwrap()
    }

    fn grid() -> Vec<Complex64> {
        (0..=100).map(|k| Complex64::new(-5.0 + 0.1 * k as f64, 0.0)).collect()
    }

    #[test]
    fn squared_sinc_is_a_single_term() {
        let s = pw(2);
        let f = FnEntire::new("sinc^2", |z| Ok(sinc(z) * sinc(z)));
        let nodes = node_window(&s.sf, 1, 0.0, 20).unwrap();
        let smp = sample(&s, &f, &nodes).unwrap();
        for (t, v) in nodes.nodes.iter().zip(&smp.values) {
            let expect0 = if *t == 0.0 { 1.0 } else { 0.0 };
            assert!((v[0] - expect0).norm() < 1e-12 && v[1].norm() < 1e-10, "t={t}: {v:?}");
        }
        let r = reconstruct(&s, &smp, &grid()).unwrap();
        for (z, v) in grid().iter().zip(&r.values) {
            assert!((v - sinc(*z) * sinc(*z)).norm() < 1e-10);
        }
        assert!(r.tail_indicator < 1e-18);
    }

    #[test]
    fn derivative_basis_function_samples() {
        let s = pw(2);
        let g = BasisFunction::new(&s, PI, BasisKind::G, 1).unwrap();
        let nodes = node_set(&s.sf, 0.0, (-20.0, 20.0)).unwrap();
        let smp = sample(&s, &g, &nodes).unwrap();
        for (t, v) in nodes.nodes.iter().zip(&smp.values) {
            let e1 = if (*t - PI).abs() < 1e-12 { 1.0 } else { 0.0 };
            assert!(v[0].norm() < 1e-10 && (v[1] - e1).norm() < 1e-10);
        }
        let r = reconstruct(&s, &smp, &grid()).unwrap();
        for (z, v) in grid().iter().zip(&r.values) {
            assert!((v - g.eval(*z).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn kernel_samples_are_bounded_by_the_norm() {
        let s = pw(2);
        let k = KernelFunction {
            space: s.clone(),
            w: Complex64::i(),
        };
        let nodes = node_set(&s.sf, 0.0, (-20.5 * PI, 20.5 * PI)).unwrap();
        assert_eq!(nodes.len(), 41);
        let smp = sample(&s, &k, &nodes).unwrap();
        let norm = norm_and_inner(&s, &k, None, NormMode::Continuous, 1e-10).unwrap().value.re;
        let ratio = smp.weighted_square_sum().unwrap() / norm;
        assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
    }

    #[test]
    fn shifted_product_reconstruction_converges() {
        let s = pw(2);
        let f = FnEntire::new("F", |z: Complex64| Ok(sinc(z) * sinc(z - 1.0)));
        let mut errs = Vec::new();
        for n in [25, 50, 100, 200] {
            let nodes = node_window(&s.sf, 1, 0.0, n).unwrap();
            let smp = sample(&s, &f, &nodes).unwrap();
            let r = reconstruct(&s, &smp, &grid()).unwrap();
            let err = grid()
                .iter()
                .zip(&r.values)
                .map(|(z, v)| (v - f.eval(*z).unwrap()).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[3] < 1e-3, "{errs:?}");
        assert!(errs.windows(2).all(|w| w[1] <= 1.1 * w[0]), "{errs:?}");
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let s = pw(2);
        let f = FnEntire::new("F", |z: Complex64| Ok(sinc(z) * sinc(z - 1.0)));
        let nodes = node_window(&s.sf, 1, 0.0, 3).unwrap();
        let smp = sample(&s, &f, &nodes).unwrap();
        let mut buf = Vec::new();
        smp.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,j,value_re,value_im\n"));
        let back = SampleSet::read_csv(&s, buf.as_slice()).unwrap();
        assert_eq!(back.values, smp.values);
        assert_eq!(back.nodes.nodes, smp.nodes.nodes);

        let bad = "t,j,value_re,value_im\n0,0,1,0\n3.14,0,0,0\n3.14,1,0,0\n";
        assert!(matches!(SampleSet::read_csv(&s, bad.as_bytes()), Err(Error::Parse(_))));
        let bad = "t,j,value_re,value_im\n0,0,1,zz\n";
        assert!(matches!(SampleSet::read_csv(&s, bad.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn empty_and_mismatched_samples() {
        let s = pw(2);
        let nodes = ZeroSet {
            sf: s.sf.clone(),
            power: 1,
            residue: 0.0,
            range: (0.0, 0.0),
            nodes: vec![],
        };
        let empty = SampleSet::new(&s, nodes, vec![]).unwrap();
        assert!(matches!(reconstruct(&s, &empty, &grid()), Err(Error::Domain(_))));
        let nodes = node_window(&s.sf, 1, 0.0, 1).unwrap();
        assert!(SampleSet::new(&s, nodes, vec![vec![Complex64::default()]; 3]).is_err());
    }

    #[test]
    fn dropping_a_term_breaks_reconstruction() {
        let s = pw(2);
        let nodes = node_window(&s.sf, 1, 0.0, 10).unwrap();
        let c = nodes.center_index().unwrap();
        let g = BasisFunction::new(&s, nodes.nodes[c], BasisKind::G, 0).unwrap();
        let smp = sample(&s, &g, &nodes).unwrap();
        let near: Vec<Complex64> = (0..=20).map(|k| Complex64::new(-1.0 + 0.1 * k as f64, 0.0)).collect();
        let r = reconstruct_with(&s, &smp, &near, Some((c, 0))).unwrap();
        let worst = near
            .iter()
            .zip(&r.values)
            .map(|(z, v)| (v - g.eval(*z).unwrap()).norm())
            .fold(0.0, f64::max);
        assert!((worst - 1.0).abs() < 1e-9);
    }
}
