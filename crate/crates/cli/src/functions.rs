//! Function specifications accepted by `sample`:
//!
//! | spec            | function                                   |
//! |-----------------|--------------------------------------------|
//! | `sinc:P[:S]`    | `(sin(S z) / (S z))^P`, `S` defaulting to 1 |
//! | `sinc-product:A`| `sinc(z) sinc(z - A)`                      |
//! | `kernel:RE,IM`  | `K_nu(w, .)` with `w = RE + i IM`          |
//! | `g:T:J`, `b:T:J`| `G_{nu,J}(., T)`, `B_{nu,J}(., T)`         |
//! | `corpus:I`      | entry `I` of the seeded standard corpus    |

use debranges::corpus::{standard_corpus, CorpusFunction, CorpusKind};
use debranges::diagnostics::nearest_nodes;
use debranges::interpolation::{BasisFunction, BasisKind};
use debranges::kernels::SpaceSpec;
use debranges::{sinc, EntireFunction, FnEntire};
use num_complex::Complex64;

use crate::{core_err, CliError};

pub fn parse_function(spec: &str, space: &SpaceSpec, seed: u64) -> Result<Box<dyn EntireFunction>, CliError> {
    let bad = |why: &str| CliError::Config(format!("function `{spec}`: {why}"));
    let (head, rest) = spec.split_once(':').ok_or_else(|| bad("expected NAME:ARGS"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(&format!("`{s}` is not a number")));
    let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(&format!("`{s}` is not a non-negative integer")));
    match head {
        "sinc" => {
            if parts.len() > 2 {
                return Err(bad("expected sinc:P or sinc:P:S"));
            }
            let power = u32::try_from(int(parts[0])?).map_err(|_| bad("power too large"))?;
            if power == 0 {
                return Err(bad("power must be at least 1"));
            }
            let scale = parts.get(1).map(|s| num(s)).transpose()?.unwrap_or(1.0);
            Ok(Box::new(CorpusFunction {
                id: spec.to_string(),
                space: space.clone(),
                kind: CorpusKind::DilatedSinc { scale, power },
            }))
        }
        "sinc-product" => {
            let [a] = parts[..] else { return Err(bad("expected sinc-product:A")) };
            let a = num(a)?;
            Ok(Box::new(FnEntire::new(spec, move |z: Complex64| Ok(sinc(z) * sinc(z - a)))))
        }
        "kernel" => {
            let [w] = parts[..] else { return Err(bad("expected kernel:RE,IM")) };
            let (re, im) = w.split_once(',').ok_or_else(|| bad("expected kernel:RE,IM"))?;
            Ok(Box::new(CorpusFunction {
                id: spec.to_string(),
                space: space.clone(),
                kind: CorpusKind::Kernel {
                    w: Complex64::new(num(re)?, num(im)?),
                },
            }))
        }
        "g" | "b" => {
            let [t, j] = parts[..] else { return Err(bad("expected g:T:J or b:T:J")) };
            let kind = if head == "g" { BasisKind::G } else { BasisKind::B };
            Ok(Box::new(basis_function(space, num(t)?, kind, int(j)?)?))
        }
        "corpus" => {
            let [i] = parts[..] else { return Err(bad("expected corpus:I")) };
            let i = int(i)?;
            let mut corpus = standard_corpus(space, i + 1, seed).map_err(core_err)?;
            Ok(Box::new(corpus.swap_remove(i)))
        }
        _ => Err(bad("unknown function name")),
    }
}

/// The basis function at the node of `B` nearest `t`; `t` must already be a
/// node to within `1e-6` relative.
pub fn basis_function(space: &SpaceSpec, t: f64, kind: BasisKind, j: usize) -> Result<BasisFunction, CliError> {
    if j >= space.nu as usize {
        return Err(CliError::Config(format!("order j = {j} must be below nu = {}", space.nu)));
    }
    let node = nearest_nodes(space, &[t]).map_err(core_err)?[0];
    if (node - t).abs() > 1e-6 * t.abs().max(1.0) {
        return Err(CliError::Config(format!("{t} is not a node of B (nearest node {node})")));
    }
    BasisFunction::new(space, node, kind, j).map_err(core_err)
}
