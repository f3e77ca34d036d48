//! Space configuration: either a bare structure-function JSON object, or a
//! run config `{"schema": 1, "space": {...}, "nu": 2, "seed": ..., "tol": ...}`
//! whose fields serve as defaults for the command-line flags.

use std::path::Path;

use debranges::kernels::SpaceSpec;
use debranges::StructureFunction;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    schema: Option<u32>,
    space: Value,
    #[serde(default)]
    nu: Option<u32>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    window: Option<usize>,
}

/// Values from the config file, before command-line overrides.
#[derive(Debug)]
pub struct Loaded {
    pub sf: StructureFunction,
    pub nu: Option<u32>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub window: Option<usize>,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let bad = |e: String| CliError::Config(format!("{}: {e}", path.display()));
    if value.get("space").is_some() {
        let run: RunConfig = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        if let Some(s) = run.schema {
            if s != debranges::structure::SCHEMA_VERSION {
                return Err(bad(format!("unsupported schema {s}")));
            }
        }
        let sf = StructureFunction::from_json(&run.space.to_string()).map_err(|e| bad(e.to_string()))?;
        Ok(Loaded {
            sf,
            nu: run.nu,
            seed: run.seed,
            tol: run.tol,
            window: run.window,
        })
    } else {
        let sf = StructureFunction::from_json(&text).map_err(|e| bad(e.to_string()))?;
        Ok(Loaded {
            sf,
            nu: None,
            seed: None,
            tol: None,
            window: None,
        })
    }
}

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub space: SpaceSpec,
    pub seed: u64,
    pub tol: f64,
    pub window: Option<usize>,
}

pub fn resolve(loaded: Loaded, nu: Option<u32>, seed: Option<u64>, tol: Option<f64>) -> Result<Settings, CliError> {
    let nu = nu.or(loaded.nu).unwrap_or(1);
    let tol = tol.or(loaded.tol).unwrap_or(1e-10);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    if loaded.window == Some(0) {
        return Err(CliError::Config("window must be at least 1".into()));
    }
    let space = SpaceSpec::new(loaded.sf, nu).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Settings {
        space,
        seed: seed.or(loaded.seed).unwrap_or(debranges::corpus::DEFAULT_SEED),
        tol,
        window: loaded.window,
    })
}
