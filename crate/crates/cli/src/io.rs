//! Grid input, CSV/JSON output and report flattening.

use std::io::Write;
use std::path::{Path, PathBuf};

use debranges::DiagnosticReport;
use num_complex::Complex64;

use crate::CliError;

/// Evaluation points read from a grid CSV with header `x` or `re,im`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub complex: bool,
    pub points: Vec<Complex64>,
}

pub fn read_grid(path: &Path) -> Result<Grid, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let header: Vec<String> = rd.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    let complex = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x"] => false,
        ["re", "im"] => true,
        other => return Err(bad(format!("line 1: header must be `x` or `re,im`, found `{}`", other.join(",")))),
    };
    let mut points = Vec::new();
    for record in rd.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, CliError> {
            let s = record.get(i).unwrap_or("");
            let v: f64 = s.parse().map_err(|_| bad(format!("line {line}: field `{}` is not a number: `{s}`", header[i])))?;
            if !v.is_finite() {
                return Err(bad(format!("line {line}: field `{}` is not finite", header[i])));
            }
            Ok(v)
        };
        let z = if complex { Complex64::new(field(0)?, field(1)?) } else { Complex64::new(field(0)?, 0.0) };
        points.push(z);
    }
    if points.is_empty() {
        return Err(bad("grid has no points".into()));
    }
    Ok(Grid { complex, points })
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Grid columns followed by `value_re,value_im`.
pub fn values_csv(grid: &Grid, values: &[Complex64]) -> Result<Vec<u8>, CliError> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = if grid.complex { &["re", "im", "value_re", "value_im"] } else { &["x", "value_re", "value_im"] };
    wr.write_record(header).map_err(io_err)?;
    for (z, v) in grid.points.iter().zip(values) {
        let mut row = vec![num(z.re)];
        if grid.complex {
            row.push(num(z.im));
        }
        row.push(num(v.re));
        row.push(num(v.im));
        wr.write_record(&row).map_err(io_err)?;
    }
    finish(wr)
}

/// A CSV table from a header and rows of displayable cells.
pub fn table_csv<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(header).map_err(io_err)?;
    for r in rows {
        wr.write_record(r.as_ref()).map_err(io_err)?;
    }
    finish(wr)
}

/// Flattens reports to one row per measured value:
/// `name,index,x,value,bound,relation,pass`, where `x` is the report's
/// abscissa (or the index when there is none), `bound` the bound applying to
/// that value and `pass` the verdict of the whole report.
pub fn reports_csv(reports: &[DiagnosticReport]) -> Result<Vec<u8>, CliError> {
    let mut rows = Vec::new();
    for r in reports {
        for (i, m) in r.measured.iter().enumerate() {
            let x = r.abscissa.as_ref().and_then(|a| a.get(i).copied()).unwrap_or(i as f64);
            let b = if r.bound.len() == 1 { r.bound[0] } else { r.bound.get(i).copied().unwrap_or(f64::NAN) };
            let relation = serde_json::to_value(r.relation).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            rows.push(vec![r.name.clone(), i.to_string(), num(x), num(*m), num(b), relation, r.pass.to_string()]);
        }
    }
    table_csv(&["name", "index", "x", "value", "bound", "relation", "pass"], &rows)
}

pub fn reports_json(reports: &[DiagnosticReport]) -> Result<Vec<u8>, CliError> {
    json_bytes(&reports)
}

pub fn json_bytes<T: serde::Serialize + ?Sized>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn finish(wr: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    wr.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
