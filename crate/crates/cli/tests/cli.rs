use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const PW: &str = r#"{"schema":1,"family":"paley_wiener","tau":1.0,"theta":0.0}"#;
const PRODUCT: &str = r#"{"schema":1,"family":"product","a":0.5,"zeros":[[2.0,0.5],[6.0,1.0],[12.0,2.0]],"theta":0.0}"#;

fn debranges(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debranges")).args(args).output().expect("binary runs")
}

fn status(args: &[&str]) -> i32 {
    debranges(args).status.code().expect("exited normally")
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let p = self.0.path().join(name);
        std::fs::write(&p, contents).unwrap();
        p.display().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).display().to_string()
    }
}

fn read_rows(path: impl AsRef<Path>) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header = rd.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rd
        .records()
        .map(|r| r.unwrap().iter().map(|s| s.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn zeros_of_paley_wiener_are_multiples_of_pi() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let out = d.path("z.csv");
    assert_eq!(status(&["zeros", "--space", &space, "--range", "-10", "10", "--theta", "0", "--out", &out]), 0);
    let (header, rows) = read_rows(&out);
    assert_eq!(header, ["t", "phase_derivative"]);
    assert_eq!(rows.len(), 7);
    for (k, row) in (-3..=3).zip(&rows) {
        assert!((row[0] - k as f64 * std::f64::consts::PI).abs() < 1e-12, "{row:?}");
        assert!((row[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn squared_sinc_round_trips_through_samples() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let samples = d.path("s.csv");
    let grid = d.file("g.csv", "x\n-7.25\n-1\n0.5\n1.3\n2\n4.75\n9.9\n");
    let out = d.path("r.csv");
    assert_eq!(status(&["sample", "--space", &space, "--nu", "2", "--function", "sinc:2", "--window", "30", "--out", &samples]), 0);
    let (header, _) = read_rows(&samples);
    assert_eq!(header, ["t", "j", "value_re", "value_im"]);
    assert_eq!(status(&["reconstruct", "--space", &space, "--nu", "2", "--samples", &samples, "--grid", &grid, "--out", &out]), 0);
    let (header, rows) = read_rows(&out);
    assert_eq!(header, ["x", "value_re", "value_im"]);
    assert_eq!(rows.len(), 7);
    for r in rows {
        let exact = (r[0].sin() / r[0]).powi(2);
        assert!((r[1] - exact).abs() < 1e-10 && r[2].abs() < 1e-10, "{r:?} vs {exact}");
    }
}

#[test]
fn kernel_and_basis_on_complex_grids() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let grid = d.file("g.csv", "re,im\n0.5,0.25\n-2,1\n");
    let out = d.path("k.csv");
    assert_eq!(status(&["kernel", "--space", &space, "--w", "0,0", "--grid", &grid, "--out", &out]), 0);
    let (header, rows) = read_rows(&out);
    assert_eq!(header, ["re", "im", "value_re", "value_im"]);
    // K(0, z) = sin z / (pi z) for tau = 1
    for r in rows {
        let z = num_complex::Complex64::new(r[0], r[1]);
        let k = z.sin() / (std::f64::consts::PI * z);
        assert!((r[2] - k.re).abs() < 1e-12 && (r[3] - k.im).abs() < 1e-12);
    }
    // G_{1,0}(., pi) = sinc(z - pi) up to sign
    let out = d.path("b.csv");
    let grid = d.file("x.csv", "x\n0\n3.141592653589793\n");
    assert_eq!(status(&["basis", "--space", &space, "--t", "3.141592653589793", "--grid", &grid, "--out", &out]), 0);
    let (_, rows) = read_rows(&out);
    assert!(rows[0][1].abs() < 1e-14 && (rows[1][1] - 1.0).abs() < 1e-12, "{rows:?}");
    // a point off the node set is rejected
    assert_eq!(status(&["basis", "--space", &space, "--t", "1.0", "--grid", &grid]), 2);
}

#[test]
fn exit_status_matrix() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let grid = d.file("g.csv", "x\n1\n");
    let missing = d.path("missing.json");
    let unwritable = d.path("no/such/dir/out.csv");
    let bad_json = d.file("bad.json", r#"{"family":"paley_wiener","tau":"#);
    let bad_family = d.file("fam.json", r#"{"family":"airy"}"#);
    let bad_grid = d.file("bg.csv", "x\n0.5\nabc\n");
    let bad_header = d.file("bh.csv", "y\n0.5\n");
    let bad_samples = d.file("bs.csv", "t,j,value_re,value_im\n0,0,1,0\n0,5,1,0\n");
    let far = d.file("far.csv", "re,im\n0,800\n");

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["bogus"], 2),
        (vec![], 2),
        (vec!["zeros", "--range", "0", "1"], 2),
        (vec!["zeros", "--space", &missing, "--range", "0", "1"], 2),
        (vec!["zeros", "--space", &bad_json, "--range", "0", "1"], 2),
        (vec!["zeros", "--space", &bad_family, "--range", "0", "1"], 2),
        (vec!["zeros", "--space", &space, "--range", "1", "0"], 2),
        (vec!["zeros", "--space", &space, "--range", "0", "1", "--tol", "-1"], 2),
        (vec!["zeros", "--space", &space, "--range", "0", "1", "--out", &unwritable], 3),
        (vec!["zeros", "--space", &space, "--range", "0", "1"], 0),
        (vec!["kernel", "--space", &space, "--w", "0,0", "--grid", &bad_grid], 2),
        (vec!["kernel", "--space", &space, "--w", "0,0", "--grid", &bad_header], 2),
        (vec!["kernel", "--space", &space, "--w", "x", "--grid", &grid], 2),
        (vec!["kernel", "--space", &space, "--w", "0,0", "--grid", &far], 3),
        (vec!["kernel", "--space", &space, "--w", "0,0", "--grid", &grid], 0),
        (vec!["basis", "--space", &space, "--nu", "2", "--t", "0", "--j", "2", "--grid", &grid], 2),
        (vec!["sample", "--space", &space, "--function", "nope:1"], 2),
        (vec!["sample", "--space", &space, "--function", "sinc:2", "--window", "0"], 2),
        (vec!["sample", "--space", &space, "--function", "sinc:2", "--window", "3"], 0),
        (vec!["reconstruct", "--space", &space, "--nu", "2", "--samples", &bad_samples, "--grid", &grid], 2),
        (vec!["reconstruct", "--space", &space, "--samples", &missing, "--grid", &grid], 2),
        (vec!["probe-thm3", "--space", &space, "--nu", "1"], 2),
        (vec!["probe-thm3", "--space", &space, "--nu", "2", "--nodes", "2"], 0),
        (vec!["framecheck", "--space", &space, "--corpus-size", "4", "--window", "20"], 0),
        // a spread bound of 1 cannot hold for distinct ratios
        (vec!["framecheck", "--space", &space, "--corpus-size", "4", "--window", "20", "--max-spread", "1"], 1),
        // phi' = 1 everywhere, so delta = 2 violates the precondition
        (vec!["framecheck", "--space", &space, "--corpus-size", "4", "--window", "20", "--delta", "2"], 1),
    ];
    for (args, expected) in cases {
        let out = debranges(&args);
        assert_eq!(out.status.code(), Some(expected), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_inputs_report_line_and_field() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let grid = d.file("g.csv", "x\n0.5\n1.5\nabc\n");
    let out = debranges(&["kernel", "--space", &space, "--w", "0,0", "--grid", &grid]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("`x`"), "{err}");
}

#[test]
fn outputs_are_deterministic_and_record_the_seed() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let run = |tag: &str| -> (Vec<u8>, serde_json::Value) {
        let out = d.path(&format!("f{tag}.csv"));
        let summary = d.path(&format!("s{tag}.json"));
        let args = [
            "framecheck", "--space", &space, "--nu", "2", "--seed", "99", "--corpus-size", "5", "--window", "20", "--out", &out, "--summary", &summary,
        ];
        assert_eq!(status(&args), 0);
        let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
        (std::fs::read(out).unwrap(), s)
    };
    let (a, sa) = run("a");
    let (b, sb) = run("b");
    assert_eq!(a, b);
    assert_eq!(sa["seed"], 99);
    assert_eq!(sa["details"], sb["details"]);
    let (header, rows) = read_rows(d.path("fa.csv"));
    assert_eq!(header, ["id", "r_D", "r_G"]);
    assert_eq!(rows.len(), 5);
}

#[test]
fn run_config_supplies_defaults_and_space_round_trips() {
    let d = Dir::new();
    let config = d.file("run.json", &format!(r#"{{"schema":1,"space":{PRODUCT},"nu":2,"seed":7}}"#));
    let summary = d.path("s.json");
    let out = d.path("p.csv");
    assert_eq!(status(&["probe-thm3", "--space", &config, "--out", &out, "--summary", &summary]), 0);
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["nu"], 2);
    assert_eq!(s["seed"], 7);
    let space = debranges::StructureFunction::from_json(&s["space"].to_string()).unwrap();
    assert_eq!(space.to_json(), PRODUCT);

    // rho follows phi'^{2 nu - 2} and decreases along the nodes
    let (header, rows) = read_rows(&out);
    assert_eq!(header, ["t", "rho", "phase_deriv_pow"]);
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1][1] < w[0][1]);
    }
    // unknown config fields are rejected
    let bad = d.file("bad.json", &format!(r#"{{"space":{PRODUCT},"nu":2,"colour":1}}"#));
    assert_eq!(status(&["probe-thm3", "--space", &bad]), 2);
}

#[test]
fn verify_passes_on_paley_wiener_nu_two() {
    let d = Dir::new();
    let space = d.file("pw.json", PW);
    let out = d.path("v.json");
    assert_eq!(status(&["verify", "--space", &space, "--nu", "2", "--out", &out]), 0);
    let reports: Vec<debranges::DiagnosticReport> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!reports.is_empty());
    for r in &reports {
        assert!(r.pass && r.recheck(), "{}", r.name);
    }
    let csv = d.path("v.csv");
    let args = ["verify", "--space", &space, "--nu", "2", "--format", "csv", "--out", &csv];
    assert_eq!(status(&args), 0);
    let (header, rows) = read_rows(&csv);
    assert_eq!(header, ["name", "index", "x", "value", "bound", "relation", "pass"]);
    assert_eq!(rows.len(), reports.iter().map(|r| r.measured.len()).sum::<usize>());
}
