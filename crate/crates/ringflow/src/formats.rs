//! CSV and JSON file formats. Every floating-point value in a CSV is written
//! with 17 significant digits, so files round-trip exactly and repeated runs
//! produce identical bytes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use ringflow_core::extrap::Extrapolated;
use ringflow_core::sweep::SweepPoint;
use ringflow_core::{BackflowKernel, CurrentSeries, EigenResult, ModeAmplitudes, RingParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Shortest round-trip text, switching to exponent form outside `[1e-4, 1e6)`.
pub fn display(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

type CsvOut = csv::Writer<BufWriter<File>>;

fn create(path: &Path, comment: Option<&str>, columns: &[&str]) -> CliResult<CsvOut> {
    let file = File::create(path).map_err(|e| CliError::output(path, e))?;
    let mut w = BufWriter::new(file);
    if let Some(c) = comment {
        writeln!(w, "# {c}").map_err(|e| CliError::output(path, e))?;
    }
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    if !columns.is_empty() {
        out.write_record(columns).map_err(|e| CliError::output(path, e))?;
    }
    Ok(out)
}

fn row(out: &mut CsvOut, path: &Path, fields: &[String]) -> CliResult<()> {
    out.write_record(fields).map_err(|e| CliError::output(path, e))
}

fn close(mut out: CsvOut, path: &Path) -> CliResult<()> {
    out.flush().map_err(|e| CliError::output(path, e))
}

/// `key=value` pairs of a `# ...` header line.
pub fn parse_header(line: &str) -> BTreeMap<String, String> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Full matrix, row-major, under a `# alpha=.. beta=.. n=..` line.
pub fn write_kernel_csv(path: &Path, kernel: &BackflowKernel) -> CliResult<()> {
    let cfg = kernel.config();
    let p = cfg.params();
    let header = format!("alpha={} beta={} n={}", fmt17(p.alpha()), fmt17(p.beta()), cfg.n_trunc());
    let mut out = create(path, Some(&header), &[])?;
    for i in 0..kernel.dim() {
        let fields: Vec<String> = kernel.matrix().row(i).iter().map(|v| fmt17(*v)).collect();
        row(&mut out, path, &fields)?;
    }
    close(out, path)
}

pub fn write_state_csv(path: &Path, state: &ModeAmplitudes, lambda_min: f64) -> CliResult<()> {
    let p = state.params();
    let header = format!(
        "alpha={} beta={} n_trunc={} lambda_min={}",
        fmt17(p.alpha()),
        fmt17(p.beta()),
        state.n_trunc(),
        fmt17(lambda_min)
    );
    let mut out = create(path, Some(&header), &["m", "re", "im"])?;
    for (m, c) in state.coeffs().iter().enumerate() {
        row(&mut out, path, &[m.to_string(), fmt17(c.re), fmt17(c.im)])?;
    }
    close(out, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub state: ModeAmplitudes,
    pub lambda_min: f64,
}

pub fn read_state_csv(path: &Path) -> CliResult<StateFile> {
    let bad = |reason: String| CliError::BadInput { path: path.to_path_buf(), reason };
    let file = File::open(path).map_err(|e| CliError::MissingInput { path: path.to_path_buf(), source: e })?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| bad(e.to_string()))?;
    if !first.starts_with('#') {
        return Err(bad("missing '# alpha=.. beta=.. n_trunc=.. lambda_min=..' header".into()));
    }
    let meta = parse_header(&first);
    let num = |key: &str| -> CliResult<f64> {
        meta.get(key)
            .ok_or_else(|| bad(format!("header lacks {key}")))?
            .parse::<f64>()
            .map_err(|e| bad(format!("{key}: {e}")))
    };
    let (alpha, beta, lambda_min) = (num("alpha")?, num("beta")?, num("lambda_min")?);
    let n_trunc: usize = meta
        .get("n_trunc")
        .ok_or_else(|| bad("header lacks n_trunc".into()))?
        .parse()
        .map_err(|e| bad(format!("n_trunc: {e}")))?;

    let mut rows = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut coeffs = Vec::with_capacity(n_trunc + 1);
    for (k, rec) in rows.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(format!("row {k}: expected 3 columns")));
        let m: usize = field(0)?.trim().parse().map_err(|e| bad(format!("row {k}: {e}")))?;
        if m != k {
            return Err(bad(format!("row {k}: mode index {m} out of order")));
        }
        let re: f64 = field(1)?.trim().parse().map_err(|e| bad(format!("row {k}: {e}")))?;
        let im: f64 = field(2)?.trim().parse().map_err(|e| bad(format!("row {k}: {e}")))?;
        coeffs.push(Complex64::new(re, im));
    }
    if coeffs.len() != n_trunc + 1 {
        return Err(bad(format!("header says n_trunc={n_trunc} but {} rows follow", coeffs.len())));
    }
    let params = RingParams::new(alpha, beta)?;
    let state = ModeAmplitudes::new(coeffs, params)?;
    Ok(StateFile { state, lambda_min })
}

/// `(tau, tj)` rows; the header records theta and the integration window.
pub fn write_current_csv(
    path: &Path,
    series: &CurrentSeries,
    params: &RingParams,
    window: (f64, f64),
) -> CliResult<()> {
    let header = format!(
        "theta={} alpha={} beta={} window={},{}",
        fmt17(series.theta),
        fmt17(params.alpha()),
        fmt17(params.beta()),
        fmt17(window.0),
        fmt17(window.1)
    );
    let mut out = create(path, Some(&header), &["tau", "tj"])?;
    for (t, j) in series.tau_samples.iter().zip(&series.tj_values) {
        row(&mut out, path, &[fmt17(*t), fmt17(*j)])?;
    }
    close(out, path)
}

/// Failed points stay in place with `NaN` values.
pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> CliResult<()> {
    let mut out = create(path, None, &["alpha_over_pi", "beta", "p", "residual"])?;
    for p in points {
        let fields = match p {
            Ok(r) => [r.alpha_over_pi, r.beta, r.p_estimate, r.fit_residual],
            Err(f) => [f.alpha_over_pi, f.beta, f64::NAN, f64::NAN],
        };
        row(&mut out, path, &fields.map(fmt17))?;
    }
    close(out, path)
}

pub fn write_two_mode_curves_csv(path: &Path, rows: &[(f64, f64, f64)]) -> CliResult<()> {
    let mut out = create(path, None, &["alpha_over_pi", "beta", "p_min"])?;
    for &(a, b, p) in rows {
        row(&mut out, path, &[fmt17(a), fmt17(b), fmt17(p)])?;
    }
    close(out, path)
}

pub fn write_convergence_csv(path: &Path, rows: &[(f64, usize, f64)]) -> CliResult<()> {
    let mut out = create(path, None, &["u_max", "n_points", "lambda_min"])?;
    for &(u, n, l) in rows {
        row(&mut out, path, &[fmt17(u), n.to_string(), fmt17(l)])?;
    }
    close(out, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("records serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::output(path, e))
}

/// Extrapolation fit as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub alpha: f64,
    pub beta: f64,
    pub schedule: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub residual: f64,
}

impl From<&Extrapolated> for FitRecord {
    fn from(e: &Extrapolated) -> Self {
        Self {
            alpha: e.params.alpha(),
            beta: e.params.beta(),
            schedule: e.fit.n_values.clone(),
            lambdas: e.fit.lambda_values.clone(),
            a0: e.fit.a0,
            a1: e.fit.a1,
            a2: e.fit.a2,
            residual: e.fit.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub alpha: f64,
    pub alpha_over_pi: f64,
    pub beta: f64,
    pub shift: i64,
    pub n_trunc: usize,
    pub lambda_min: f64,
    pub residual_norm: f64,
    pub method: String,
    pub iterations: usize,
}

impl EigenRecord {
    pub fn new(params: &RingParams, r: &EigenResult) -> Self {
        Self {
            alpha: params.alpha(),
            alpha_over_pi: params.alpha_over_pi(),
            beta: params.beta(),
            shift: params.shift(),
            n_trunc: r.n_trunc,
            lambda_min: r.lambda_min,
            residual_norm: r.residual_norm,
            method: r.method.as_str().to_string(),
            iterations: r.iterations,
        }
    }
}
