//! Single-point evaluation, parameter sweeps, CSV output and plot scripts.
//!
//! Everything here is deterministic for a fixed seed: sweep points run in
//! parallel but rows are emitted in `(point, method)` order, and every Monte
//! Carlo estimate at every point uses the same seed.

use crate::blocks::{block_eigenvalues, fit_port_blocks, BlockStructure, FitDomain};
use crate::channel::{
    build_port_correlation, channel_moments, outage_threshold, pearson_eta, SystemParams,
};
use crate::error::{Error, Result};
use crate::gamma_outage::{gamma_params, outage_gamma, DEFAULT_ORDER};
use crate::gaussian::{
    fbc_from_fitted, outage_gaussian, GaussianBlockModel, DEFAULT_HERMITE_ORDER,
};
use crate::monte_carlo::{simulate_decomposition, simulate_exact};
use crate::numerics::symmetric_eigenvalues;
use crate::outage::{Method, OutageEstimate};
use rayon::prelude::*;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

/// Header of every CSV written by this module.
pub const CSV_HEADER: [&str; 12] = [
    "method",
    "K",
    "M",
    "W",
    "eps1",
    "eps2",
    "lambda_th",
    "p_out",
    "std_error",
    "trials",
    "runtime_ms",
    "seed",
];

pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// How the outage threshold is chosen at each point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThresholdMode {
    /// Mean gain `E_psi` of the point.
    #[default]
    EPsi,
    Explicit(f64),
    /// From the target rate, noise and transmit power.
    RateSnr,
}

impl ThresholdMode {
    pub fn resolve(&self, params: &SystemParams) -> Result<f64> {
        match *self {
            ThresholdMode::EPsi => Ok(channel_moments(params).mean),
            ThresholdMode::Explicit(x) => Ok(x),
            ThresholdMode::RateSnr => Ok(outage_threshold(params)),
        }
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "e-psi" | "epsi" => Ok(ThresholdMode::EPsi),
            "rate" | "rate-snr" => Ok(ThresholdMode::RateSnr),
            other => {
                let x: f64 = other.parse().map_err(|_| {
                    Error::Usage(format!(
                        "threshold must be e-psi, rate-snr or a number, got `{other}`"
                    ))
                })?;
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(Error::Usage(format!(
                        "threshold must be finite and >= 0, got {x}"
                    )));
                }
                Ok(ThresholdMode::Explicit(x))
            }
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdMode::EPsi => f.write_str("e-psi"),
            ThresholdMode::Explicit(x) => write!(f, "{x}"),
            ThresholdMode::RateSnr => f.write_str("rate-snr"),
        }
    }
}

/// Numerical knobs shared by points and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub outer_order: usize,
    pub inner_order: usize,
    pub hermite_order: usize,
    pub mc_trials: u64,
    pub seed: u64,
    pub fit: FitDomain,
    /// Fill the `runtime_ms` column. Off by default so that CSVs are
    /// byte-stable across runs.
    pub timing: bool,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            outer_order: DEFAULT_ORDER,
            inner_order: DEFAULT_ORDER,
            hermite_order: DEFAULT_HERMITE_ORDER,
            mc_trials: DEFAULT_TRIALS,
            seed: 0,
            fit: FitDomain::default(),
            timing: false,
        }
    }
}

/// Parse a comma-separated method list.
pub fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let methods = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Method>>>()?;
    if methods.is_empty() {
        return Err(Error::Usage("no methods given".into()));
    }
    Ok(methods)
}

/// The four methods a sweep compares by default.
pub fn comparison_methods() -> Vec<Method> {
    vec![
        Method::Gamma,
        Method::GaussianFbc,
        Method::GaussianVbc,
        Method::McExact,
    ]
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64() * 1e3))
}

/// Evaluate every requested method at one scenario.
pub fn run_point(
    params: &SystemParams,
    methods: &[Method],
    threshold: ThresholdMode,
    settings: &EvalSettings,
) -> Result<Vec<OutageEstimate>> {
    params.validate()?;
    if methods.is_empty() {
        return Err(Error::Usage("no methods given".into()));
    }
    let lambda_th = threshold.resolve(params)?;
    let needs_structure = methods.iter().any(|&m| m != Method::McExact);
    let structure = if needs_structure {
        Some(fit_port_blocks(params, settings.fit)?)
    } else {
        None
    };
    let moments = channel_moments(params);
    let gp = gamma_params(params);
    let fitted = || {
        structure
            .clone()
            .expect("structure fitted for analytic methods")
    };

    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        let (mut estimate, ms) = timed(|| match method {
            Method::Gamma => outage_gamma(
                params,
                &fitted(),
                lambda_th,
                settings.outer_order,
                settings.inner_order,
            ),
            Method::GaussianVbc | Method::GaussianFbc => {
                let structure = if method == Method::GaussianFbc {
                    fbc_from_fitted(&fitted())
                } else {
                    fitted()
                };
                let model = GaussianBlockModel {
                    mean: moments.mean,
                    variance: moments.variance,
                    structure,
                };
                outage_gaussian(&model, lambda_th, settings.hermite_order, method)
            }
            Method::McExact => simulate_exact(params, lambda_th, settings.mc_trials, settings.seed),
            Method::McDecomposition => {
                simulate_decomposition(&gp, &fitted(), lambda_th, settings.mc_trials, settings.seed)
            }
        })?;
        let notes = &mut estimate.diagnostics;
        notes.push(("lambda_th".into(), lambda_th.to_string()));
        notes.push(("runtime_ms".into(), format!("{ms:.3}")));
        if method != Method::McExact {
            let s = structure.as_ref().expect("structure present");
            notes.push(("fit".into(), settings.fit.to_string()));
            notes.push(("fit_error".into(), s.fit_error.to_string()));
        }
        out.push(estimate);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    K,
    M,
    W,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::K => "K",
            SweepVariable::M => "M",
            SweepVariable::W => "W",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" | "k" => Ok(SweepVariable::K),
            "M" | "m" => Ok(SweepVariable::M),
            "W" | "w" => Ok(SweepVariable::W),
            other => Err(Error::Usage(format!(
                "cannot sweep `{other}` (expected K, M or W)"
            ))),
        }
    }
}

/// Parse `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Usage(format!("bad sweep values `{text}`: {what}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(number)
            .collect(),
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(bad("need start <= stop and step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n)
                .map(|i| round_grid(start + i as f64 * step))
                .collect())
        }
        _ => Err(bad("expected start:stop:step or a comma list")),
    }
}

// keeps 0.1-style steps from printing as 0.30000000000000004
fn round_grid(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub fixed: SystemParams,
    pub methods: Vec<Method>,
    pub threshold: ThresholdMode,
}

impl SweepSpec {
    /// Outage versus the number of ports.
    pub fn ports() -> Self {
        SweepSpec {
            variable: SweepVariable::K,
            values: (2..=20).map(f64::from).collect(),
            fixed: SystemParams::new(5, 5, 1.0),
            methods: comparison_methods(),
            threshold: ThresholdMode::EPsi,
        }
    }

    /// Outage versus the number of RIS elements.
    pub fn elements(w: f64, k: usize) -> Self {
        SweepSpec {
            variable: SweepVariable::M,
            values: vec![2.0, 5.0, 10.0, 20.0, 30.0, 50.0],
            fixed: SystemParams::new(5, k, w),
            methods: comparison_methods(),
            threshold: ThresholdMode::EPsi,
        }
    }

    /// Outage versus aperture.
    pub fn apertures(m: usize, k: usize) -> Self {
        SweepSpec {
            variable: SweepVariable::W,
            values: (0..=10).map(|i| 0.5 + 0.25 * f64::from(i)).collect(),
            fixed: SystemParams::new(m, k, 1.0),
            methods: comparison_methods(),
            threshold: ThresholdMode::EPsi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Usage("sweep has no values".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Usage("sweep has no methods".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Usage(
                "sweep values must be strictly increasing".into(),
            ));
        }
        for &v in &self.values {
            let ok = match self.variable {
                SweepVariable::K | SweepVariable::M => v >= 1.0 && v.fract() == 0.0,
                SweepVariable::W => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(Error::Usage(format!(
                    "invalid {} value {v}",
                    self.variable.name()
                )));
            }
        }
        self.fixed.validate()
    }

    /// Scenario for each sweep value, in order.
    pub fn points(&self) -> Vec<SystemParams> {
        self.values
            .iter()
            .map(|&v| {
                let mut p = self.fixed;
                match self.variable {
                    SweepVariable::K => p.k = v as usize,
                    SweepVariable::M => p.m = v as usize,
                    SweepVariable::W => p.w = v,
                }
                p
            })
            .collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: SystemParams,
    pub lambda_th: f64,
    pub estimate: OutageEstimate,
}

fn rows_for(
    params: &SystemParams,
    estimates: Vec<OutageEstimate>,
    threshold: ThresholdMode,
) -> Result<Vec<SweepRow>> {
    let lambda_th = threshold.resolve(params)?;
    Ok(estimates
        .into_iter()
        .map(|estimate| SweepRow {
            params: *params,
            lambda_th,
            estimate,
        })
        .collect())
}

/// Evaluate one point as CSV rows.
pub fn point_rows(
    params: &SystemParams,
    methods: &[Method],
    threshold: ThresholdMode,
    settings: &EvalSettings,
) -> Result<Vec<SweepRow>> {
    rows_for(
        params,
        run_point(params, methods, threshold, settings)?,
        threshold,
    )
}

/// Evaluate every point of a sweep; rows come back in `(point, method)` order.
pub fn run_sweep(spec: &SweepSpec, settings: &EvalSettings) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let per_point = spec
        .points()
        .par_iter()
        .map(|p| point_rows(p, &spec.methods, spec.threshold, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write rows as CSV. `label` names the destination in error messages.
pub fn write_csv<W: Write>(
    rows: &[SweepRow],
    settings: &EvalSettings,
    sink: W,
    label: &Path,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| csv_error(label, e))?;
    for row in rows {
        let e = &row.estimate;
        let p = &row.params;
        let runtime = match (settings.timing, e.diagnostic("runtime_ms")) {
            (true, Some(ms)) => ms.to_string(),
            _ => String::new(),
        };
        let record = [
            e.method.tag().to_string(),
            p.k.to_string(),
            p.m.to_string(),
            p.w.to_string(),
            p.eps1.to_string(),
            p.eps2.to_string(),
            row.lambda_th.to_string(),
            e.p_out.to_string(),
            e.std_error.map(|s| s.to_string()).unwrap_or_default(),
            e.trials.map(|t| t.to_string()).unwrap_or_default(),
            runtime,
            settings.seed.to_string(),
        ];
        writer
            .write_record(&record)
            .map_err(|e| csv_error(label, e))?;
    }
    writer.flush().map_err(io_error(label))
}

/// Path of the plot script written next to `csv_path`.
pub fn plot_script_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep");
    csv_path.with_file_name(format!("{stem}.plot.py"))
}

/// Matplotlib script that draws `p_out` (log scale) against the swept
/// variable, one line per method.
pub fn plot_script(csv_name: &str, variable: SweepVariable) -> String {
    let x = variable.name();
    format!(
        r#"# Plot outage probability from {csv_name}; run from the directory holding the CSV.
import csv
import os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
series = {{}}
with open(os.path.join(here, "{csv_name}"), newline="") as f:
    for row in csv.DictReader(f):
        series.setdefault(row["method"], []).append((float(row["{x}"]), float(row["p_out"])))

fig, ax = plt.subplots(figsize=(6, 4.5))
for method, points in series.items():
    points.sort()
    xs = [p[0] for p in points]
    ys = [max(p[1], 1e-12) for p in points]
    ax.semilogy(xs, ys, marker="o", label=method)
ax.set_xlabel("{x}")
ax.set_ylabel("outage probability")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "{stem}.pdf"))
"#,
        stem = Path::new(csv_name)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("sweep"),
    )
}

/// Run a sweep and write the CSV plus its plot script. Returns the script path.
pub fn write_sweep(spec: &SweepSpec, settings: &EvalSettings, csv_path: &Path) -> Result<PathBuf> {
    spec.validate()?;
    let file = std::fs::File::create(csv_path).map_err(io_error(csv_path))?;
    let rows = run_sweep(spec, settings)?;
    write_csv(&rows, settings, std::io::BufWriter::new(file), csv_path)?;
    let script = plot_script_path(csv_path);
    let csv_name = csv_path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep.csv");
    std::fs::write(&script, plot_script(csv_name, spec.variable)).map_err(io_error(&script))?;
    Ok(script)
}

/// Apply `key = value` lines onto `base`. Keys are the [`SystemParams`]
/// field names (case-insensitive); `#` starts a comment.
pub fn parse_config(text: &str, base: SystemParams) -> Result<SystemParams> {
    let mut p = base;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: String| Error::Usage(format!("config line {}: {what}", n + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        let real = || {
            value
                .parse::<f64>()
                .map_err(|_| bad(format!("`{value}` is not a number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| bad(format!("`{value}` is not a positive integer")))
        };
        match key.as_str() {
            "m" => p.m = count()?,
            "k" => p.k = count()?,
            "w" => p.w = real()?,
            "eps1" => p.eps1 = real()?,
            "eps2" => p.eps2 = real()?,
            "tx_power" | "power" => p.tx_power = real()?,
            "noise_power" | "noise" => p.noise_power = real()?,
            "rate" => p.rate = real()?,
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    Ok(p)
}

/// Read and apply a config file.
pub fn load_config(path: &Path, base: SystemParams) -> Result<SystemParams> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse_config(&text, base)
}

/// Human-readable block fit: structure, floor, error and both spectra.
pub fn fit_blocks_report(
    params: &SystemParams,
    fit: FitDomain,
) -> Result<(BlockStructure, String)> {
    params.validate()?;
    if params.k < 2 {
        return Err(Error::Usage("fit-blocks needs K >= 2".into()));
    }
    let structure = fit_port_blocks(params, fit)?;
    let corr = build_port_correlation(params)?;
    let exact = symmetric_eigenvalues(&corr.omega);
    let fitted = block_eigenvalues(&structure);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# M={} K={} W={} fit={}",
        params.m, params.k, params.w, fit
    );
    let _ = writeln!(s, "D = {}", structure.num_blocks());
    let _ = writeln!(s, "d,L_d,rho_d");
    for (d, (l, r)) in structure.sizes.iter().zip(&structure.rho).enumerate() {
        let _ = writeln!(s, "{},{},{}", d + 1, l, r);
    }
    let _ = writeln!(s, "rho0 = {}", structure.rho0);
    let _ = writeln!(s, "fit_error = {}", structure.fit_error);
    let _ = writeln!(s, "eigenvalue,omega,fitted");
    for (i, (a, b)) in exact.iter().zip(&fitted).enumerate() {
        let _ = writeln!(s, "{},{:.10},{:.10}", i + 1, a, b);
    }
    Ok((structure, s))
}

/// `g,eta` table on `points` evenly spaced values of `g` in `[0, 1]`.
pub fn eta_report(params: &SystemParams, points: usize) -> Result<String> {
    params.validate()?;
    if points < 2 {
        return Err(Error::Usage("eta needs at least 2 points".into()));
    }
    let mut s = String::from("g,eta\n");
    for i in 0..points {
        let g = i as f64 / (points - 1) as f64;
        let _ = writeln!(s, "{},{}", round_grid(g), pearson_eta(g, params)?);
    }
    Ok(s)
}
