use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use shearcount::csvio::{write_spectrum_csv, write_sweep_csv};
use shearcount::fourier::spectrum as compute_spectrum;
use shearcount::stats::{meansquare_parseval, DEFAULT_GRID_POINTS};
use shearcount::sweep::{evaluate, sweep as run_sweep, Integrator, SweepConfig, SweepRow};
use shearcount::{formula, CountMethod, Error, ShearPoint, DEFAULT_TIE_EPS};

use crate::{EXIT_OK, EXIT_RANGE, EXIT_TIES, EXIT_USAGE};

pub(crate) fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

pub(crate) fn finite_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn nonnegative_real(s: &str) -> Result<f64, String> {
    let v = finite_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err("must be nonnegative".into())
    }
}

/// Prints a library error and maps it to an exit code.
pub(crate) fn report_error(e: &Error, hint: Option<&str>) -> u8 {
    eprintln!("error: {e}");
    match e {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::RangeExceeded(_) => {
            if let Some(h) = hint {
                eprintln!("hint: {h}");
            }
            EXIT_RANGE
        }
    }
}

const GRID_HINT: &str = "rerun with --integrator grid";

/// Opens the destination before any computation so a bad path fails fast.
fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>, u8> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => File::create(p).map(|f| Box::new(f) as Box<dyn Write>).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            EXIT_USAGE
        }),
    }
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> u8 {
    match out.write_all(bytes).and_then(|_| out.flush()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: write failed: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum MethodArg {
    Enumerate,
    Rowslice,
    Formula,
}

impl From<MethodArg> for CountMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Enumerate => CountMethod::Enumerate,
            MethodArg::Rowslice => CountMethod::Rowslice,
            MethodArg::Formula => CountMethod::Formula,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub(crate) struct CountArgs {
    /// Shear parameter x.
    #[arg(long, default_value_t = 0.0, value_parser = finite_real)]
    x: f64,
    /// Height y > 0.
    #[arg(long, value_parser = positive_real)]
    y: f64,
    /// Radius T > 0.
    #[arg(long, value_parser = positive_real)]
    radius: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Rowslice)]
    method: MethodArg,
    /// Relative tolerance for flagging boundary ties.
    #[arg(long, default_value_t = DEFAULT_TIE_EPS, value_parser = nonnegative_real)]
    eps: f64,
    /// Print a JSON object instead of the bare count.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct CountJson {
    count: u64,
    remainder: f64,
    ties: u64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn tie_warning(ties: u64) -> String {
    format!("{ties} boundary test(s) within tolerance; the strict count may depend on rounding")
}

pub(crate) fn count(a: CountArgs) -> u8 {
    let z = match ShearPoint::new(a.x, a.y) {
        Ok(z) => z,
        Err(e) => return report_error(&e, None),
    };
    let c = match formula::count(z, a.radius, a.method.into(), a.eps) {
        Ok(c) => c,
        Err(e) => return report_error(&e, None),
    };
    let warning = (c.ties > 0).then(|| tie_warning(c.ties));
    if a.json {
        let j = CountJson {
            count: c.count,
            remainder: c.count as f64 - PI * a.radius * a.radius,
            ties: c.ties,
            method: c.method.as_str(),
            warning: warning.clone(),
        };
        println!("{}", serde_json::to_string(&j).expect("plain struct serializes"));
    } else {
        println!("{}", c.count);
        if let Some(w) = &warning {
            eprintln!("warning: {w}");
        }
    }
    if warning.is_some() {
        EXIT_TIES
    } else {
        EXIT_OK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum MeansquareIntegrator {
    Breakpoints,
    Grid,
    Parseval,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub(crate) struct MeansquareArgs {
    #[arg(long, value_parser = positive_real)]
    y: f64,
    #[arg(long, value_parser = positive_real)]
    radius: f64,
    #[arg(long, value_enum, default_value_t = MeansquareIntegrator::Breakpoints)]
    integrator: MeansquareIntegrator,
    /// Midpoint nodes for the grid integrator [default: 65536].
    #[arg(long, value_parser = clap::value_parser!(u64).range(16..))]
    grid_points: Option<u64>,
    /// Highest frequency kept by the parseval integrator.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    kmax: Option<u64>,
    /// Sawtooth terms per row for the parseval integrator.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nmax: Option<u64>,
    /// Record wall time in the elapsed_ms column.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn meansquare(a: MeansquareArgs) -> u8 {
    use MeansquareIntegrator as I;
    if a.grid_points.is_some() && a.integrator != I::Grid {
        eprintln!("error: --grid-points applies only to --integrator grid");
        return EXIT_USAGE;
    }
    if (a.kmax.is_some() || a.nmax.is_some()) && a.integrator != I::Parseval {
        eprintln!("error: --kmax and --nmax apply only to --integrator parseval");
        return EXIT_USAGE;
    }
    let mut out = match open_out(a.out.as_ref()) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let grid_points = a.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    let integrator = match a.integrator {
        I::Breakpoints => Integrator::Breakpoints,
        I::Grid => Integrator::Grid,
        I::Parseval => Integrator::Parseval,
    };
    let start = Instant::now();
    let result = match a.integrator {
        I::Parseval => meansquare_parseval(a.y, a.radius, a.kmax, a.nmax),
        _ => evaluate(a.y, a.radius, integrator, grid_points),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = match result {
        Ok(r) => r,
        Err(e) => return report_error(&e, Some(GRID_HINT)),
    };
    let row = SweepRow { y: a.y, radius: a.radius, integrator, result: Ok(report), elapsed_ms, range_exceeded: false };
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, std::slice::from_ref(&row), a.timing).expect("writing to memory");
    emit(&mut out, &buf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum SweepIntegrator {
    Auto,
    Breakpoints,
    Grid,
    Parseval,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub(crate) struct SweepArgs {
    /// Heights, comma separated or repeated.
    #[arg(long = "y", required = true, value_delimiter = ',', value_parser = positive_real)]
    y_values: Vec<f64>,
    #[arg(long, value_parser = positive_real)]
    radius_min: f64,
    #[arg(long, value_parser = positive_real)]
    radius_max: f64,
    /// Radii per height, endpoints included.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Space the radii logarithmically.
    #[arg(long)]
    log: bool,
    /// `auto` sweeps breakpoints while the event count allows, the grid beyond.
    #[arg(long, value_enum, default_value_t = SweepIntegrator::Auto)]
    integrator: SweepIntegrator,
    #[arg(long, value_parser = clap::value_parser!(u64).range(16..))]
    grid_points: Option<u64>,
    /// Record wall time in the elapsed_ms column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

pub(crate) fn sweep(a: SweepArgs) -> u8 {
    use SweepIntegrator as I;
    if a.grid_points.is_some() && !matches!(a.integrator, I::Grid | I::Auto) {
        eprintln!("error: --grid-points applies only to --integrator grid or auto");
        return EXIT_USAGE;
    }
    let config = SweepConfig {
        y_values: a.y_values,
        radius_min: a.radius_min,
        radius_max: a.radius_max,
        samples: a.samples,
        log_spaced: a.log,
        integrator: match a.integrator {
            I::Auto => Integrator::Auto,
            I::Breakpoints => Integrator::Breakpoints,
            I::Grid => Integrator::Grid,
            I::Parseval => Integrator::Parseval,
        },
        grid_points: a.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
    };
    if let Err(e) = config.validate() {
        return report_error(&e, None);
    }
    let mut out = match open_out(Some(&a.out)) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let rows = match run_sweep(&config) {
        Ok(r) => r,
        Err(e) => return report_error(&e, None),
    };
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows, a.timing).expect("writing to memory");
    let code = emit(&mut out, &buf);
    if code != EXIT_OK {
        return code;
    }

    let failed: Vec<&SweepRow> = rows.iter().filter(|r| r.result.is_err()).collect();
    for r in &failed {
        eprintln!("warning: y = {}, T = {}: {}", r.y, r.radius, r.result.as_ref().unwrap_err());
    }
    if failed.is_empty() || failed.len() < rows.len() {
        EXIT_OK
    } else if failed.iter().any(|r| r.range_exceeded) {
        eprintln!("hint: {GRID_HINT}");
        EXIT_RANGE
    } else {
        EXIT_USAGE
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub(crate) struct SpectrumArgs {
    #[arg(long, value_parser = positive_real)]
    y: f64,
    #[arg(long, value_parser = positive_real)]
    radius: f64,
    /// Number of coefficients c_1, ..., c_kmax.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    kmax: u64,
    /// Sawtooth terms per row [default: kmax].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nmax: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn spectrum(a: SpectrumArgs) -> u8 {
    let mut out = match open_out(a.out.as_ref()) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let s = match compute_spectrum(a.y, a.radius, a.kmax, a.nmax.unwrap_or(a.kmax)) {
        Ok(s) => s,
        Err(e) => return report_error(&e, None),
    };
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &s).expect("writing to memory");
    emit(&mut out, &buf)
}
