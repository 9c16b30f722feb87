//! CSV formats written and read by the command-line tool.
//!
//! Reals are printed like C's `%.17g`: 17 significant digits, fixed
//! notation for decimal exponents in `[-4, 17)`, trailing zeros removed.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::sweep::SweepRow;
use crate::FourierSpectrum;

pub const SWEEP_HEADER: [&str; 9] =
    ["T", "y", "mean_square", "mean_remainder", "upper_bound", "ratio", "method", "breakpoints", "elapsed_ms"];

pub const SPECTRUM_HEADER: [&str; 2] = ["k", "c_k"];

pub const TRUNCATION_COMMENT: &str = "# l2_truncation_bound=";

/// Formats `v` as `%.17g` would.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let e_sign = if exp < 0 { '-' } else { '+' };
        let body = if frac.is_empty() { digits[..1].to_string() } else { format!("{}.{}", &digits[..1], frac) };
        return format!("{sign}{body}e{e_sign}{:02}", exp.abs());
    }

    let body = if exp >= 0 {
        let point = exp as usize + 1;
        let (int, frac) = digits.split_at(point);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("0.{zeros}{}", digits.trim_end_matches('0'))
    };
    format!("{sign}{body}")
}

/// Writes the sweep table. `elapsed_ms` is written as `0` unless `timing`
/// is set, so that identical inputs give identical files. The `error`
/// column is added only when some row failed.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow], timing: bool) -> csv::Result<()> {
    let with_error = rows.iter().any(|r| r.result.is_err());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if with_error {
        header.push("error");
    }
    w.write_record(&header)?;
    for row in rows {
        let elapsed = if timing { fmt_g17(row.elapsed_ms) } else { "0".to_string() };
        let mut rec: Vec<String> = match &row.result {
            Ok(r) => vec![
                fmt_g17(r.radius),
                fmt_g17(r.y),
                fmt_g17(r.mean_square),
                fmt_g17(r.mean_remainder),
                fmt_g17(r.upper_bound_value),
                fmt_g17(r.ratio),
                r.method.as_str().to_string(),
                r.breakpoint_count.to_string(),
                elapsed,
            ],
            Err(_) => {
                let mut v = vec![fmt_g17(row.radius), fmt_g17(row.y)];
                v.extend(std::iter::repeat_n(String::new(), 4));
                v.extend([row.integrator.as_str().to_string(), String::new(), elapsed]);
                v
            }
        };
        if with_error {
            rec.push(row.result.as_ref().err().cloned().unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// A parsed sweep row; numeric fields are empty on failed rows.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "T")]
    pub radius: f64,
    pub y: f64,
    pub mean_square: Option<f64>,
    pub mean_remainder: Option<f64>,
    pub upper_bound: Option<f64>,
    pub ratio: Option<f64>,
    pub method: String,
    pub breakpoints: Option<u64>,
    pub elapsed_ms: f64,
    #[serde(default)]
    pub error: Option<String>,
}

pub fn read_sweep_csv<R: Read>(input: R) -> csv::Result<Vec<SweepRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Writes `k,c_k` rows followed by a `# l2_truncation_bound=` comment line.
pub fn write_spectrum_csv<W: Write>(mut out: W, spectrum: &FourierSpectrum) -> csv::Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(SPECTRUM_HEADER)?;
        for (i, c) in spectrum.coeffs.iter().enumerate() {
            w.write_record([(i + 1).to_string(), fmt_g17(*c)])?;
        }
        w.flush()?;
    }
    writeln!(out, "{TRUNCATION_COMMENT}{}", fmt_g17(spectrum.l2_truncation_bound))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub coeffs: Vec<(u64, f64)>,
    pub l2_truncation_bound: Option<f64>,
}

pub fn read_spectrum_csv<R: Read>(mut input: R) -> csv::Result<SpectrumTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let l2_truncation_bound =
        text.lines().find_map(|l| l.strip_prefix(TRUNCATION_COMMENT)).and_then(|v| v.trim().parse().ok());
    let coeffs = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<csv::Result<Vec<(u64, f64)>>>()?;
    Ok(SpectrumTable { coeffs, l2_truncation_bound })
}
