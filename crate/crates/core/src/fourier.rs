//! Cosine expansion of the sawtooth sum `H_T(x + iy)` in the shear parameter.
//!
//! Expanding `s(t) = Σ_{n≥1} sin(2πnt)/(πn)` in each row gives
//!
//! ```text
//! H_T(x + iy) = (4/π) Σ_{0<m<T/√y} Σ_{n≥1} sin(2πn g_m) cos(2πmn x) / n
//!             = Σ_{k≥1} c_k cos(2πk x),
//! c_k = (4/π) Σ_{mn=k} sin(2πn g_m) / n,
//! ```
//!
//! a divisor sum over the admissible rows `m`. Orthogonality of distinct
//! frequencies gives `∫₀¹ H² dx = ½ Σ c_k²`.
//!
//! Only pairs with `n ≤ n_max` and `mn ≤ k_max` are kept. The discarded part
//! is bounded in `L²(dx)` by [`FourierSpectrum::l2_truncation_bound`], which
//! accounts for discarded terms of different rows sharing a frequency.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::lattice::half_chords;
use crate::{check_height, check_radius, invalid, NeumaierSum, Result, ShearPoint};

const BLOCK: u64 = 1 << 16;
/// Above this many rows the pairwise overlap bound is skipped and only the
/// row-wise triangle bound is used.
const PAIRWISE_LIMIT: usize = 4096;
/// Caps the work `n_max · rows` chosen by [`default_n_max`].
const DEFAULT_WORK_CAP: u64 = 100_000_000;
const COEFF_SCALE: f64 = 4.0 / PI;

/// Cosine coefficients `c_1, …, c_{k_max}` of `H_T` in `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSpectrum {
    pub k_max: u64,
    pub n_max: u64,
    /// `coeffs[k - 1] = c_k`.
    pub coeffs: Vec<f64>,
    /// Upper bound on the `L²(0, 1)` norm of the discarded pairs.
    pub l2_truncation_bound: f64,
}

/// Parseval evaluation of `∫₀¹ H_T(x + iy)² dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalResult {
    /// `½ Σ_{k ≤ k_max} c_k²`.
    pub value: f64,
    /// Bound on `|∫₀¹ H² dx − value|`.
    pub error_bound: f64,
    pub l2_truncation_bound: f64,
    pub k_max: u64,
    pub n_max: u64,
}

fn check_inputs(y: f64, radius: f64) -> Result<f64> {
    check_height(y)?;
    let sqrt_y = y.sqrt();
    check_radius(sqrt_y, radius)?;
    Ok(sqrt_y)
}

/// Fractional parts `{g_m}`; only these enter `sin(2πn g_m)`.
fn row_phases(sqrt_y: f64, radius: f64) -> Vec<f64> {
    half_chords(sqrt_y, radius).into_iter().map(|g| g - g.floor()).collect()
}

#[inline]
fn sin_turns(t: f64) -> f64 {
    (TAU * (t - t.floor())).sin()
}

/// Adds `Σ_{m, n ≤ n_max, mn = k} sin(2πn g_m)/n` into `buf[k - k0]` for
/// `k0 ≤ k < k0 + buf.len()`. Each coefficient receives its terms in
/// increasing `m`, whatever the block layout.
fn accumulate_block(phases: &[f64], n_max: u64, k0: u64, buf: &mut [f64]) {
    let k_last = k0 + buf.len() as u64 - 1;
    for (i, &theta) in phases.iter().enumerate() {
        let m = i as u64 + 1;
        let n_lo = k0.div_ceil(m).max(1);
        let n_hi = n_max.min(k_last / m);
        for n in n_lo..=n_hi {
            buf[(m * n - k0) as usize] += sin_turns(n as f64 * theta) / n as f64;
        }
    }
}

/// `Σ_{n>N} 1/n² < 1/(N + ½)`, from convexity of `1/x²`.
#[inline]
fn inverse_square_tail(after: u64) -> f64 {
    1.0 / (after as f64 + 0.5)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `L²` bound on `D = Σ_m D_m`, `D_m = (4/π) Σ_{n > N_m} sin(2πn g_m) cos(2πmn x)/n`,
/// where `N_m = min(n_max, ⌊k_max/m⌋)`.
///
/// Two bounds are computed and the smaller is returned:
/// the triangle inequality `Σ_m ‖D_m‖`, and `‖D‖² ≤ Σ_{m,m'} |⟨D_m, D_m'⟩|`,
/// where rows `m ≠ m'` only interact on multiples `jL` of `L = lcm(m, m')`
/// above both truncation points, giving
/// `|⟨D_m, D_m'⟩| ≤ ½(16/π²)(mm'/L²) Σ_{j > J} 1/j²`.
pub fn truncation_l2_bound(rows: usize, k_max: u64, n_max: u64) -> f64 {
    let cut = |m: u64| n_max.min(k_max / m);
    let scale = COEFF_SCALE * COEFF_SCALE;

    let triangle: f64 = (1..=rows as u64)
        .map(|m| COEFF_SCALE * (0.5 * inverse_square_tail(cut(m))).sqrt())
        .collect::<NeumaierSum>()
        .value();
    if rows > PAIRWISE_LIMIT {
        return triangle;
    }

    let mut sq = NeumaierSum::new();
    for m in 1..=rows as u64 {
        let top_m = m * cut(m);
        sq += 0.5 * scale * inverse_square_tail(cut(m));
        for m2 in (m + 1)..=rows as u64 {
            let g = gcd(m, m2);
            let lcm = m / g * m2;
            let threshold = top_m.max(m2 * cut(m2));
            // |a_{m,n}| ≤ (4/π) m/(jL) at frequency jL
            let overlap = 0.5 * scale * (g as f64 / lcm as f64) * inverse_square_tail(threshold / lcm);
            sq += 2.0 * overlap;
        }
    }
    triangle.min(sq.value().max(0.0).sqrt())
}

/// Divisor-sum coefficients `c_1, …, c_{k_max}` keeping `n ≤ n_max`.
pub fn spectrum(y: f64, radius: f64, k_max: u64, n_max: u64) -> Result<FourierSpectrum> {
    let sqrt_y = check_inputs(y, radius)?;
    if k_max == 0 || n_max == 0 {
        return Err(invalid("k_max and n_max must be at least 1"));
    }
    let phases = row_phases(sqrt_y, radius);
    let len = usize::try_from(k_max).map_err(|_| invalid("k_max too large"))?;
    let mut coeffs = vec![0.0; len];
    accumulate_block(&phases, n_max, 1, &mut coeffs);
    coeffs.iter_mut().for_each(|c| *c *= COEFF_SCALE);
    let l2_truncation_bound = if phases.is_empty() { 0.0 } else { truncation_l2_bound(phases.len(), k_max, n_max) };
    Ok(FourierSpectrum { k_max, n_max, coeffs, l2_truncation_bound })
}

/// `½ Σ_{k ≤ k_max} c_k²`, accumulated block by block without storing the
/// spectrum. `k_max = None` keeps every pair with `n ≤ n_max`.
///
/// If `‖H − H_N‖ ≤ δ` then `|‖H‖² − ‖H_N‖²| ≤ δ(2‖H_N‖ + δ)`, which is the
/// reported `error_bound`.
pub fn parseval_meansquare(y: f64, radius: f64, k_max: Option<u64>, n_max: u64) -> Result<ParsevalResult> {
    let sqrt_y = check_inputs(y, radius)?;
    if n_max == 0 || k_max == Some(0) {
        return Err(invalid("k_max and n_max must be at least 1"));
    }
    let phases = row_phases(sqrt_y, radius);
    let rows = phases.len() as u64;
    let k_max = k_max.unwrap_or(n_max.saturating_mul(rows.max(1)));
    if rows == 0 {
        return Ok(ParsevalResult { value: 0.0, error_bound: 0.0, l2_truncation_bound: 0.0, k_max, n_max });
    }

    let k_stop = k_max.min(n_max.saturating_mul(rows));
    let mut buf = vec![0.0; BLOCK as usize];
    let mut acc = NeumaierSum::new();
    let mut k0 = 1;
    while k0 <= k_stop {
        let len = BLOCK.min(k_stop - k0 + 1) as usize;
        let block = &mut buf[..len];
        block.fill(0.0);
        accumulate_block(&phases, n_max, k0, block);
        for &c in block.iter() {
            let c = COEFF_SCALE * c;
            acc += 0.5 * c * c;
        }
        k0 += len as u64;
    }
    let value = acc.value();
    let delta = truncation_l2_bound(phases.len(), k_max, n_max);
    let error_bound = delta * (2.0 * value.sqrt() + delta);
    Ok(ParsevalResult { value, error_bound, l2_truncation_bound: delta, k_max, n_max })
}

/// Doubles `n_max` from 64 until `error_bound ≤ rel_tol·value` (or
/// `error_bound ≤ abs_floor`), stopping at `n_max_limit`.
pub fn parseval_to_tolerance(
    y: f64,
    radius: f64,
    rel_tol: f64,
    abs_floor: f64,
    n_max_limit: u64,
) -> Result<ParsevalResult> {
    let mut n_max = 64u64.min(n_max_limit.max(1));
    loop {
        let r = parseval_meansquare(y, radius, None, n_max)?;
        if r.error_bound <= rel_tol * r.value || r.error_bound <= abs_floor || n_max >= n_max_limit {
            return Ok(r);
        }
        n_max = (2 * n_max).min(n_max_limit);
    }
}

/// Smallest power of two `n_max` whose truncation bound is at most 0.1% of
/// the certificate at `A = max(2, ⌊T/√y⌋)`, subject to a work cap.
pub fn default_n_max(y: f64, radius: f64) -> Result<u64> {
    let sqrt_y = check_inputs(y, radius)?;
    let rows = half_chords(sqrt_y, radius).len() as u64;
    if rows == 0 {
        return Ok(1);
    }
    let a = ((radius / sqrt_y).floor() as u64).max(2);
    let target = 1e-3 * certificate(y, radius, a)?;
    let cap = (DEFAULT_WORK_CAP / rows).max(16);
    let mut n_max = 16u64;
    while n_max < cap && truncation_l2_bound(rows as usize, n_max * rows, n_max) > target {
        n_max *= 2;
    }
    Ok(n_max.min(cap))
}

/// `(4/π) Σ_m Σ_{n ≤ n_max} sin(2πn g_m) cos(2πmn x)/n` at one point.
pub fn h_truncated(z: ShearPoint, radius: f64, n_max: u64) -> Result<f64> {
    let sqrt_y = check_inputs(z.y(), radius)?;
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    let mut acc = NeumaierSum::new();
    for (i, theta) in row_phases(sqrt_y, radius).into_iter().enumerate() {
        let mx = (i + 1) as f64 * z.x();
        let mx = mx - mx.floor();
        for n in 1..=n_max {
            let nf = n as f64;
            let freq = nf * mx;
            acc += sin_turns(nf * theta) * (TAU * (freq - freq.floor())).cos() / nf;
        }
    }
    Ok(COEFF_SCALE * acc.value())
}

/// Explicit upper bound for `∫₀¹ H_T(x + iy)² dx`, valid for every `A ≥ 2`.
///
/// Splitting the `n`-sum at `A` and applying Cauchy–Schwarz to each half
/// (over `n` with weights `1/n` below `A`, over the rows above) gives
///
/// ```text
/// C = 2(16/π²) [ H_A Σ_{n≤A} (1/n) ½Σ_m sin²(2πn g_m)
///              + (T/√y) Σ_m ½ Σ_{n>A} sin²(2πn g_m)/n² ]
/// ```
///
/// with `H_A` the harmonic number. The `n > A` sums are evaluated to `10A`
/// and closed with `Σ_{n>10A} 1/n² < 1/(10A)`.
pub fn certificate(y: f64, radius: f64, a: u64) -> Result<f64> {
    let sqrt_y = check_inputs(y, radius)?;
    if a < 2 {
        return Err(invalid(format!("certificate needs A >= 2, got {a}")));
    }
    let phases = row_phases(sqrt_y, radius);
    if phases.is_empty() {
        return Ok(0.0);
    }
    let sin2 = |n: u64, theta: f64| {
        let s = sin_turns(n as f64 * theta);
        s * s
    };

    let mut harmonic = NeumaierSum::new();
    let mut low = NeumaierSum::new();
    for n in 1..=a {
        let inv = 1.0 / n as f64;
        harmonic += inv;
        let row_sum: NeumaierSum = phases.iter().map(|&t| sin2(n, t)).collect();
        low += inv * 0.5 * row_sum.value();
    }

    let far = 10 * a;
    let mut high = NeumaierSum::new();
    for &theta in &phases {
        let mut tail = NeumaierSum::new();
        for n in (a + 1)..=far {
            let nf = n as f64;
            tail += sin2(n, theta) / (nf * nf);
        }
        tail += 1.0 / far as f64;
        high += 0.5 * tail.value();
    }

    let scaled = radius / sqrt_y;
    Ok(2.0 * COEFF_SCALE * COEFF_SCALE * (harmonic.value() * low.value() + scaled * high.value()))
}
