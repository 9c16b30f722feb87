//! Averages of the remainder over the shear parameter `x ∈ [0, 1)`.
//!
//! As a function of `x` the count `N_{Λ_{x+iy}}(T)` is piecewise constant.
//! Row `m ≠ 0` loses a point whenever `g_m − mx` crosses an integer and gains
//! one whenever `−g_m − mx` does; rows `m` and `−m` jump at the same places.
//! [`breakpoints`] lists every jump with its signed size, after which the
//! mean and mean square of any function of the count are finite sums over the
//! intervals between jumps ([`meansquare_exact`]).
//!
//! The closed form [`mean_remainder_closed`] follows from each row `m ≠ 0`
//! averaging to `2g_m` over a period.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{axis_correction, decompose, p_sum};
use crate::fourier::{default_n_max, parseval_meansquare};
use crate::lattice::{count_rowslice, half_chords, ShearPoint};
use crate::{check_height, check_radius, invalid, Error, NeumaierSum, Result, DEFAULT_TIE_EPS};

/// Largest number of jump events a sweep will materialize.
pub const MAX_EVENTS: u64 = 100_000_000;

/// Default node count for [`meansquare_grid`] fallbacks.
pub const DEFAULT_GRID_POINTS: u64 = 1 << 16;

/// Empirical ceiling for `mean_square / upper_bound_value`.
///
/// Measured by breakpoint sweeps over 400 log-spaced radii in `[10, 2000]`
/// at each of `y = 1, 2, 5`: the largest ratio was 1.29917 at `y = 5`,
/// `T ≈ 13.39`. Beyond `T = 500` no ratio exceeded 0.59.
pub const EMPIRICAL_RATIO_SUP: f64 = 1.3;

/// Jump locations are merged when they agree after rounding to this grid.
const MERGE_QUANTUM: f64 = 1e-13;

/// A jump of the count at shear `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub x: f64,
    pub delta: i64,
}

/// All jumps of `x ↦ N_{Λ_{x+iy}}(T)` over one period.
///
/// Locations lie in `(0, 1]`; a jump at `x = 0` is stored at `x = 1`.
/// `base_count` is the count just to the right of `x = 0`, and the count on
/// `(x_i, x_{i+1})` is `base_count + Σ_{j ≤ i} delta_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakpointSweep {
    pub y: f64,
    pub radius: f64,
    pub points: Vec<Breakpoint>,
    pub base_count: u64,
}

impl BreakpointSweep {
    /// Count at a shear `x` that is not a jump location.
    pub fn count_at(&self, x: f64) -> i64 {
        let mut u = x - x.floor();
        if u == 0.0 {
            u = 1.0;
        }
        let before = self.points.partition_point(|p| p.x < u);
        self.base_count as i64 + self.points[..before].iter().map(|p| p.delta).sum::<i64>()
    }

    pub fn total_delta(&self) -> i64 {
        self.points.iter().map(|p| p.delta).sum()
    }
}

/// Which integrator produced a [`MeanSquareReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationMethod {
    Breakpoints,
    Grid,
    ParsevalAssembled,
}

impl IntegrationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntegrationMethod::Breakpoints => "breakpoints",
            IntegrationMethod::Grid => "grid",
            IntegrationMethod::ParsevalAssembled => "parseval-assembled",
        }
    }
}

impl std::fmt::Display for IntegrationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IntegrationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "breakpoints" => Ok(IntegrationMethod::Breakpoints),
            "grid" => Ok(IntegrationMethod::Grid),
            "parseval-assembled" | "parseval" => Ok(IntegrationMethod::ParsevalAssembled),
            other => Err(invalid(format!("unknown integration method {other:?}"))),
        }
    }
}

/// Mean and mean square of the remainder over one shear period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSquareReport {
    pub y: f64,
    pub radius: f64,
    /// `∫₀¹ R dx`.
    pub mean_remainder: f64,
    /// `∫₀¹ R² dx`.
    pub mean_square: f64,
    pub method: IntegrationMethod,
    /// Bound on the numerical error of `mean_square`; zero for the grid,
    /// whose error is only estimated by comparing resolutions.
    pub error_bound: f64,
    /// `(T/√y)·max(1, log(T/√y))² + y^{3/2} T`.
    pub upper_bound_value: f64,
    /// `mean_square / upper_bound_value`.
    pub ratio: f64,
    /// Number of jump events swept (zero for the other integrators).
    pub breakpoint_count: u64,
}

/// First two moments of `count − center` over a period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub mean_square: f64,
    pub mean_error: f64,
    pub mean_square_error: f64,
}

fn check_inputs(y: f64, radius: f64) -> Result<f64> {
    check_height(y)?;
    let sqrt_y = y.sqrt();
    check_radius(sqrt_y, radius)?;
    Ok(sqrt_y)
}

/// Upper bound for the number of jump events, `4 Σ_{m ≤ M} m`.
pub fn projected_events(y: f64, radius: f64) -> u64 {
    let rows = (radius / y.sqrt()).ceil().max(0.0);
    (2.0 * rows * (rows + 1.0)).min(u64::MAX as f64) as u64
}

/// `(T/√y)·max(1, log(T/√y))² + y^{3/2}·T`.
pub fn upper_bound_value(y: f64, radius: f64) -> f64 {
    let scaled = radius / y.sqrt();
    let log = scaled.ln().max(1.0);
    scaled * log * log + y.powf(1.5) * radius
}

/// Every jump of the count in `x ∈ (0, 1]`.
///
/// For row `m ≥ 1` with half chord `g`, rows `±m` together drop by two at
/// `x = ({g} + i)/m` and gain two at `x = ({−g} + i)/m`, `i = 0, …, m − 1`.
pub fn breakpoints(y: f64, radius: f64) -> Result<BreakpointSweep> {
    let sqrt_y = check_inputs(y, radius)?;
    let projected = projected_events(y, radius);
    if projected > MAX_EVENTS {
        return Err(Error::RangeExceeded(format!(
            "about {projected} breakpoints projected, more than the limit {MAX_EVENTS}; use the grid integrator"
        )));
    }
    let chords = half_chords(sqrt_y, radius);

    let g0 = sqrt_y * radius;
    let mut base = 2 * g0.ceil() as u64 - 1;
    let mut raw: Vec<Breakpoint> = Vec::with_capacity(projected as usize);
    for (i, &g) in chords.iter().enumerate() {
        let m = (i + 1) as u64;
        base += 2 * (g.floor() as u64 + g.ceil() as u64);
        let exit = g - g.floor();
        let enter = -g - (-g).floor();
        let mf = m as f64;
        for j in 0..m {
            let jf = j as f64;
            raw.push(Breakpoint { x: wrap((exit + jf) / mf), delta: -2 });
            raw.push(Breakpoint { x: wrap((enter + jf) / mf), delta: 2 });
        }
    }
    raw.sort_unstable_by(|a, b| a.x.total_cmp(&b.x).then(a.delta.cmp(&b.delta)));

    let mut points: Vec<Breakpoint> = Vec::with_capacity(raw.len());
    let mut current_key = i64::MIN;
    for p in raw {
        let key = (p.x / MERGE_QUANTUM).round() as i64;
        match points.last_mut() {
            Some(last) if key == current_key => last.delta += p.delta,
            _ => {
                points.push(p);
                current_key = key;
            }
        }
    }
    points.retain(|p| p.delta != 0);
    Ok(BreakpointSweep { y, radius, points, base_count: base })
}

#[inline]
fn wrap(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        x
    }
}

/// Integrates `count − center` and its square over the intervals of a sweep.
///
/// The error estimates combine compensated-summation rounding with the
/// uncertainty of each jump location, about `2ε(√y·T + 2)`.
pub fn sweep_moments(sweep: &BreakpointSweep, center: f64) -> Moments {
    let eps = f64::EPSILON;
    let dx = 2.0 * eps * (sweep.y.sqrt() * sweep.radius + 2.0);
    let mut sum1 = NeumaierSum::new();
    let mut sum2 = NeumaierSum::new();
    let mut abs1 = 0.0;
    let mut abs2 = 0.0;
    let mut shift1 = 0.0;
    let mut shift2 = 0.0;

    let mut count = sweep.base_count as i64;
    let mut prev = 0.0;
    for p in &sweep.points {
        let r = count as f64 - center;
        let len = p.x - prev;
        sum1 += len * r;
        sum2 += len * r * r;
        abs1 += (len * r).abs();
        abs2 += len * r * r;
        let next = r + p.delta as f64;
        shift1 += dx * p.delta.unsigned_abs() as f64;
        shift2 += dx * (next * next - r * r).abs();
        count += p.delta;
        prev = p.x;
    }
    let r = count as f64 - center;
    let len = 1.0 - prev;
    sum1 += len * r;
    sum2 += len * r * r;
    abs1 += (len * r).abs();
    abs2 += len * r * r;
    debug_assert_eq!(count, sweep.base_count as i64);

    Moments {
        mean: sum1.value(),
        mean_square: sum2.value(),
        mean_error: 4.0 * eps * abs1 + shift1,
        mean_square_error: 4.0 * eps * abs2 + shift2,
    }
}

fn report(
    y: f64,
    radius: f64,
    mean_remainder: f64,
    mean_square: f64,
    method: IntegrationMethod,
    error_bound: f64,
    breakpoint_count: u64,
) -> MeanSquareReport {
    let upper = upper_bound_value(y, radius);
    MeanSquareReport {
        y,
        radius,
        mean_remainder,
        mean_square,
        method,
        error_bound,
        upper_bound_value: upper,
        ratio: mean_square / upper,
        breakpoint_count,
    }
}

/// `∫₀¹ R` and `∫₀¹ R²` by sweeping every jump of the count.
pub fn meansquare_exact(y: f64, radius: f64) -> Result<MeanSquareReport> {
    let sweep = breakpoints(y, radius)?;
    let mom = sweep_moments(&sweep, PI * radius * radius);
    Ok(report(
        y,
        radius,
        mom.mean,
        mom.mean_square,
        IntegrationMethod::Breakpoints,
        mom.mean_square_error,
        sweep.points.len() as u64,
    ))
}

/// The constant `y·P(T/√y) + c(√y·T)` separating the count from `H_T`,
/// accumulated from the same half chords as the sweep.
pub fn oscillation_center(y: f64, radius: f64) -> Result<f64> {
    let z = ShearPoint::new(0.0, y)?;
    let (d, _) = decompose(z, radius, DEFAULT_TIE_EPS)?;
    Ok(d.main_term + d.correction)
}

/// `∫₀¹ H` and `∫₀¹ H²` by breakpoint sweep, with
/// `H = N − y·P(T/√y) − c(√y·T)`.
pub fn h_moments_exact(y: f64, radius: f64) -> Result<Moments> {
    let sweep = breakpoints(y, radius)?;
    Ok(sweep_moments(&sweep, oscillation_center(y, radius)?))
}

/// `∫₀¹ R dx = y·P(T/√y) − πT² + (2⌈√y·T⌉ − 1 − 2√y·T)`.
///
/// Rows `m ≠ 0` contribute `2g_m` on average and the axis row is constant.
pub fn mean_remainder_closed(y: f64, radius: f64) -> Result<f64> {
    let sqrt_y = check_inputs(y, radius)?;
    Ok(y * p_sum(radius / sqrt_y)? - PI * radius * radius + axis_correction(sqrt_y * radius))
}

/// Midpoint rule over `grid_points` shears, counting each by rows.
///
/// The integrand is piecewise constant, so the error is governed by how many
/// nodes straddle each jump; compare two resolutions to judge it.
pub fn meansquare_grid(y: f64, radius: f64, grid_points: u64) -> Result<MeanSquareReport> {
    check_inputs(y, radius)?;
    if grid_points < 16 {
        return Err(invalid(format!("grid_points must be at least 16, got {grid_points}")));
    }
    let area = PI * radius * radius;
    let remainders: Vec<f64> = (0..grid_points)
        .into_par_iter()
        .map(|j| {
            let x = (j as f64 + 0.5) / grid_points as f64;
            let z = ShearPoint::new(x, y)?;
            Ok(count_rowslice(z, radius, 0.0)?.count as f64 - area)
        })
        .collect::<Result<_>>()?;
    let w = 1.0 / grid_points as f64;
    let mean: NeumaierSum = remainders.iter().map(|r| w * r).collect();
    let mean_sq: NeumaierSum = remainders.iter().map(|r| w * r * r).collect();
    Ok(report(y, radius, mean.value(), mean_sq.value(), IntegrationMethod::Grid, 0.0, 0))
}

/// Assembles `∫₀¹ R² = ∫₀¹ H² + (∫₀¹ R)²` from the Parseval value of `∫ H²`
/// and the closed-form mean, using `∫₀¹ H dx = 0`.
pub fn meansquare_parseval(y: f64, radius: f64, k_max: Option<u64>, n_max: Option<u64>) -> Result<MeanSquareReport> {
    let n_max = match n_max {
        Some(n) => n,
        None => default_n_max(y, radius)?,
    };
    let p = parseval_meansquare(y, radius, k_max, n_max)?;
    let mean = mean_remainder_closed(y, radius)?;
    Ok(report(y, radius, mean, p.value + mean * mean, IntegrationMethod::ParsevalAssembled, p.error_bound, 0))
}

/// Lower-bound data at `T = k√y`, where `T/√y = k` is an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundWitness {
    pub y: f64,
    pub k: u64,
    pub radius: f64,
    /// `πk² − P(k)`, the area missed by the inscribed polygon.
    pub deficit: f64,
    pub mean_remainder: f64,
    pub mean_square: f64,
    /// `mean_remainder²`, which `mean_square` dominates by Cauchy–Schwarz.
    pub floor_value: f64,
    /// `mean_square / (y^{3/2} T)`.
    pub normalized_by_t: f64,
    /// `mean_square / (y^{3/2} √T)`.
    pub normalized_by_sqrt_t: f64,
}

impl LowerBoundWitness {
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.mean_square + self.mean_error_allowance() >= self.floor_value
    }

    fn mean_error_allowance(&self) -> f64 {
        1e-9 * (1.0 + self.floor_value)
    }
}

/// Evaluates the witness at `T = k√y`.
///
/// The mean is `−y·deficit + c(√y·T)` exactly; the mean square comes from
/// the breakpoint sweep.
pub fn lower_bound_witness(y: f64, k: u64) -> Result<LowerBoundWitness> {
    check_height(y)?;
    if k == 0 {
        return Err(invalid("lower_bound_witness needs k >= 1"));
    }
    let sqrt_y = y.sqrt();
    let kf = k as f64;
    let radius = kf * sqrt_y;
    let deficit = PI * kf * kf - p_sum(kf)?;
    let mean_remainder = -y * deficit + axis_correction(sqrt_y * radius);
    let mean_square = meansquare_exact(y, radius)?.mean_square;
    let y32 = y.powf(1.5);
    Ok(LowerBoundWitness {
        y,
        k,
        radius,
        deficit,
        mean_remainder,
        mean_square,
        floor_value: mean_remainder * mean_remainder,
        normalized_by_t: mean_square / (y32 * radius),
        normalized_by_sqrt_t: mean_square / (y32 * radius.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tiny_circle_has_no_breakpoints() {
        let s = breakpoints(1.0, 0.5).unwrap();
        assert!(s.points.is_empty());
        assert_eq!(s.base_count, 1);
        let r = meansquare_exact(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(r.mean_remainder, 1.0 - 0.25 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(r.mean_square, (1.0 - 0.25 * PI).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(r.mean_square, 0.046054, epsilon = 1e-6);
    }

    #[test]
    fn reconstruction_at_hand_points() {
        let s = breakpoints(1.0, 1.5).unwrap();
        assert_eq!(s.base_count, 9);
        assert_eq!(s.count_at(1e-9), 9);
        assert_eq!(s.count_at(0.5), 7);
        assert_eq!(s.total_delta(), 0);
    }

    #[test]
    fn radius_two_mean_includes_the_axis_tie() {
        // (0, ±2) are on the circle for every x, so the axis row holds 3 points
        let closed = mean_remainder_closed(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(closed, p_sum(2.0).unwrap() - 4.0 * PI - 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(closed, -2.638168, epsilon = 1e-6);
        let r = meansquare_exact(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(r.mean_remainder, closed, epsilon = 1e-12);
    }

    #[test]
    fn range_guard() {
        assert!(matches!(breakpoints(1e-6, 10.0), Err(Error::RangeExceeded(_))));
    }

    #[test]
    fn grid_of_a_constant_integrand() {
        let g = meansquare_grid(1.0, 0.5, 64).unwrap();
        let e = meansquare_exact(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(g.mean_square, e.mean_square, epsilon = 1e-15);
        assert_abs_diff_eq!(g.mean_remainder, e.mean_remainder, epsilon = 1e-15);
        assert!(meansquare_grid(1.0, 0.5, 8).is_err());
    }

    #[test]
    fn witnesses() {
        let w = lower_bound_witness(1.0, 1).unwrap();
        assert_abs_diff_eq!(w.deficit, PI - 2.0, epsilon = 1e-15);
        let w = lower_bound_witness(1.0, 2).unwrap();
        assert_abs_diff_eq!(w.deficit, 1.638168, epsilon = 1e-6);
        assert_abs_diff_eq!(w.mean_remainder, -2.638168, epsilon = 1e-6);
        assert!(w.cauchy_schwarz_holds());
        let w = lower_bound_witness(4.0, 2).unwrap();
        assert_eq!(w.radius, 4.0);
        assert_abs_diff_eq!(w.mean_remainder, -4.0 * 1.638168 - 1.0, epsilon = 1e-5);
        assert!(w.cauchy_schwarz_holds());
    }

    #[test]
    fn upper_bound_expression() {
        assert_abs_diff_eq!(upper_bound_value(1.0, 2.0), 2.0 + 2.0, epsilon = 1e-15);
        let l = 100f64.ln();
        assert_abs_diff_eq!(upper_bound_value(1.0, 100.0), 100.0 * l * l + 100.0, epsilon = 1e-10);
    }

    #[test]
    fn method_names() {
        for m in [IntegrationMethod::Breakpoints, IntegrationMethod::Grid, IntegrationMethod::ParsevalAssembled] {
            assert_eq!(m.as_str().parse::<IntegrationMethod>().unwrap(), m);
        }
    }
}
