//! Mean-square sweeps over grids of heights `y` and radii `T`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::stats::{
    meansquare_exact, meansquare_grid, meansquare_parseval, projected_events, MeanSquareReport, DEFAULT_GRID_POINTS,
    MAX_EVENTS,
};
use crate::{check_height, invalid, Error, Result};

/// Integrator requested for each row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Breakpoints while the projected event count stays below
    /// [`MAX_EVENTS`], the grid beyond.
    Auto,
    Breakpoints,
    Grid,
    Parseval,
}

impl Integrator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Integrator::Auto => "auto",
            Integrator::Breakpoints => "breakpoints",
            Integrator::Grid => "grid",
            Integrator::Parseval => "parseval-assembled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub y_values: Vec<f64>,
    pub radius_min: f64,
    pub radius_max: f64,
    pub samples: usize,
    pub log_spaced: bool,
    pub integrator: Integrator,
    pub grid_points: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            y_values: vec![1.0],
            radius_min: 10.0,
            radius_max: 2000.0,
            samples: 50,
            log_spaced: true,
            integrator: Integrator::Auto,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for &y in &self.y_values {
            check_height(y)?;
        }
        if self.samples > 0 {
            if !(self.radius_min.is_finite() && self.radius_min > 0.0) {
                return Err(invalid(format!("radius_min must be positive, got {}", self.radius_min)));
            }
            if !(self.radius_max.is_finite() && self.radius_max >= self.radius_min) {
                return Err(invalid(format!(
                    "radius_max must be finite and at least radius_min, got {}",
                    self.radius_max
                )));
            }
        }
        if self.integrator == Integrator::Grid && self.grid_points < 16 {
            return Err(invalid(format!("grid_points must be at least 16, got {}", self.grid_points)));
        }
        Ok(())
    }

    /// The radii of the sweep, ascending, with both endpoints included.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.samples;
        let (lo, hi) = (self.radius_min, self.radius_max);
        match n {
            0 => vec![],
            1 => vec![lo],
            _ => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        return hi;
                    }
                    let t = i as f64 / (n - 1) as f64;
                    if self.log_spaced {
                        lo * (hi / lo).powf(t)
                    } else {
                        lo + (hi - lo) * t
                    }
                })
                .collect(),
        }
    }

    /// `(y, T)` pairs sorted by `y` then `T`.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let mut ys = self.y_values.clone();
        ys.sort_by(f64::total_cmp);
        let radii = self.radii();
        ys.iter().flat_map(|&y| radii.iter().map(move |&t| (y, t))).collect()
    }
}

/// One row of a sweep; `result` holds the error message when the row failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub y: f64,
    pub radius: f64,
    pub integrator: Integrator,
    pub result: std::result::Result<MeanSquareReport, String>,
    pub elapsed_ms: f64,
    /// Whether the failure was a precision or size limit.
    pub range_exceeded: bool,
}

/// Evaluates one `(y, T)` point with the requested integrator.
pub fn evaluate(y: f64, radius: f64, integrator: Integrator, grid_points: u64) -> Result<MeanSquareReport> {
    match integrator {
        Integrator::Breakpoints => meansquare_exact(y, radius),
        Integrator::Grid => meansquare_grid(y, radius, grid_points),
        Integrator::Parseval => meansquare_parseval(y, radius, None, None),
        Integrator::Auto => {
            if projected_events(y, radius) <= MAX_EVENTS {
                meansquare_exact(y, radius)
            } else {
                meansquare_grid(y, radius, grid_points)
            }
        }
    }
}

/// Runs every grid point on the current rayon pool. Rows come back in grid
/// order regardless of completion order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let rows = config
        .grid()
        .into_par_iter()
        .map(|(y, radius)| {
            let start = Instant::now();
            let outcome = evaluate(y, radius, config.integrator, config.grid_points);
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let range_exceeded = matches!(outcome, Err(Error::RangeExceeded(_)));
            SweepRow {
                y,
                radius,
                integrator: config.integrator,
                result: outcome.map_err(|e| e.to_string()),
                elapsed_ms,
                range_exceeded,
            }
        })
        .collect();
    Ok(rows)
}
