//! The shear lattice `Λ_z` and two independent exact point counters.
//!
//! [`count_enumerate`] tests every candidate `(m, n)` against the circle and
//! is deliberately naive; [`count_rowslice`] counts each row `m` in constant
//! time from the endpoints of the chord `|mx + n| < g_m`. The two share no
//! code so that each can act as an oracle for the other.

use serde::Serialize;

use crate::{check_height, check_radius, invalid, Result};

/// A point `z = x + iy` of the upper half plane, naming the lattice `Λ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShearPoint {
    x: f64,
    y: f64,
}

impl ShearPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(invalid(format!("x must be finite, got {x}")));
        }
        check_height(y)?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The basis `{(√y, x/√y), (0, 1/√y)}` of `Λ_z`, as rows.
    pub fn basis(&self) -> [[f64; 2]; 2] {
        let s = self.y.sqrt();
        [[s, self.x / s], [0.0, 1.0 / s]]
    }

    /// Determinant of [`basis`](Self::basis); one up to rounding.
    pub fn covolume(&self) -> f64 {
        let [[a, b], [c, d]] = self.basis();
        a * d - b * c
    }
}

/// Which counting route produced a [`CountResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Enumerate,
    Rowslice,
    Formula,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::Enumerate => "enumerate",
            CountMethod::Rowslice => "rowslice",
            CountMethod::Formula => "formula",
        }
    }
}

impl std::fmt::Display for CountMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CountMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(CountMethod::Enumerate),
            "rowslice" => Ok(CountMethod::Rowslice),
            "formula" => Ok(CountMethod::Formula),
            other => Err(invalid(format!("unknown count method {other:?}"))),
        }
    }
}

/// Number of lattice points strictly inside the circle, with a tie diagnostic.
///
/// `ties` counts the boundary tests that landed within the tie tolerance. A
/// nonzero value means the strict count may depend on rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub count: u64,
    pub ties: u64,
    pub method: CountMethod,
}

/// `(m√y, (mx + n)/√y)`.
pub fn lattice_vector(z: ShearPoint, m: i64, n: i64) -> (f64, f64) {
    let s = z.y.sqrt();
    let (m, n) = (m as f64, n as f64);
    (m * s, (m * z.x + n) / s)
}

fn check_inputs(z: ShearPoint, radius: f64, tie_eps: f64) -> Result<()> {
    if !(tie_eps >= 0.0 && tie_eps.is_finite()) {
        return Err(invalid(format!("tie_eps must be a nonnegative finite number, got {tie_eps}")));
    }
    check_radius(z.y.sqrt(), radius)
}

/// Counts `#{(m, n) : (mx + n)² < yT² − y²m²}` by testing every candidate.
///
/// Each row scans a padded window of `n` around the chord, so the cost is
/// `O(T²/y + T/√y)`. A test is a tie when
/// `|(mx + n)² − (yT² − y²m²)| ≤ tie_eps·yT²`.
pub fn count_enumerate(z: ShearPoint, radius: f64, tie_eps: f64) -> Result<CountResult> {
    check_inputs(z, radius, tie_eps)?;
    let (x, y) = (z.x, z.y);
    let y_t2 = y * radius * radius;
    let tol = tie_eps * y_t2;
    let m_max = (radius / y.sqrt()).floor() as i64 + 1;

    let mut count = 0u64;
    let mut ties = 0u64;
    for m in -m_max..=m_max {
        let mf = m as f64;
        let rhs = y_t2 - y * y * mf * mf;
        let shift = mf * x;
        let half = rhs.max(0.0).sqrt() + 1.0;
        let lo = (-shift - half).floor() as i64;
        let hi = (-shift + half).ceil() as i64;
        for n in lo..=hi {
            let u = shift + n as f64;
            let lhs = u * u;
            if (lhs - rhs).abs() <= tol {
                ties += 1;
            }
            if lhs < rhs {
                count += 1;
            }
        }
    }
    Ok(CountResult { count, ties, method: CountMethod::Enumerate })
}

/// Counts the same set row by row from the chord endpoints.
///
/// Row `m` holds the integers strictly between `a = −g_m − mx` and
/// `b = g_m − mx`, where `g_m = √(yT² − y²m²)`; there are
/// `⌈b⌉ − ⌊a⌋ − 1` of them. This equals the floor difference `⌊b⌋ − ⌊a⌋`
/// unless `b` is an integer. A row is a tie when either endpoint lies within
/// `tie_eps·(1 + |g_m| + |mx|)` of an integer.
pub fn count_rowslice(z: ShearPoint, radius: f64, tie_eps: f64) -> Result<CountResult> {
    check_inputs(z, radius, tie_eps)?;
    let sqrt_y = z.y.sqrt();
    let mut count = 0i64;
    let mut ties = 0u64;

    let mut row = |m: i64, g: f64| {
        let shift = m as f64 * z.x;
        let a = -g - shift;
        let b = g - shift;
        count += b.ceil() as i64 - a.floor() as i64 - 1;
        let tol = tie_eps * (1.0 + g.abs() + shift.abs());
        if near_integer(a, tol) || near_integer(b, tol) {
            ties += 1;
        }
    };

    row(0, sqrt_y * radius);
    for (m, g) in rows(sqrt_y, radius) {
        row(m as i64, g);
        row(-(m as i64), g);
    }
    Ok(CountResult { count: count as u64, ties, method: CountMethod::Rowslice })
}

fn near_integer(t: f64, tol: f64) -> bool {
    (t - t.round()).abs() <= tol
}

/// Half chord length `g_m = √(yT² − y²m²)` in factored form.
///
/// `√y·√((T − m√y)(T + m√y))` keeps full relative accuracy when `m` is close
/// to `T/√y`, and is exact when `y = 1` and `T² − m²` is a square. Returns
/// `None` outside the circle.
#[inline]
pub(crate) fn half_chord(sqrt_y: f64, radius: f64, m: u64) -> Option<f64> {
    let ms = m as f64 * sqrt_y;
    let gap = radius - ms;
    (gap > 0.0).then(|| sqrt_y * (gap * (radius + ms)).sqrt())
}

/// Iterates `(m, g_m)` over the rows `m = 1, 2, …` with `m√y < T`.
pub(crate) fn rows(sqrt_y: f64, radius: f64) -> impl Iterator<Item = (u64, f64)> {
    (1u64..).map_while(move |m| half_chord(sqrt_y, radius, m).map(|g| (m, g)))
}

/// The half chords `g_1, …, g_M` collected into a vector.
pub(crate) fn half_chords(sqrt_y: f64, radius: f64) -> Vec<f64> {
    rows(sqrt_y, radius).map(|(_, g)| g).collect()
}
