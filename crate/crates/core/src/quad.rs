use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::NeumaierSum;

const NODES: usize = 64;
const MAX_LEVEL: u32 = 12;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(NODES).unwrap()))
}

/// Composite 64-point Gauss–Legendre over `[a, b]`, doubling the panel count
/// until two successive levels differ by less than `tol`.
///
/// The integrand must be smooth on `[a, b]`.
pub(crate) fn integrate_smooth<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let glq = rule();
    let composite = |panels: u32| {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + i as f64 * h;
                glq.integrate(lo, lo + h, &f)
            })
            .collect::<NeumaierSum>()
            .value()
    };
    let mut prev = composite(1);
    for level in 1..=MAX_LEVEL {
        let next = composite(1 << level);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}
