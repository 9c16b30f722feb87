use std::f64::consts::PI;

use proptest::prelude::*;
use shearcount::formula::h_sum;
use shearcount::fourier::{certificate, h_truncated, parseval_meansquare, parseval_to_tolerance, spectrum};
use shearcount::lattice::count_rowslice;
use shearcount::stats::{
    breakpoints, h_moments_exact, lower_bound_witness, mean_remainder_closed, meansquare_exact, meansquare_grid,
    meansquare_parseval, oscillation_center,
};
use shearcount::ShearPoint;

const YS: [f64; 3] = [0.7, 1.0, 2.5];
const TS: [f64; 4] = [1.5, 7.3, 20.0, 50.0];

fn grid() -> impl Iterator<Item = (f64, f64)> {
    YS.iter().flat_map(|&y| TS.iter().map(move |&t| (y, t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_reconstructs_rowslice(y in 0.5f64..4.0, t in 1.0f64..60.0, seed in 0u64..1000) {
        let sweep = breakpoints(y, t).unwrap();
        let mut state = seed;
        let mut checked = 0;
        while checked < 100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = (state >> 11) as f64 / (1u64 << 53) as f64;
            let c = count_rowslice(ShearPoint::new(x, y).unwrap(), t, 1e-10).unwrap();
            if c.ties > 0 {
                continue;
            }
            prop_assert_eq!(sweep.count_at(x), c.count as i64, "x = {}", x);
            checked += 1;
        }
        prop_assert_eq!(sweep.total_delta(), 0);
    }

    #[test]
    fn h_is_the_count_minus_its_center(x in 0.0f64..1.0, y in 0.5f64..4.0, t in 1.0f64..60.0) {
        let z = ShearPoint::new(x, y).unwrap();
        let c = count_rowslice(z, t, 1e-10).unwrap();
        prop_assume!(c.ties == 0);
        let h = h_sum(z, t).unwrap();
        let center = oscillation_center(y, t).unwrap();
        prop_assert!((c.count as f64 - center - h).abs() < 1e-6);
    }
}

#[test]
fn h_integrates_to_zero() {
    for (y, t) in grid() {
        let m = h_moments_exact(y, t).unwrap();
        assert!(m.mean.abs() <= 1e-9 * (1.0 + PI * t * t), "y = {y}, T = {t}: {}", m.mean);
    }
}

#[test]
fn mean_matches_closed_form() {
    for (y, t) in grid() {
        let exact = meansquare_exact(y, t).unwrap().mean_remainder;
        let closed = mean_remainder_closed(y, t).unwrap();
        assert!((exact - closed).abs() <= 1e-9 * (1.0 + PI * t * t), "y = {y}, T = {t}");
    }
}

#[test]
fn parseval_agrees_with_breakpoints() {
    for (y, t) in grid() {
        let exact = h_moments_exact(y, t).unwrap();
        let p = parseval_to_tolerance(y, t, 0.01, 1e-3, 1 << 20).unwrap();
        let gap = (p.value - exact.mean_square).abs();
        assert!(gap <= p.error_bound + exact.mean_square_error, "y = {y}, T = {t}: {gap} > {}", p.error_bound);
        if exact.mean_square > 0.1 {
            assert!(p.error_bound <= 0.01 * p.value, "y = {y}, T = {t}");
        }
    }
}

#[test]
fn parseval_assembly_matches_exact_mean_square() {
    let e = meansquare_exact(1.0, 20.0).unwrap();
    let p = meansquare_parseval(1.0, 20.0, None, None).unwrap();
    assert!((e.mean_square - p.mean_square).abs() <= p.error_bound + e.error_bound + 1e-9);
}

#[test]
fn certificate_dominates_parseval() {
    for (y, t) in grid() {
        let p = parseval_meansquare(y, t, None, 512).unwrap();
        let mut a = 2;
        while a <= 1024 {
            let c = certificate(y, t, a).unwrap();
            assert!(p.value <= c, "y = {y}, T = {t}, A = {a}: {} > {c}", p.value);
            a *= 2;
        }
    }
}

#[test]
fn truncated_series_tracks_h() {
    let z = ShearPoint::new(0.3, 1.0).unwrap();
    let h = h_sum(z, 1.5).unwrap();
    let approx = h_truncated(z, 1.5, 10_000).unwrap();
    assert!((h - approx).abs() < 0.01, "{h} vs {approx}");
}

#[test]
fn spectrum_parseval_consistency() {
    let s = spectrum(1.0, 7.3, 2000, 2000).unwrap();
    let half_sq: f64 = s.coeffs.iter().map(|c| 0.5 * c * c).sum();
    let p = parseval_meansquare(1.0, 7.3, Some(2000), 2000).unwrap();
    assert!((half_sq - p.value).abs() < 1e-9 * p.value);
}

#[test]
fn grid_tracks_exact() {
    let exact = meansquare_exact(1.0, 20.0).unwrap().mean_square;
    let coarse = meansquare_grid(1.0, 20.0, 1 << 14).unwrap().mean_square;
    let fine = meansquare_grid(1.0, 20.0, 1 << 15).unwrap().mean_square;
    assert!((fine - exact).abs() < 0.02 * exact, "{fine} vs {exact}");
    assert!((coarse - fine).abs() < 0.01 * fine, "{coarse} vs {fine}");
}

#[test]
fn constant_integrand_cases() {
    let e = meansquare_exact(1.0, 0.5).unwrap();
    let g = meansquare_grid(1.0, 0.5, 64).unwrap();
    let expected = 1.0 - 0.25 * PI;
    assert!((e.mean_remainder - expected).abs() < 1e-12);
    assert!((e.mean_square - expected * expected).abs() < 1e-12);
    assert_eq!(e.mean_square, g.mean_square);
}

#[test]
fn witnesses_respect_cauchy_schwarz() {
    for y in [1.0, 4.0] {
        for k in 2..=100 {
            let w = lower_bound_witness(y, k).unwrap();
            assert!(w.cauchy_schwarz_holds(), "{w:?}");
            assert!(w.mean_remainder < 0.0, "{w:?}");
        }
    }
}
