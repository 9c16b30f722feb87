//! Randomized self-check over tie-free `(x, y, T)`.
//!
//! Cases are drawn from SplitMix64 seeded with `--seed`: each uniform is
//! `(next_u64 >> 11) · 2⁻⁵³`, and a case consumes three in the order
//! `x ∈ [0, 1)`, `y ∈ [0.5, 4)`, `T ∈ (1, tmax]`. A case with any boundary
//! tie is discarded and redrawn from the same stream.

use clap::Args;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use shearcount::csvio::fmt_g17;
use shearcount::formula::{lemma_count, p_sum, polygon_area, quadrant_identity};
use shearcount::fourier::{certificate, parseval_meansquare};
use shearcount::lattice::{count_enumerate, count_rowslice};
use shearcount::stats::{breakpoints, mean_remainder_closed, oscillation_center, sweep_moments};
use shearcount::{formula, CountMethod, ShearPoint, DEFAULT_TIE_EPS};

use crate::{EXIT_OK, EXIT_VERIFY};

const Y_RANGE: (f64, f64) = (0.5, 4.0);
const PARSEVAL_NMAX: u64 = 1024;
const CERTIFICATE_LEVELS: [u64; 4] = [2, 8, 32, 128];

const CHECKS: [&str; 8] = [
    "oracle-equivalence",
    "decomposition-identity",
    "symmetry",
    "mean-closed-form",
    "parseval-vs-breakpoints",
    "certificate",
    "polygon",
    "quadrant-identity",
];

fn greater_than_one(s: &str) -> Result<f64, String> {
    let v = crate::commands::finite_real(s)?;
    if v > 1.0 {
        Ok(v)
    } else {
        Err("must exceed 1".into())
    }
}

#[derive(Debug, Args)]
pub(crate) struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    cases: usize,
    /// Largest radius sampled.
    #[arg(long, default_value_t = 150.0, value_parser = greater_than_one)]
    tmax: f64,
    /// Corrupt one enumerated count to exercise the failure path.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Debug, Clone, Copy)]
struct Case {
    index: usize,
    x: f64,
    y: f64,
    radius: f64,
}

/// Outcome of one check on one case: `None` if skipped, else pass/fail.
type Outcome = Option<Result<(), String>>;

fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn has_ties(z: ShearPoint, radius: f64) -> bool {
    [CountMethod::Enumerate, CountMethod::Rowslice, CountMethod::Formula]
        .into_iter()
        .any(|m| formula::count(z, radius, m, DEFAULT_TIE_EPS).map_or(true, |c| c.ties > 0))
}

fn sample(seed: u64, cases: usize, tmax: f64) -> Vec<Case> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    while out.len() < cases {
        let x = uniform(&mut rng);
        let y = Y_RANGE.0 + (Y_RANGE.1 - Y_RANGE.0) * uniform(&mut rng);
        let radius = tmax - (tmax - 1.0) * uniform(&mut rng);
        let z = ShearPoint::new(x, y).expect("sampled height is positive");
        if !has_ties(z, radius) {
            out.push(Case { index: out.len(), x, y, radius });
        }
    }
    out
}

fn check(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn run_case(c: Case, inject_fault: bool) -> [Outcome; 8] {
    match run_case_inner(c, inject_fault) {
        Ok(o) => o,
        Err(e) => std::array::from_fn(|_| Some(Err(format!("evaluation error: {e}")))),
    }
}

fn run_case_inner(c: Case, inject_fault: bool) -> shearcount::Result<[Outcome; 8]> {
    let z = ShearPoint::new(c.x, c.y)?;
    let (y, t) = (c.y, c.radius);
    let scaled = t / y.sqrt();

    let mut enumerated = count_enumerate(z, t, DEFAULT_TIE_EPS)?.count;
    if inject_fault && c.index == 0 {
        enumerated += 1;
    }
    let sliced = count_rowslice(z, t, DEFAULT_TIE_EPS)?.count;
    let oracle = check(sliced == enumerated, || format!("rowslice {sliced} != enumerate {enumerated}"));

    let d = lemma_count(z, t)?;
    let frac = (d.total - d.total.round()).abs();
    let identity = check(d.total.round() as u64 == enumerated && frac < 1e-6, || {
        format!("decomposition total {} vs enumerate {enumerated}", fmt_g17(d.total))
    });

    let mirrored = count_rowslice(ShearPoint::new(-c.x, y)?, t, DEFAULT_TIE_EPS)?.count;
    let shifted = count_rowslice(ShearPoint::new(c.x + 1.0, y)?, t, DEFAULT_TIE_EPS)?.count;
    let symmetry = check(mirrored == sliced && shifted == sliced, || {
        format!("N(x) = {sliced}, N(-x) = {mirrored}, N(x+1) = {shifted}")
    });

    let area = std::f64::consts::PI * t * t;
    let sweep = breakpoints(y, t)?;
    let r_mom = sweep_moments(&sweep, area);
    let closed = mean_remainder_closed(y, t)?;
    let mean = check((r_mom.mean - closed).abs() <= 1e-9 * (1.0 + area), || {
        format!("swept mean {} vs closed form {}", fmt_g17(r_mom.mean), fmt_g17(closed))
    });

    let h_mom = sweep_moments(&sweep, oscillation_center(y, t)?);
    let p = parseval_meansquare(y, t, None, PARSEVAL_NMAX)?;
    let gap = (p.value - h_mom.mean_square).abs();
    let parseval = check(gap <= p.error_bound + h_mom.mean_square_error, || {
        format!(
            "parseval {} vs swept {} exceeds bound {}",
            fmt_g17(p.value),
            fmt_g17(h_mom.mean_square),
            fmt_g17(p.error_bound)
        )
    });

    let mut cert = Ok(());
    for a in CERTIFICATE_LEVELS {
        let bound = certificate(y, t, a)?;
        if p.value > bound {
            cert = Err(format!("parseval {} > certificate {} at A = {a}", fmt_g17(p.value), fmt_g17(bound)));
            break;
        }
    }

    let k = scaled.floor() as u64;
    let polygon = if k >= 1 {
        let (area_k, sum_k) = (polygon_area(k)?, p_sum(k as f64)?);
        Some(check((area_k - sum_k).abs() <= 1e-9 * sum_k, || {
            format!("polygon {} vs P({k}) {}", fmt_g17(area_k), fmt_g17(sum_k))
        }))
    } else {
        None
    };

    let quadrant = if scaled >= 2.0 {
        let q = quadrant_identity(scaled)?;
        Some(check(q.residual() < 1e-8 && q.integral_in_range(), || {
            format!("identity residual {} with integral {}", fmt_g17(q.residual()), fmt_g17(q.integral))
        }))
    } else {
        None
    };

    Ok([Some(oracle), Some(identity), Some(symmetry), Some(mean), Some(parseval), Some(cert), polygon, quadrant])
}

pub(crate) fn verify(a: VerifyArgs) -> u8 {
    if a.cases == 0 {
        eprintln!("warning: no cases requested; every check passes vacuously");
    }
    let cases = sample(a.seed, a.cases, a.tmax);
    let results: Vec<[Outcome; 8]> = cases.par_iter().map(|&c| run_case(c, a.inject_fault)).collect();

    println!("{:<24} {:>6} {:>7}  status", "check", "run", "failed");
    let mut first_failures = Vec::new();
    for (i, name) in CHECKS.iter().enumerate() {
        let mut run = 0usize;
        let mut failed = 0usize;
        for (case, outcome) in cases.iter().zip(&results) {
            match &outcome[i] {
                None => {}
                Some(Ok(())) => run += 1,
                Some(Err(detail)) => {
                    run += 1;
                    failed += 1;
                    if failed == 1 {
                        first_failures.push((*name, *case, detail.clone()));
                    }
                }
            }
        }
        let status = if failed == 0 { "pass" } else { "FAIL" };
        println!("{name:<24} {run:>6} {failed:>7}  {status}");
    }

    if first_failures.is_empty() {
        println!("all checks passed ({} cases, seed {})", cases.len(), a.seed);
        return EXIT_OK;
    }
    for (name, c, detail) in &first_failures {
        eprintln!(
            "FAIL {name}: case {} --x {} --y {} --radius {} (seed {}): {detail}",
            c.index,
            fmt_g17(c.x),
            fmt_g17(c.y),
            fmt_g17(c.radius),
            a.seed
        );
    }
    EXIT_VERIFY
}
