use std::process::{Command, Output};

use shearcount::csvio::{read_spectrum_csv, read_sweep_csv, SWEEP_HEADER};

fn shearcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shearcount")).args(args).env_remove("SHEARCOUNT_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn count_prints_the_integer() {
    let o = shearcount(&["count", "--x", "0", "--y", "1", "--radius", "2.5", "--method", "rowslice"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "21");
}

#[test]
fn count_with_boundary_points_exits_two() {
    let o = shearcount(&["count", "--x", "0", "--y", "1", "--radius", "2", "--method", "rowslice"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout(&o).trim(), "9");
    assert!(stderr(&o).contains("warning"));

    let o = shearcount(&["count", "--y", "1", "--radius", "2", "--method", "enumerate", "--json"]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 9);
    assert!(v["ties"].as_u64().unwrap() > 0);
    assert!(v["warning"].is_string());
}

#[test]
fn count_json_fields() {
    let o = shearcount(&["count", "--x", "0.5", "--y", "1", "--radius", "1.5", "--method", "formula", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 7);
    assert_eq!(v["ties"], 0);
    assert_eq!(v["method"], "formula");
    let r = v["remainder"].as_f64().unwrap();
    assert!((r - (7.0 - std::f64::consts::PI * 2.25)).abs() < 1e-12);
    assert!(v.get("warning").is_none());
}

#[test]
fn usage_errors_exit_one_and_name_the_flag() {
    let o = shearcount(&["count", "--y", "-1", "--radius", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--y"));

    assert_eq!(code(&shearcount(&["count", "--y", "1"])), 1);
    assert_eq!(code(&shearcount(&["meansquare", "--y", "1"])), 1);
    assert_eq!(code(&shearcount(&["count", "--y", "1", "--radius", "2", "--method", "guess"])), 1);
    assert_eq!(code(&shearcount(&["frobnicate"])), 1);
    assert_eq!(code(&shearcount(&["--help"])), 0);
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_shearcount"))
        .args(["count", "--y", "1", "--radius", "1.5"])
        .env("SHEARCOUNT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("SHEARCOUNT_THREADS"));
}

#[test]
fn meansquare_constant_case() {
    let o = shearcount(&["meansquare", "--y", "1", "--radius", "0.5", "--integrator", "breakpoints"]);
    assert_eq!(code(&o), 0);
    let rows = read_sweep_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    let expected = 1.0 - 0.25 * std::f64::consts::PI;
    assert!((rows[0].mean_square.unwrap() - expected * expected).abs() < 1e-12);
    assert_eq!(rows[0].method, "breakpoints");
}

#[test]
fn meansquare_grid_tracks_breakpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = shearcount(&[
        "meansquare",
        "--y",
        "1",
        "--radius",
        "20",
        "--integrator",
        "grid",
        "--grid-points",
        "32768",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let grid = read_sweep_csv(std::fs::File::open(&out).unwrap()).unwrap()[0].mean_square.unwrap();
    let o = shearcount(&["meansquare", "--y", "1", "--radius", "20"]);
    let exact = read_sweep_csv(o.stdout.as_slice()).unwrap()[0].mean_square.unwrap();
    assert!((grid - exact).abs() < 0.02 * exact);
}

#[test]
fn meansquare_parseval_accepts_truncation_flags() {
    let o = shearcount(&["meansquare", "--y", "1", "--radius", "7.3", "--integrator", "parseval", "--nmax", "512"]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_sweep_csv(o.stdout.as_slice()).unwrap()[0].method, "parseval-assembled");
}

#[test]
fn meansquare_rejects_flags_of_other_integrators() {
    let o = shearcount(&["meansquare", "--y", "1", "--radius", "5", "--grid-points", "1024"]);
    assert_eq!(code(&o), 1);
    let o = shearcount(&["meansquare", "--y", "1", "--radius", "5", "--integrator", "grid", "--kmax", "10"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oversized_sweep_exits_three_with_a_hint() {
    let o = shearcount(&["meansquare", "--y", "1e-6", "--radius", "10"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("--integrator grid"));
}

#[test]
fn sweep_writes_a_sorted_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = shearcount(&[
        "sweep",
        "--y",
        "2",
        "--y",
        "1",
        "--radius-min",
        "10",
        "--radius-max",
        "200",
        "--samples",
        "5",
        "--log",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER.join(","));
    let rows = read_sweep_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!((rows[0].y, rows[0].radius), (1.0, 10.0));
    assert_eq!((rows[9].y, rows[9].radius), (2.0, 200.0));
    assert!(rows.iter().all(|r| r.ratio.unwrap().is_finite() && r.elapsed_ms == 0.0));
}

#[test]
fn sweep_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let o = shearcount(&[
        "sweep",
        "--y",
        "1",
        "--radius-min",
        "10",
        "--radius-max",
        "20",
        "--samples",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), format!("{}\n", SWEEP_HEADER.join(",")));

    let bad = dir.path().join("missing").join("s.csv");
    let o =
        shearcount(&["sweep", "--y", "1", "--radius-min", "1", "--radius-max", "2", "--out", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    assert_eq!(code(&shearcount(&["sweep", "--y", "1", "--radius-min", "1", "--radius-max", "2"])), 1);
}

#[test]
fn sweep_keeps_going_past_failed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mixed.csv");
    let o = shearcount(&[
        "sweep",
        "--y",
        "1e-9,1",
        "--radius-min",
        "50",
        "--radius-max",
        "50",
        "--samples",
        "1",
        "--integrator",
        "breakpoints",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let rows = read_sweep_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert!(rows[0].error.is_some() && rows[0].mean_square.is_none());
    assert!(rows[1].error.is_none() && rows[1].mean_square.is_some());
}

#[test]
fn spectrum_outputs() {
    let o = shearcount(&["spectrum", "--y", "1", "--radius", "1.5", "--kmax", "1"]);
    assert_eq!(code(&o), 0);
    let t = read_spectrum_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.coeffs.len(), 1);
    assert!((t.coeffs[0].1 - 0.860).abs() < 1e-3);
    assert!(t.l2_truncation_bound.is_some());

    let o = shearcount(&["spectrum", "--y", "1", "--radius", "0.5", "--kmax", "10"]);
    let t = read_spectrum_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.coeffs.len(), 10);
    assert!(t.coeffs.iter().all(|&(_, c)| c == 0.0));

    assert_eq!(code(&shearcount(&["spectrum", "--y", "1", "--radius", "1.5", "--kmax", "0"])), 1);
}

#[test]
fn verify_passes_and_detects_faults() {
    let o = shearcount(&["verify", "--seed", "3", "--cases", "40", "--tmax", "60"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = shearcount(&["verify", "--cases", "5", "--tmax", "30", "--inject-fault"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("--radius"));

    let o = shearcount(&["verify", "--cases", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("vacuous"));
}

#[test]
fn verify_output_is_seed_deterministic() {
    let a = shearcount(&["--threads", "1", "verify", "--seed", "9", "--cases", "10", "--tmax", "40", "--inject-fault"]);
    let b = shearcount(&["--threads", "3", "verify", "--seed", "9", "--cases", "10", "--tmax", "40", "--inject-fault"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
