use shearcount::csvio::{read_spectrum_csv, read_sweep_csv, write_spectrum_csv, write_sweep_csv, SWEEP_HEADER};
use shearcount::fourier::spectrum;
use shearcount::sweep::{sweep, Integrator, SweepConfig};

fn config() -> SweepConfig {
    SweepConfig {
        y_values: vec![2.0, 1.0],
        radius_min: 3.0,
        radius_max: 30.0,
        samples: 4,
        log_spaced: true,
        integrator: Integrator::Breakpoints,
        ..SweepConfig::default()
    }
}

#[test]
fn sweep_rows_are_ordered_by_height_then_radius() {
    let rows = sweep(&config()).unwrap();
    assert_eq!(rows.len(), 8);
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.y, r.radius)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
    assert_eq!(rows[0].radius, 3.0);
    assert_eq!(rows[3].radius, 30.0);
}

#[test]
fn sweep_csv_round_trips() {
    let rows = sweep(&config()).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows, false).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER.join(","));

    let back = read_sweep_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (rec, row) in back.iter().zip(&rows) {
        let r = row.result.as_ref().unwrap();
        assert_eq!(rec.radius, r.radius);
        assert_eq!(rec.y, r.y);
        assert_eq!(rec.mean_square, Some(r.mean_square));
        assert_eq!(rec.mean_remainder, Some(r.mean_remainder));
        assert_eq!(rec.ratio, Some(r.ratio));
        assert_eq!(rec.method, "breakpoints");
        assert_eq!(rec.elapsed_ms, 0.0);
        assert!(rec.error.is_none());
    }
}

#[test]
fn failed_rows_add_an_error_column() {
    let cfg = SweepConfig { y_values: vec![1e-10, 1.0], radius_min: 200.0, radius_max: 200.0, samples: 1, ..config() };
    let rows = sweep(&cfg).unwrap();
    assert!(rows[0].result.is_err() && rows[0].range_exceeded);
    assert!(rows[1].result.is_ok());

    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows, false).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",error"));
    let back = read_sweep_csv(buf.as_slice()).unwrap();
    assert!(back[0].mean_square.is_none() && back[0].error.is_some());
    assert!(back[1].mean_square.is_some() && back[1].error.is_none());
}

#[test]
fn empty_sweep_is_header_only() {
    let rows = sweep(&SweepConfig { samples: 0, ..config() }).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows, false).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", SWEEP_HEADER.join(",")));
}

#[test]
fn spectrum_csv_round_trips() {
    let s = spectrum(1.3, 9.0, 300, 300).unwrap();
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &s).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("k,c_k\n"));
    assert!(text.lines().last().unwrap().starts_with("# l2_truncation_bound="));

    let back = read_spectrum_csv(buf.as_slice()).unwrap();
    assert_eq!(back.l2_truncation_bound, Some(s.l2_truncation_bound));
    assert_eq!(back.coeffs.len(), 300);
    for (i, &(k, c)) in back.coeffs.iter().enumerate() {
        assert_eq!(k, i as u64 + 1);
        assert_eq!(c, s.coeffs[i]);
    }
}
