//! End-to-end zero pipeline: find → audit → persist → ingest → statistics.

use snm_core::zeta::{audit, find_zeros, load_zeros, rs_theta, save_zeros};
use std::sync::OnceLock;

fn zeros_1000() -> &'static snm_core::zeta::ZeroList {
    static Z: OnceLock<snm_core::zeta::ZeroList> = OnceLock::new();
    Z.get_or_init(|| find_zeros(0.0, 1000.0).unwrap())
}

#[test]
fn count_matches_counting_formula_on_dense_grid() {
    let list = zeros_1000();
    let mut t = 5.0;
    while t <= 1000.0 {
        let found = list.ordinates().partition_point(|&g| g <= t) as i64;
        let expected = (rs_theta(t).unwrap().theta / std::f64::consts::PI + 1.0).round() as i64;
        let expected = if t < 14.0 { 0 } else { expected };
        assert!(
            (found - expected).abs() <= 3,
            "t={t}: found {found}, formula {expected}"
        );
        t += 0.73;
    }
}

#[test]
fn audit_passes_and_reports() {
    let report = audit(zeros_1000());
    assert!(report.pass);
    assert_eq!(report.count, 649);
    assert_eq!(report.expected_final, 649);
    assert!(report.max_boundary_deviation.abs() < 2);
}

#[test]
fn mean_gap_matches_prediction_within_ten_percent() {
    let list = zeros_1000();
    for t in [500.0, 800.0] {
        let window = list.window(t, t + 100.0);
        let gaps: Vec<f64> = window.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.iter().all(|&g| g > 0.0));
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let predicted = 2.0 * std::f64::consts::PI / (t / (2.0 * std::f64::consts::PI)).ln();
        assert!(
            (mean / predicted - 1.0).abs() < 0.10,
            "t={t}: mean {mean} vs {predicted}"
        );
    }
}

#[test]
fn external_reference_table_ingests_and_agrees() {
    // first hundred ordinates from an independently computed table
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/zeros100.txt");
    let reference = load_zeros(&path).unwrap();
    assert_eq!(reference.len(), 100);
    assert_eq!(reference.accuracy(), 1e-10);
    let ours = zeros_1000();
    for (a, b) in reference.ordinates().iter().zip(ours.ordinates()) {
        assert!(
            (a - b).abs() < 1e-7,
            "reference {a} vs computed {b}"
        );
    }
}

#[test]
fn save_load_audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.txt");
    let list = zeros_1000();
    save_zeros(list, &path).unwrap();
    let back = load_zeros(&path).unwrap();
    assert_eq!(back.len(), list.len());
    assert!(audit(&back).pass);
    // file carries the metadata comments
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# t_max: 1000.000000000\n# accuracy: 1e-9\n"));
}
