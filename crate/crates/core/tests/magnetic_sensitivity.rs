mod common;

use common::{within, SENSITIVITY_TABLE};
use h2ion::systematics::{sensitivity_beta, sensitivity_scan, total_magnetic_shift};
use h2ion::{CoefficientTable, SpinProjection, SpinState, TransitionSpec};

#[test]
fn published_sensitivities_at_4_tesla() {
    let table = CoefficientTable::shipped();
    let mut misses = Vec::new();
    for row in &SENSITIVITY_TABLE {
        let spec = row.spec();
        let beta = sensitivity_beta(&spec, &table, 4.0).unwrap() / 1e3;
        let shift = total_magnetic_shift(&spec, &table, 4.0).unwrap() / 1e3;
        if !within(beta, row.beta_khz, 0.01, 0.05) || !within(shift, row.shift_khz, 0.01, 0.2) {
            misses.push(format!("{}: beta {beta:.4} vs {}, shift {shift:.4} vs {}", row.label(), row.beta_khz, row.shift_khz));
        }
    }
    assert!(misses.is_empty(), "{}", misses.join("\n"));
}

#[test]
fn scan_grid_point_at_4_tesla_matches_point_evaluation() {
    let table = CoefficientTable::shipped();
    let spec = SENSITIVITY_TABLE[12].spec();
    let scan = sensitivity_scan(&spec, &table, (1.0, 7.0), 7).unwrap();
    let row = scan.rows[3];
    assert_eq!(row.b, 4.0);
    assert!(within(row.beta / 1e3, 32.5, 0.01, 0.05));
    assert!(scan.rows.windows(2).all(|w| w[1].b > w[0].b));
}

fn component(m_s: SpinProjection, m_n: i32) -> TransitionSpec {
    TransitionSpec::new(SpinState::para(0, 2, m_s, m_n).unwrap(), SpinState::para(2, 2, m_s, m_n).unwrap(), 127e12)
        .unwrap()
}

#[test]
fn insensitive_fields_between_1_and_7_tesla() {
    let table = CoefficientTable::shipped();
    let scan = sensitivity_scan(&component(SpinProjection::Down, 0), &table, (1.0, 7.0), 121).unwrap();
    assert!(!scan.zero_crossings.is_empty());
    for b in &scan.zero_crossings {
        let beta = sensitivity_beta(&component(SpinProjection::Down, 0), &table, *b).unwrap();
        assert!(beta.abs() < 50.0, "beta at reported crossing {b} T is {beta} Hz/T");
    }
}
