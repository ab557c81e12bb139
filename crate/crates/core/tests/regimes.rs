//! Comparison reports over the reference parameter rows.

use cavity_duet_core::observables::{compute_series_from_ket, run_table, Thresholds};
use cavity_duet_core::presets::{uniform_grid, DEFAULT_STEP, INITIAL_KET, TABLE_ROWS};
use cavity_duet_core::Observable;

#[test]
fn empty_row_list_gives_empty_report() {
    assert!(run_table(&[], &Thresholds::default()).unwrap().is_empty());
}

#[test]
fn duplicated_rows_give_identical_reports() {
    let t = Thresholds {
        window: (0.0, 10.0),
        ..Thresholds::default()
    };
    let reports = run_table(&[TABLE_ROWS[2], TABLE_ROWS[2]], &t).unwrap();
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn total_excitation_is_conserved_on_every_row() {
    let grid = uniform_grid(100.0, DEFAULT_STEP);
    for row in &TABLE_ROWS {
        let s = compute_series_from_ket(&row.params(), INITIAL_KET, &grid).unwrap();
        for track in [&s.analytic, &s.numeric] {
            let dev = track
                .get(Observable::MTot)
                .iter()
                .map(|m| (m - 3.0).abs())
                .fold(0.0, f64::max);
            assert!(
                dev <= 1e-8,
                "(g {}, lambda {}): {dev:e}",
                row.g_ratio,
                row.lambda_ratio
            );
        }
    }
}

#[test]
fn every_row_agrees_over_the_first_five_periods() {
    let grid = uniform_grid(5.0, DEFAULT_STEP);
    let mut failures = Vec::new();
    for row in &TABLE_ROWS {
        let s = compute_series_from_ket(&row.params(), INITIAL_KET, &grid).unwrap();
        let worst = Observable::ALL
            .iter()
            .map(|&o| s.max_abs_diff(o, (0.0, 5.0)))
            .fold(0.0, f64::max);
        if worst > 0.05 {
            failures.push(format!(
                "(g {}, lambda {}): {worst:.3}",
                row.g_ratio, row.lambda_ratio
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("; "));
}
