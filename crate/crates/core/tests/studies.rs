use maxwell_mixed::cli::{format_study, run_case, run_convergence, Layer, RunConfig, StudyRow, STUDY_HEADER};
use maxwell_mixed::{ElementFamily, Example, IsotropicMaterial};
use clap::Parser;

fn config(args: &[&str]) -> RunConfig {
    let mut argv = vec!["maxwell-mixed"];
    argv.extend_from_slice(args);
    RunConfig::resolve(Layer::try_parse_from(argv).unwrap()).unwrap()
}

#[test]
fn hmz_synchronous_refinement_values() {
    let material = IsotropicMaterial::unit();
    for (m, want) in [(4, 0.0097), (8, 0.0028), (12, 0.0013), (16, 0.0007)] {
        let rec = run_case(ElementFamily::Hmz, Example::Polynomial, m * m / 4, m, 1.0, material, false, 1e-12).unwrap();
        assert!((rec.e_a_sigma - want).abs() <= 0.05 * want, "M={m}: {}", rec.e_a_sigma);
    }
}

#[test]
fn nedelec_synchronous_refinement_value() {
    let rec = run_case(ElementFamily::NedelecQ1, Example::Trigonometric, 64, 16, 1.0, IsotropicMaterial::unit(), true, 1e-12).unwrap();
    assert!((rec.e_a_sigma - 0.0049).abs() <= 0.05 * 0.0049, "{}", rec.e_a_sigma);
}

#[test]
fn hmz_velocity_error_at_n32() {
    let rec = run_case(ElementFamily::Hmz, Example::Trigonometric, 32, 200, 1.0, IsotropicMaterial::unit(), false, 1e-12).unwrap();
    assert!((rec.e_c_v - 0.0199).abs() <= 0.01 * 0.0199, "{}", rec.e_c_v);
    assert_eq!((rec.n, rec.m), (32, 200));
}

#[test]
fn single_row_table_has_empty_orders() {
    let rows: Vec<StudyRow> = run_convergence(&config(&["--mode", "convergence", "--nx", "4", "--dt", "0.1"])).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].order_sigma, None);
    let csv = format_study(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(STUDY_HEADER));
    assert!(lines.next().unwrap().contains(",,"));
}

#[test]
fn minimal_temporal_study_has_one_order() {
    let rows = maxwell_mixed::cli::run_temporal_convergence(&config(&["--mode", "temporal-convergence", "--nt", "4,8"])).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].order_sigma.is_some() && rows[1].order_v.is_some());
    assert_eq!(rows[1].record.n, 16);
}

#[test]
fn study_rejects_wrong_mode() {
    let c = config(&["--mode", "temporal-convergence", "--nt", "4,8"]);
    assert!(run_convergence(&c).is_err());
}
