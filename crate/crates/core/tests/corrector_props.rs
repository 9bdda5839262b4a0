mod common;

use std::f64::consts::PI;

use hermite_rolle::corrector::{integration_report, max_error_on_grid, node_consistency_check};
use hermite_rolle::CorrectedApproximant;

fn polynomial_correctors() -> Vec<CorrectedApproximant> {
    let (prob, _) = common::worked_trajectory();
    common::worked_fits()
        .iter()
        .map(|fit| CorrectedApproximant::with_polynomial(prob.hermite.clone(), &fit.h_xi))
        .collect()
}

fn spline_corrector() -> CorrectedApproximant {
    let (prob, _) = common::worked_trajectory();
    CorrectedApproximant::with_spline(prob.hermite.clone(), common::worked_spline().clone())
}

#[test]
fn error_term_and_slope_vanish_at_nodes() {
    let mut all = polynomial_correctors();
    all.push(spline_corrector());
    for ca in &all {
        for &x in ca.hermite.nodes.as_slice() {
            let e = ca.error_term(x).unwrap();
            let de = ca.error_term_derivative(x).unwrap();
            assert!(e.abs() <= 1e-9 && de.abs() <= 1e-9, "spline={} x={x}: E={e}, E'={de}", ca.is_spline());
        }
        let (prob, _) = common::worked_trajectory();
        assert!(node_consistency_check(ca, &prob.f).passed);
    }
}

#[test]
fn max_error_strictly_decreases_with_degree() {
    let (prob, traj) = common::worked_trajectory();
    let errors: Vec<f64> = polynomial_correctors()
        .iter()
        .map(|ca| max_error_on_grid(ca, &prob.f, &traj.xs).unwrap())
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
}

#[test]
fn polynomial_error_integral_matches_trapezoid() {
    for ca in polynomial_correctors() {
        let (lo, hi) = ca.domain();
        let n = 1_000_000;
        let h = (hi - lo) / n as f64;
        let e = |x: f64| ca.error_term(x).unwrap();
        let interior: f64 = (1..n).map(|i| e(lo + i as f64 * h)).sum();
        let trapezoid = h * (0.5 * (e(lo) + e(hi)) + interior);
        let exact = ca.error_term_integral();
        assert!(((exact - trapezoid) / exact).abs() <= 1e-8, "{exact} vs {trapezoid}");
    }
}

#[test]
fn integration_against_closed_form() {
    let (prob, _) = common::worked_trajectory();
    let exact = 0.5 * (1.0 - (1.5 * PI).exp());
    let from_anti = prob.f.definite_integral(0.0, 1.5 * PI).unwrap();
    assert!((exact - from_anti).abs() <= 1e-12 * exact.abs());

    let ca = spline_corrector();
    let report = integration_report(&ca, exact);
    assert!((report.hermite_error - 0.7).abs() <= 0.05, "{}", report.hermite_error);
    assert!(report.corrected_error <= 1e-10, "{}", report.corrected_error);
}
