//! Browser bindings for the `hermite-rolle` pipeline.
//!
//! Each export has a plain-Rust `*_view` counterpart returning a serializable
//! struct, so the logic is testable without a JavaScript host. The exports
//! only convert the result to a JS object.

use hermite_rolle::experiment::{run_experiment, ExperimentConfig};
use hermite_rolle::fitting::{spline_end_slopes, SlopeMethod};
use hermite_rolle::rolle::{bootstrap_xi, select_branch, solve_rolle, SolveSettings, TrajectoryStatus};
use hermite_rolle::{fit_clamped_spline, CorrectedApproximant, RolleProblem};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on points shipped to the page per curve.
const MAX_PLOT_POINTS: usize = 600;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationView {
    pub function: String,
    pub nodes: Vec<f64>,
    /// Monomial coefficients of `H`, lowest degree first.
    pub coefficients: Vec<f64>,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchView {
    pub seed: f64,
    pub accepted: bool,
    pub status: String,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolleView {
    pub x_z: f64,
    pub roots: Vec<f64>,
    pub branches: Vec<BranchView>,
    /// `x` grid for the error curves of the accepted branch.
    pub x: Vec<f64>,
    pub delta_true: Vec<f64>,
    pub delta_model: Vec<f64>,
    pub max_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionRow {
    pub label: String,
    pub max_error: f64,
    pub v: Option<f64>,
    pub integral_error: Option<f64>,
    pub nodes_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionView {
    pub degenerate: bool,
    pub uncorrected_max_error: f64,
    pub hermite_integral_error: Option<f64>,
    pub spline_bound: Option<f64>,
    pub rows: Vec<CorrectionRow>,
    /// `|f - (H + E)|` on a thinned trajectory grid, one series per row.
    pub x: Vec<f64>,
    pub series: Vec<Series>,
}

fn config(function: &str, nodes: &str) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    cfg.set("function", function).map_err(|e| e.to_string())?;
    cfg.set("nodes", nodes).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn problem(cfg: &ExperimentConfig) -> Result<RolleProblem, String> {
    let (f, nodes) = cfg.validate().map_err(|e| e.to_string())?;
    RolleProblem::new(f, nodes).map_err(|e| e.to_string())
}

/// Every `stride`-th index plus the last one.
fn thin(len: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let stride = len.div_ceil(MAX_PLOT_POINTS).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

fn pick(values: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| values[i]).collect()
}

fn status_label(status: &TrajectoryStatus) -> String {
    match status {
        TrajectoryStatus::Complete => "complete".into(),
        TrajectoryStatus::Truncated { x, .. } => format!("truncated at x = {x:.6}"),
        TrajectoryStatus::InvalidBranch { x, xi } => format!("left the interval at x = {x:.6} (xi = {xi:.3e})"),
    }
}

/// `f`, `H` and `f - H` on `samples` equally spaced points.
pub fn interpolation_view(function: &str, nodes: &str, samples: usize) -> Result<InterpolationView, String> {
    let cfg = config(function, nodes)?;
    let prob = problem(&cfg)?;
    let (lo, hi) = (prob.nodes.first(), prob.nodes.last());
    let samples = samples.clamp(2, 5000);
    let x: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let fx: Vec<f64> = x.iter().map(|&t| prob.f.value(t)).collect();
    let hx: Vec<f64> = x.iter().map(|&t| prob.hermite.eval(t)).collect();
    let err: Vec<f64> = fx.iter().zip(&hx).map(|(a, b)| a - b).collect();
    let max_error = err.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Ok(InterpolationView {
        function: prob.f.name().to_string(),
        nodes: prob.nodes.as_slice().to_vec(),
        coefficients: prob.hermite.poly.coeffs().to_vec(),
        x,
        series: vec![
            Series { label: "f".into(), y: fx },
            Series { label: "H".into(), y: hx },
            Series { label: "f - H".into(), y: err },
        ],
        max_error,
    })
}

/// Bootstraps the Rolle function, solves every candidate branch and reports
/// which one stays inside the node interval.
pub fn rolle_view(function: &str, nodes: &str, xz_offset: f64, steps: usize) -> Result<RolleView, String> {
    let mut cfg = config(function, nodes)?;
    cfg.xz_offset = xz_offset;
    cfg.steps = steps;
    let prob = problem(&cfg)?;
    let x_z = prob.nodes.first() + cfg.xz_offset;
    let settings = SolveSettings {
        steps: cfg.steps,
        right_margin: cfg.right_margin,
    };
    let roots = bootstrap_xi(&prob, x_z, cfg.bootstrap_grid).map_err(|e| e.to_string())?;
    let accepted = select_branch(&prob, x_z, &roots, &settings).map_err(|e| e.to_string())?;

    let branches = roots
        .iter()
        .map(|&seed| {
            let traj = if seed == accepted.accepted_xi_z {
                accepted.clone()
            } else {
                solve_rolle(&prob, x_z, seed, &settings).map_err(|e| e.to_string())?
            };
            let idx = thin(traj.len());
            Ok(BranchView {
                seed,
                accepted: seed == accepted.accepted_xi_z,
                status: status_label(&traj.status),
                x: pick(&traj.xs, &idx),
                xi: pick(&traj.xis, &idx),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;

    let idx = thin(accepted.len());
    let x = pick(&accepted.xs, &idx);
    let xi = pick(&accepted.xis, &idx);
    Ok(RolleView {
        x_z,
        roots,
        branches,
        delta_true: x.iter().map(|&t| prob.delta_true(t)).collect(),
        delta_model: x.iter().zip(&xi).map(|(&t, &s)| prob.delta_model(s, t)).collect(),
        x,
        max_discrepancy: accepted.max_model_discrepancy(&prob),
    })
}

/// Runs the full correction pipeline and tabulates the corrected errors.
pub fn correction_view(
    function: &str,
    nodes: &str,
    steps: usize,
    degrees: &str,
    spline: bool,
) -> Result<CorrectionView, String> {
    let mut cfg = config(function, nodes)?;
    cfg.steps = steps;
    cfg.spline = spline;
    cfg.set("degrees", degrees).map_err(|e| e.to_string())?;
    let report = run_experiment(&cfg, None).map_err(|e| e.to_string())?;
    let table = &report.table;
    let integration = report.integration.as_ref();

    let mut view = CorrectionView {
        degenerate: table.degenerate,
        uncorrected_max_error: table.uncorrected_max_error,
        hermite_integral_error: integration.map(|i| i.hermite_error),
        spline_bound: table.spline.as_ref().map(|s| s.error_bound),
        rows: Vec::new(),
        x: Vec::new(),
        series: Vec::new(),
    };
    let Some(traj) = report.trajectory.as_ref() else {
        return Ok(view);
    };
    let prob = problem(&cfg)?;
    let integral_error = |kind: &str, degree: Option<usize>| {
        integration.and_then(|i| {
            i.corrected
                .iter()
                .find(|c| c.kind == kind && c.degree == degree)
                .map(|c| c.abs_error)
        })
    };

    let idx = thin(traj.len());
    view.x = pick(&traj.xs, &idx);
    let curve = |ca: &CorrectedApproximant| -> Vec<f64> {
        view.x
            .iter()
            .map(|&t| (prob.f.value(t) - hermite_rolle::corrected_eval(ca, t).unwrap_or(f64::NAN)).abs())
            .collect()
    };
    let mut series = Vec::new();
    for fit in &table.fits {
        let ca = CorrectedApproximant::with_polynomial(prob.hermite.clone(), &fit.fit.h_xi);
        let label = format!("degree {}", fit.fit.degree);
        series.push(Series { label: label.clone(), y: curve(&ca) });
        view.rows.push(CorrectionRow {
            label,
            max_error: fit.max_error,
            v: Some(fit.fit.v),
            integral_error: integral_error("polynomial", Some(fit.fit.degree)),
            nodes_ok: fit.node_consistency.passed,
        });
    }
    if let Some(summary) = &table.spline {
        let slopes = spline_end_slopes(traj, &prob).map_err(|e| e.to_string())?;
        let samples = traj.remainder_samples(&prob);
        let s = fit_clamped_spline(&traj.xs, &samples, slopes.left, slopes.right).map_err(|e| e.to_string())?;
        let ca = CorrectedApproximant::with_spline(prob.hermite.clone(), s);
        let method = |m: SlopeMethod| match m {
            SlopeMethod::ChainRule => "chain rule",
            SlopeMethod::FiniteDifference => "finite difference",
        };
        series.push(Series { label: "spline".into(), y: curve(&ca) });
        view.rows.push(CorrectionRow {
            label: format!(
                "clamped spline ({} / {})",
                method(slopes.left_method),
                method(slopes.right_method)
            ),
            max_error: summary.max_error,
            v: None,
            integral_error: integral_error("spline", None),
            nodes_ok: summary.node_consistency.passed,
        });
    }
    view.series = series;
    Ok(view)
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<JsValue, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_wasm_bindgen::to_value(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Names of the built-in target functions.
#[wasm_bindgen(js_name = functionNames)]
pub fn function_names() -> Vec<String> {
    hermite_rolle::DifferentiableFunction::BUILTIN_NAMES
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[wasm_bindgen]
pub fn interpolate(function: &str, nodes: &str, samples: usize) -> Result<JsValue, JsError> {
    to_js(interpolation_view(function, nodes, samples))
}

#[wasm_bindgen(js_name = rolleFunction)]
pub fn rolle_function(function: &str, nodes: &str, xz_offset: f64, steps: usize) -> Result<JsValue, JsError> {
    to_js(rolle_view(function, nodes, xz_offset, steps))
}

#[wasm_bindgen]
pub fn correct(function: &str, nodes: &str, steps: usize, degrees: &str, spline: bool) -> Result<JsValue, JsError> {
    to_js(correction_view(function, nodes, steps, degrees, spline))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thinning_keeps_both_ends_and_bounds_length() {
        assert!(thin(0).is_empty());
        assert_eq!(thin(3), vec![0, 1, 2]);
        for len in [599, 600, 601, 100_001] {
            let idx = thin(len);
            assert_eq!(idx[0], 0);
            assert_eq!(*idx.last().unwrap(), len - 1);
            assert!(idx.len() <= MAX_PLOT_POINTS + 1, "{len}: {}", idx.len());
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
