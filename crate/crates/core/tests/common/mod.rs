#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use hermite_rolle::rolle::{bootstrap_xi, select_branch, SolveSettings};
use hermite_rolle::{DifferentiableFunction, NodeSet, RolleProblem, RolleTrajectory};

pub const X_Z: f64 = 1e-5;

pub fn worked_problem() -> RolleProblem {
    RolleProblem::new(
        DifferentiableFunction::exp_sin(),
        NodeSet::new(vec![0.0, 1.5 * PI]).unwrap(),
    )
    .unwrap()
}

/// The accepted worked-example trajectory at the default settings, solved once.
pub fn worked_trajectory() -> &'static (RolleProblem, RolleTrajectory) {
    static CELL: OnceLock<(RolleProblem, RolleTrajectory)> = OnceLock::new();
    CELL.get_or_init(|| {
        let prob = worked_problem();
        let roots = bootstrap_xi(&prob, X_Z, 10_000).unwrap();
        let traj = select_branch(&prob, X_Z, &roots, &SolveSettings::default()).unwrap();
        (prob, traj)
    })
}

pub const DEGREES: [usize; 4] = [5, 7, 9, 11];

/// `f^(2n+2)(xi(x_i))` sampled along the worked trajectory.
pub fn worked_samples() -> (&'static [f64], Vec<f64>) {
    let (prob, traj) = worked_trajectory();
    (&traj.xs, traj.remainder_samples(prob))
}

/// Least-squares fits of the worked samples at each reference degree.
pub fn worked_fits() -> &'static [hermite_rolle::FitResult] {
    static CELL: OnceLock<Vec<hermite_rolle::FitResult>> = OnceLock::new();
    CELL.get_or_init(|| {
        let (xs, ys) = worked_samples();
        DEGREES
            .iter()
            .map(|&d| hermite_rolle::fit_polynomial_ls(xs, &ys, d).unwrap())
            .collect()
    })
}

/// Clamped spline through the worked samples with chain-rule end slopes.
pub fn worked_spline() -> &'static hermite_rolle::CubicSpline {
    static CELL: OnceLock<hermite_rolle::CubicSpline> = OnceLock::new();
    CELL.get_or_init(|| {
        let (prob, traj) = worked_trajectory();
        let (xs, ys) = worked_samples();
        let slopes = hermite_rolle::fitting::spline_end_slopes(traj, prob).unwrap();
        hermite_rolle::fit_clamped_spline(xs, &ys, slopes.left, slopes.right).unwrap()
    })
}
