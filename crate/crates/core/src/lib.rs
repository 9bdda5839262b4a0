//! Recovering the Rolle function of a Hermite interpolant and using it to
//! correct the interpolant.
//!
//! The pipeline is:
//!
//! 1. [`hermite::build_hermite`] builds `H_{2n+1}` matching `f` and `f'` at the nodes.
//! 2. [`rolle::bootstrap_xi`] solves the remainder identity for `xi` at a
//!    point `x_z` next to the first node; [`rolle::select_branch`] integrates
//!    the Rolle ODE from every candidate and keeps the one that stays inside
//!    the node interval.
//! 3. [`fitting`] approximates `f^(2n+2)(xi(x))` from the trajectory samples.
//! 4. [`corrector`] adds `E(x) = H_xi(x) Q(x)^2 / (2n+2)!` to `H`.
//!
//! [`experiment`] runs all of it end to end and writes the reports.

pub mod corrector;
pub mod experiment;
pub mod fitting;
pub mod function;
pub mod hermite;
pub mod polynomial;
pub mod report;
pub mod rk;
pub mod rolle;

pub use corrector::{corrected_eval, error_polynomial, CorrectedApproximant};
pub use fitting::{fit_clamped_spline, fit_polynomial_ls, CubicSpline, FitResult};
pub use function::DifferentiableFunction;
pub use hermite::{build_hermite, delta_model, delta_true, q_poly, HermiteInterpolant, NodeSet};
pub use polynomial::Polynomial;
pub use rolle::{bootstrap_xi, ode_rhs, select_branch, solve_rolle, RolleProblem, RolleTrajectory};

/// Maps `f` over `items` on scoped threads, preserving order. Targets without
/// threads (`wasm32`) run the items one after another.
pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if cfg!(target_arch = "wasm32") || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items.iter().map(|item| s.spawn(move || f(item))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    })
}
