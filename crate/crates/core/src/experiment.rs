//! End-to-end runs: configuration, orchestration and report files.
//!
//! A run goes hermite -> bootstrap -> branch selection -> fits -> corrections
//! and writes, into the output directory,
//!
//! | file               | contents                                        |
//! |--------------------|-------------------------------------------------|
//! | `config.echo`      | the effective configuration, `key = value`      |
//! | `trajectory.csv`   | `x,xi`                                          |
//! | `error_curves.csv` | `x,delta_true,delta_model,difference`           |
//! | `fits.json`        | per-degree max error and `V`, spline summary    |
//! | `integration.json` | integration errors of `H` and of each `H + E`   |
//!
//! Files are written as soon as their stage completes, so a failed run keeps
//! everything produced before the failure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::corrector::{
    integration_report, max_error_on_grid, node_consistency_check, CorrectedApproximant,
    CorrectorError, IntegrationReport, NodeConsistencyReport,
};
use crate::fitting::{
    fit_clamped_spline, fit_polynomial_ls, spline_end_slopes, spline_error_bound, EndSlopes,
    FitError, FitResult,
};
use crate::function::DifferentiableFunction;
use crate::hermite::{HermiteError, NodeSet};
use crate::report::{csv_columns, f64_17, opt_f64_17, vec_f64_17};
use crate::rolle::{
    bootstrap_xi, select_branch, RolleError, RolleProblem, RolleTrajectory, SolveSettings,
    TrajectoryStatus,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: `{value}` ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown function `{0}` (available: {list})", list = DifferentiableFunction::BUILTIN_NAMES.join(", "))]
    UnknownFunction(String),
    #[error("invalid nodes: {0}")]
    Nodes(#[from] HermiteError),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Hermite,
    Bootstrap,
    BranchSelection,
    Fitting,
    Spline,
    Correction,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Hermite => "hermite",
            Stage::Bootstrap => "bootstrap",
            Stage::BranchSelection => "branch-selection",
            Stage::Fitting => "fitting",
            Stage::Spline => "spline",
            Stage::Correction => "correction",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum StageFailure {
    #[error(transparent)]
    Rolle(#[from] RolleError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Corrector(#[from] CorrectorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: StageFailure,
    },
}

impl ExperimentError {
    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Stage {
                source: StageFailure::Io(_),
                ..
            } => 1,
            ExperimentError::Stage { .. } => 3,
        }
    }
}

fn stage<T, E: Into<StageFailure>>(stage: Stage, r: Result<T, E>) -> Result<T, ExperimentError> {
    r.map_err(|e| ExperimentError::Stage {
        stage,
        source: e.into(),
    })
}

/// Everything that defines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function: String,
    pub nodes: Vec<f64>,
    /// `x_z = x_0 + xz_offset`.
    pub xz_offset: f64,
    /// Integration stops at `x_n - right_margin`.
    pub right_margin: f64,
    pub steps: usize,
    pub bootstrap_grid: usize,
    pub degrees: Vec<usize>,
    pub spline: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            function: "exp-sin".to_string(),
            nodes: vec![0.0, 1.5 * std::f64::consts::PI],
            xz_offset: 1e-5,
            right_margin: 1e-4,
            steps: 100_000,
            bootstrap_grid: 10_000,
            degrees: vec![5, 7, 9, 11],
            spline: true,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| {
            s.trim().parse::<T>().map_err(|e| ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one field from its textual form. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.trim().replace('-', "_").as_str() {
            "function" => self.function = value.trim().to_string(),
            "nodes" => self.nodes = parse_list(key, value)?,
            "xz_offset" => self.xz_offset = parse_one(key, value)?,
            "right_margin" => self.right_margin = parse_one(key, value)?,
            "steps" => self.steps = parse_one(key, value)?,
            "bootstrap_grid" | "grid" => self.bootstrap_grid = parse_one(key, value)?,
            "degrees" => self.degrees = parse_list(key, value)?,
            "spline" => self.spline = parse_one(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text)
    }

    /// The configuration in the same `key = value` form [`merge_text`]
    /// accepts; floats round-trip exactly.
    ///
    /// [`merge_text`]: Self::merge_text
    pub fn to_text(&self) -> String {
        format!(
            "function = {}\nnodes = {}\nxz_offset = {:e}\nright_margin = {:e}\nsteps = {}\nbootstrap_grid = {}\ndegrees = {}\nspline = {}\n",
            self.function,
            join(&self.nodes),
            self.xz_offset,
            self.right_margin,
            self.steps,
            self.bootstrap_grid,
            join(&self.degrees),
            self.spline,
        )
    }

    /// Checks the configuration and resolves the function and nodes.
    pub fn validate(&self) -> Result<(DifferentiableFunction, NodeSet), ConfigError> {
        let f = DifferentiableFunction::by_name(&self.function)
            .ok_or_else(|| ConfigError::UnknownFunction(self.function.clone()))?;
        let nodes = NodeSet::new(self.nodes.clone())?;
        if self.steps < 10 {
            return Err(ConfigError::Invalid(format!("steps must be >= 10, got {}", self.steps)));
        }
        if self.bootstrap_grid < 100 {
            return Err(ConfigError::Invalid(format!(
                "bootstrap_grid must be >= 100, got {}",
                self.bootstrap_grid
            )));
        }
        let spacing = nodes.min_spacing();
        for (name, v) in [("xz_offset", self.xz_offset), ("right_margin", self.right_margin)] {
            if !(v > 0.0 && v < spacing) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must lie in (0, {spacing}), got {v}"
                )));
            }
        }
        if self.xz_offset + self.right_margin >= nodes.last() - nodes.first() {
            return Err(ConfigError::Invalid(
                "xz_offset + right_margin leaves no interval to integrate over".into(),
            ));
        }
        let n = nodes.n();
        let needed = if self.spline { 2 * n + 6 } else { 2 * n + 3 };
        if f.max_order() < needed {
            return Err(ConfigError::Invalid(format!(
                "`{}` provides derivatives up to order {}, this run needs {needed}",
                f.name(),
                f.max_order()
            )));
        }
        Ok((f, nodes))
    }
}

/// One row of the degree table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    #[serde(flatten)]
    pub fit: FitResult,
    /// `max_i |f(x_i) - (H + E)(x_i)|` over the trajectory abscissae.
    #[serde(serialize_with = "f64_17")]
    pub max_error: f64,
    pub node_consistency: NodeConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplineSummary {
    pub end_slopes: EndSlopes,
    #[serde(serialize_with = "f64_17")]
    pub max_error: f64,
    #[serde(serialize_with = "f64_17")]
    pub error_bound: f64,
    pub node_consistency: NodeConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub samples: usize,
    #[serde(serialize_with = "f64_17")]
    pub h: f64,
    #[serde(serialize_with = "f64_17")]
    pub x_start: f64,
    #[serde(serialize_with = "f64_17")]
    pub x_end: f64,
    pub status: TrajectoryStatus,
    #[serde(serialize_with = "f64_17")]
    pub min_denominator: f64,
    /// `max_i |delta_true(x_i) - delta_model(xi_i, x_i)|`.
    #[serde(serialize_with = "f64_17")]
    pub max_model_discrepancy: f64,
}

impl TrajectorySummary {
    fn new(traj: &RolleTrajectory, prob: &RolleProblem) -> Self {
        Self {
            samples: traj.len(),
            h: traj.h,
            x_start: traj.x_start,
            x_end: traj.x_end,
            status: traj.status.clone(),
            min_denominator: traj.min_denominator_seen,
            max_model_discrepancy: traj.max_model_discrepancy(prob),
        }
    }
}

/// Contents of `fits.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitTable {
    pub function: String,
    #[serde(serialize_with = "vec_f64_17")]
    pub nodes: Vec<f64>,
    pub degenerate: bool,
    #[serde(serialize_with = "vec_f64_17")]
    pub hermite_coefficients: Vec<f64>,
    #[serde(serialize_with = "opt_f64_17")]
    pub x_z: Option<f64>,
    #[serde(serialize_with = "vec_f64_17")]
    pub bootstrap_roots: Vec<f64>,
    #[serde(serialize_with = "opt_f64_17")]
    pub accepted_xi_z: Option<f64>,
    #[serde(serialize_with = "vec_f64_17")]
    pub rejected_roots: Vec<f64>,
    pub trajectory: Option<TrajectorySummary>,
    /// `max_i |f(x_i) - H(x_i)|`.
    #[serde(serialize_with = "f64_17")]
    pub uncorrected_max_error: f64,
    pub fits: Vec<FitSummary>,
    pub spline: Option<SplineSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectedIntegral {
    /// `"polynomial"` or `"spline"`.
    pub kind: &'static str,
    pub degree: Option<usize>,
    #[serde(serialize_with = "f64_17")]
    pub integral: f64,
    #[serde(serialize_with = "f64_17")]
    pub abs_error: f64,
}

/// Contents of `integration.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationSummary {
    #[serde(serialize_with = "vec_f64_17")]
    pub interval: Vec<f64>,
    #[serde(serialize_with = "f64_17")]
    pub exact: f64,
    #[serde(serialize_with = "f64_17")]
    pub hermite_integral: f64,
    #[serde(serialize_with = "f64_17")]
    pub hermite_error: f64,
    pub corrected: Vec<CorrectedIntegral>,
}

impl IntegrationSummary {
    fn push(&mut self, kind: &'static str, degree: Option<usize>, r: &IntegrationReport) {
        self.corrected.push(CorrectedIntegral {
            kind,
            degree,
            integral: r.corrected_integral,
            abs_error: r.corrected_error,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub table: FitTable,
    pub integration: Option<IntegrationSummary>,
    pub trajectory: Option<RolleTrajectory>,
}

struct Outputs<'a> {
    dir: Option<&'a Path>,
}

impl Outputs<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), ExperimentError> {
        if let Some(dir) = self.dir {
            stage(Stage::Output, fs::write(dir.join(name), contents))?;
        }
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), ExperimentError> {
        let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
        text.push('\n');
        self.write(name, &text)
    }
}

/// Runs the whole pipeline. When `out_dir` is given it is created if needed
/// and receives the report files.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport, ExperimentError> {
    let (f, nodes) = cfg.validate()?;
    if let Some(dir) = out_dir {
        stage(Stage::Output, fs::create_dir_all(dir))?;
    }
    let out = Outputs { dir: out_dir };
    out.write("config.echo", &cfg.to_text())?;

    let prob = stage(Stage::Hermite, RolleProblem::new(f.clone(), nodes.clone()))?;
    let (lo, hi) = (nodes.first(), nodes.last());
    let exact_integral = f.definite_integral(lo, hi);
    let mut integration = exact_integral.map(|exact| {
        let r = integration_report(&CorrectedApproximant::uncorrected(prob.hermite.clone()), exact);
        IntegrationSummary {
            interval: vec![lo, hi],
            exact,
            hermite_integral: r.hermite_integral,
            hermite_error: r.hermite_error,
            corrected: Vec::new(),
        }
    });

    let x_z = lo + cfg.xz_offset;
    let mut table = FitTable {
        function: f.name().to_string(),
        nodes: nodes.as_slice().to_vec(),
        degenerate: false,
        hermite_coefficients: prob.hermite.poly.coeffs().to_vec(),
        x_z: Some(x_z),
        bootstrap_roots: Vec::new(),
        accepted_xi_z: None,
        rejected_roots: Vec::new(),
        trajectory: None,
        uncorrected_max_error: 0.0,
        fits: Vec::new(),
        spline: None,
    };

    let roots = match bootstrap_xi(&prob, x_z, cfg.bootstrap_grid) {
        Ok(r) => r,
        Err(RolleError::Degenerate { .. }) => {
            // f^(2n+2) is constant: H already carries the whole error model.
            table.degenerate = true;
            let grid: Vec<f64> = (0..=cfg.steps)
                .map(|i| lo + (hi - lo) * i as f64 / cfg.steps as f64)
                .collect();
            table.uncorrected_max_error = grid
                .iter()
                .map(|&x| prob.delta_true(x).abs())
                .fold(0.0, f64::max);
            out.write_json("fits.json", &table)?;
            if let Some(integ) = &integration {
                out.write_json("integration.json", integ)?;
            }
            return Ok(ExperimentReport {
                config: cfg.clone(),
                table,
                integration,
                trajectory: None,
            });
        }
        Err(e) => {
            return Err(ExperimentError::Stage {
                stage: Stage::Bootstrap,
                source: e.into(),
            })
        }
    };
    table.bootstrap_roots = roots.clone();

    let settings = SolveSettings {
        steps: cfg.steps,
        right_margin: cfg.right_margin,
    };
    let traj = stage(Stage::BranchSelection, select_branch(&prob, x_z, &roots, &settings))?;
    table.accepted_xi_z = Some(traj.accepted_xi_z);
    table.rejected_roots = traj.rejected_roots.clone();
    table.trajectory = Some(TrajectorySummary::new(&traj, &prob));
    out.write("trajectory.csv", &traj.to_csv())?;

    let delta_true: Vec<f64> = traj.xs.iter().map(|&x| prob.delta_true(x)).collect();
    let delta_model: Vec<f64> = traj
        .xs
        .iter()
        .zip(&traj.xis)
        .map(|(&x, &xi)| prob.delta_model(xi, x))
        .collect();
    let difference: Vec<f64> = delta_true.iter().zip(&delta_model).map(|(a, b)| a - b).collect();
    out.write(
        "error_curves.csv",
        &csv_columns(
            &["x", "delta_true", "delta_model", "difference"],
            &[&traj.xs, &delta_true, &delta_model, &difference],
        ),
    )?;
    table.uncorrected_max_error = delta_true.iter().map(|d| d.abs()).fold(0.0, f64::max);

    let samples = traj.remainder_samples(&prob);
    let fits = crate::parallel_map(&cfg.degrees, |&deg| fit_polynomial_ls(&traj.xs, &samples, deg));
    for fit in fits {
        let fit = stage(Stage::Fitting, fit)?;
        let ca = CorrectedApproximant::with_polynomial(prob.hermite.clone(), &fit.h_xi);
        let max_error = stage(Stage::Correction, max_error_on_grid(&ca, &f, &traj.xs))?;
        if let (Some(integ), Some(exact)) = (integration.as_mut(), exact_integral) {
            integ.push("polynomial", Some(fit.degree), &integration_report(&ca, exact));
        }
        table.fits.push(FitSummary {
            node_consistency: node_consistency_check(&ca, &f),
            fit,
            max_error,
        });
    }

    if cfg.spline {
        let end_slopes = stage(Stage::Spline, spline_end_slopes(&traj, &prob))?;
        let spline = stage(
            Stage::Spline,
            fit_clamped_spline(&traj.xs, &samples, end_slopes.left, end_slopes.right),
        )?;
        let error_bound = stage(Stage::Spline, spline_error_bound(&traj, &prob))?;
        let ca = CorrectedApproximant::with_spline(prob.hermite.clone(), spline);
        let max_error = stage(Stage::Correction, max_error_on_grid(&ca, &f, &traj.xs))?;
        if let (Some(integ), Some(exact)) = (integration.as_mut(), exact_integral) {
            integ.push("spline", None, &integration_report(&ca, exact));
        }
        table.spline = Some(SplineSummary {
            end_slopes,
            max_error,
            error_bound,
            node_consistency: node_consistency_check(&ca, &f),
        });
    }

    out.write_json("fits.json", &table)?;
    if let Some(integ) = &integration {
        out.write_json("integration.json", integ)?;
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        table,
        integration,
        trajectory: Some(traj),
    })
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.table;
        writeln!(f, "function        {}", t.function)?;
        writeln!(f, "nodes           {:?}", t.nodes)?;
        writeln!(f, "H coefficients  {:?}", t.hermite_coefficients)?;
        if t.degenerate {
            writeln!(f, "degenerate: f^(2n+2) is constant, nothing to correct")?;
            writeln!(f, "max |f - H|     {:.3e}", t.uncorrected_max_error)?;
            return Ok(());
        }
        writeln!(f, "bootstrap roots {:?}", t.bootstrap_roots)?;
        if let Some(xi) = t.accepted_xi_z {
            writeln!(f, "accepted xi_z   {xi} (rejected {:?})", t.rejected_roots)?;
        }
        if let Some(tr) = &t.trajectory {
            writeln!(
                f,
                "trajectory      {} samples, h = {:.4e}, status {:?}",
                tr.samples, tr.h, tr.status
            )?;
            writeln!(f, "max |dtrue - dmodel| {:.3e}", tr.max_model_discrepancy)?;
        }
        writeln!(f, "max |f - H|     {:.4}", t.uncorrected_max_error)?;
        writeln!(f, "{:>6}  {:>12}  {:>12}  nodes", "degree", "max error", "V")?;
        for row in &t.fits {
            writeln!(
                f,
                "{:>6}  {:>12.3e}  {:>12.3e}  {}",
                row.fit.degree,
                row.max_error,
                row.fit.v,
                if row.node_consistency.passed { "ok" } else { "FAIL" }
            )?;
        }
        if let Some(s) = &t.spline {
            writeln!(
                f,
                "spline  {:>12.3e}  bound {:.3e}  {}",
                s.max_error,
                s.error_bound,
                if s.node_consistency.passed { "ok" } else { "FAIL" }
            )?;
        }
        if let Some(integ) = &self.integration {
            writeln!(f, "|int f - int H|      {:.3e}", integ.hermite_error)?;
            for c in &integ.corrected {
                match c.degree {
                    Some(d) => writeln!(f, "|int f - int (H+E)| {:.3e}  ({} degree {d})", c.abs_error, c.kind)?,
                    None => writeln!(f, "|int f - int (H+E)| {:.3e}  ({})", c.abs_error, c.kind)?,
                }
            }
        }
        Ok(())
    }
}
