//! The operations behind each subcommand, usable without the binary.

use std::collections::BTreeMap;
use std::time::Instant;

use cascade_core::schmidt::{ConvergenceLevel, ConvergenceRecord, EIGEN_FLOOR};
use cascade_core::{
    converge_entropy, decompose, eval, project, slice_3d, solve_angles, AmplitudeGrid2D, AmplitudeGrid3D,
    Complex64, FwmGeometry, FwmSolution, GridSpec, SchmidtResult,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, DEFAULT_VOLUME_POINTS};
use crate::format::{fmt_num, round_sig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] cascade_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 2 for bad input, 3 when the numerics fail, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn require_fixed(cfg: &RunConfig, wanted: usize, what: &str) -> Result<(), ConfigError> {
    if cfg.fixed.len() != wanted {
        let labels: Vec<String> = cfg
            .route
            .photon_labels()
            .iter()
            .map(|p| format!("fixed.{}", p.ascii_label()))
            .collect();
        return Err(ConfigError::new(
            None,
            "fixed",
            format!(
                "{what} of route {} needs {wanted} fixed photon(s), got {} (choose from {})",
                cfg.route,
                cfg.fixed.len(),
                labels.join(", ")
            ),
        ));
    }
    Ok(())
}

/// The amplitude at one detuning tuple, ordered as the route's photons.
pub fn eval_point(cfg: &RunConfig, detunings: &[f64]) -> CliResult<Complex64> {
    if detunings.len() != cfg.route.arity() {
        return Err(ConfigError::new(
            None,
            "detunings",
            format!(
                "route {} takes {} detunings ({}), got {}",
                cfg.route,
                cfg.route.arity(),
                cfg.route.photon_labels().iter().map(|p| p.label()).collect::<Vec<_>>().join(", "),
                detunings.len()
            ),
        )
        .into());
    }
    Ok(eval(cfg.route, &cfg.params, detunings)?)
}

/// Biphoton grid of the configured projection.
pub fn project_grid(cfg: &RunConfig) -> CliResult<AmplitudeGrid2D> {
    require_fixed(cfg, cfg.route.arity() - 2, "a biphoton projection")?;
    let spec = cfg.grid_spec(GridSpec::DEFAULT_POINTS);
    Ok(project(cfg.route, &cfg.params, &cfg.fixed, &spec)?)
}

/// Decomposes the configured projection, refining the grid first when
/// `cfg.converge` is set.
pub fn schmidt(cfg: &RunConfig) -> CliResult<SchmidtResult> {
    require_fixed(cfg, cfg.route.arity() - 2, "a biphoton projection")?;
    let spec = cfg.grid_spec(GridSpec::DEFAULT_POINTS);
    if cfg.converge {
        Ok(converge_entropy(cfg.route, &cfg.params, &cfg.fixed, &spec, cfg.tol)?)
    } else {
        Ok(decompose(&project(cfg.route, &cfg.params, &cfg.fixed, &spec)?)?)
    }
}

/// Volume of a four-photon route with one photon fixed. Without an explicit
/// `grid.n_points` the volume is sampled on [`DEFAULT_VOLUME_POINTS`] points.
pub fn volume(cfg: &RunConfig) -> CliResult<AmplitudeGrid3D> {
    if cfg.route.arity() != 4 {
        return Err(ConfigError::new(
            None,
            "route",
            format!("volumes need a four-photon route, {} has {} photons", cfg.route, cfg.route.arity()),
        )
        .into());
    }
    require_fixed(cfg, 1, "a volume")?;
    let spec = cfg.grid_spec(DEFAULT_VOLUME_POINTS);
    Ok(slice_3d(cfg.route, &cfg.params, cfg.fixed[0], &spec)?)
}

/// Solves the phase-matching angles; arguments in degrees.
pub fn fwm(theta_a_deg: f64, theta_b_deg: f64, ratio: f64) -> CliResult<FwmSolution> {
    let geom = FwmGeometry::from_degrees(theta_a_deg, theta_b_deg, ratio);
    geom.validate().map_err(|e| ConfigError::new(None, "fwm", e.to_string()))?;
    Ok(solve_angles(&geom, None)?)
}

/// Summary written by `cascade schmidt`. Floats are rounded to 12
/// significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: BTreeMap<String, String>,
    pub route: String,
    pub axes: Vec<String>,
    pub n_points: usize,
    pub half_width: f64,
    pub spacing: f64,
    pub entropy: f64,
    pub schmidt_number: f64,
    /// The leading `eigenvalues` Schmidt coefficients.
    pub eigenvalues: Vec<f64>,
    /// Weight of the modes beyond the listed ones.
    pub tail_mass: f64,
    /// Their contribution to the entropy.
    pub tail_entropy: f64,
    pub convergence: ConvergenceRecord,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(cfg: &RunConfig, result: &SchmidtResult, timing_ms: f64) -> Self {
        let k = cfg.eigenvalues.min(result.eigenvalues.len());
        let tail = &result.eigenvalues[k..];
        let tail_mass: f64 = tail.iter().sum();
        let tail_entropy: f64 = tail
            .iter()
            .filter(|&&l| l >= EIGEN_FLOOR)
            .map(|&l| -l * l.log2())
            .sum();
        let conv = &result.convergence;
        Self {
            config: cfg.to_map(),
            route: cfg.route.to_string(),
            axes: result.spec.axes.iter().map(|p| p.label().to_owned()).collect(),
            n_points: result.spec.n_points,
            half_width: round_sig(result.spec.half_width),
            spacing: round_sig(result.spec.spacing()),
            entropy: round_sig(result.entropy),
            schmidt_number: round_sig(result.schmidt_number()),
            eigenvalues: result.eigenvalues[..k].iter().map(|&l| round_sig(l)).collect(),
            tail_mass: round_sig(tail_mass),
            tail_entropy: round_sig(tail_entropy),
            convergence: ConvergenceRecord {
                converged: conv.converged,
                delta_entropy: conv.delta_entropy.map(round_sig),
                levels: conv
                    .levels
                    .iter()
                    .map(|l| ConvergenceLevel {
                        n_points: l.n_points,
                        entropy: round_sig(l.entropy),
                    })
                    .collect(),
            },
            timing_ms: round_sig(timing_ms),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// [`schmidt`] plus its report.
pub fn schmidt_report(cfg: &RunConfig) -> CliResult<(SchmidtResult, Report)> {
    let start = Instant::now();
    let result = schmidt(cfg)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let report = Report::new(cfg, &result, ms);
    Ok((result, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub entropy: f64,
    pub eigenvalues: Vec<f64>,
    pub converged: bool,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// One value per sweep axis, in axis order.
    pub values: Vec<f64>,
    pub outcome: Result<SweepOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub params: Vec<String>,
    pub eigenvalues: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut header = self.params.clone();
        header.push("entropy".into());
        header.extend((1..=self.eigenvalues).map(|n| format!("lambda_{n}")));
        header.extend(["converged".into(), "n_points".into(), "error".into()]);
        let mut out = header.join(",") + "\n";
        for row in &self.rows {
            let mut fields: Vec<String> = row.values.iter().map(|&v| fmt_num(v)).collect();
            match &row.outcome {
                Ok(o) => {
                    fields.push(fmt_num(o.entropy));
                    fields.extend((0..self.eigenvalues).map(|n| o.eigenvalues.get(n).map_or("0".into(), |&l| fmt_num(l))));
                    fields.push(o.converged.to_string());
                    fields.push(o.n_points.to_string());
                    fields.push(String::new());
                }
                Err(msg) => {
                    fields.extend(std::iter::repeat(String::new()).take(self.eigenvalues + 3));
                    fields.push(msg.replace([',', '\n', '\r'], ";"));
                }
            }
            out += &fields.join(",");
            out.push('\n');
        }
        out
    }
}

/// Cartesian product of the sweep axes, first axis slowest.
pub fn sweep_points(cfg: &RunConfig) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in &cfg.sweep {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

fn sweep_one(cfg: &RunConfig, values: &[f64]) -> Result<SweepOutcome, String> {
    let mut point = cfg.clone();
    point.sweep.clear();
    for (axis, &v) in cfg.sweep.iter().zip(values) {
        point.apply(axis.param, v).map_err(|e| e.to_string())?;
    }
    point.validate().map_err(|e| e.to_string())?;
    let r = schmidt(&point).map_err(|e| e.to_string())?;
    Ok(SweepOutcome {
        entropy: r.entropy,
        eigenvalues: r.eigenvalues.iter().take(cfg.eigenvalues).copied().collect(),
        converged: r.convergence.converged,
        n_points: r.spec.n_points,
    })
}

/// Runs [`schmidt`] at every sweep point on `cfg.workers` threads. Rows come
/// back in [`sweep_points`] order whatever the thread count; a failing point
/// records its error instead of aborting the sweep.
pub fn run_sweep(cfg: &RunConfig) -> CliResult<SweepTable> {
    require_fixed(cfg, cfg.route.arity() - 2, "a biphoton projection")?;
    let points = sweep_points(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ConfigError::new(None, "workers", e.to_string()))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|values| SweepRow {
                values: values.clone(),
                outcome: sweep_one(cfg, values),
            })
            .collect()
    });
    Ok(SweepTable {
        params: cfg.sweep.iter().map(|a| a.param.key()).collect(),
        eigenvalues: cfg.eigenvalues,
        rows,
    })
}
