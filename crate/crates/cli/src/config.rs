//! Flat `key = value` run configuration.
//!
//! ```text
//! # B1 route, first signal detected at zero detuning
//! route = B1
//! gammaN = 5
//! tau_a = 0.25
//! tau_b = 0.25
//! fixed.s = 0
//! grid.half_width = 200
//! grid.n_points = 1024
//! tol = 0.02
//! sweep.tau_b = 0.25, 0.5, 1.0
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key may appear once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cascade_core::{GridSpec, Photon, Route, SpectralParams};
use thiserror::Error;

use crate::format::fmt_num;

pub const DEFAULT_TOL: f64 = cascade_core::schmidt::DEFAULT_TOL;
pub const DEFAULT_EIGENVALUES: usize = 10;
/// Volumes default to a much coarser grid than biphoton projections.
pub const DEFAULT_VOLUME_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(line: Option<usize>, key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line,
            key: key.into(),
            message: message.into(),
        }
    }
}

/// A numeric parameter that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    TauA,
    TauB,
    /// The same decay rate for every stage.
    GammaN,
    /// Decay rate of a single stage, 1-based as in `gammaN.2`.
    GammaStage(usize),
    DeltaA3,
    DeltaOmegaI,
    HalfWidth,
    NPoints,
    Fixed(Photon),
}

impl SweepParam {
    pub fn key(&self) -> String {
        match self {
            SweepParam::TauA => "tau_a".into(),
            SweepParam::TauB => "tau_b".into(),
            SweepParam::GammaN => "gammaN".into(),
            SweepParam::GammaStage(k) => format!("gammaN.{k}"),
            SweepParam::DeltaA3 => "delta_a3".into(),
            SweepParam::DeltaOmegaI => "delta_omega_i".into(),
            SweepParam::HalfWidth => "grid.half_width".into(),
            SweepParam::NPoints => "grid.n_points".into(),
            SweepParam::Fixed(p) => format!("fixed.{}", p.ascii_label()),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "tau_a" => SweepParam::TauA,
            "tau_b" => SweepParam::TauB,
            "gammaN" => SweepParam::GammaN,
            "delta_a3" => SweepParam::DeltaA3,
            "delta_omega_i" => SweepParam::DeltaOmegaI,
            "grid.half_width" => SweepParam::HalfWidth,
            "grid.n_points" => SweepParam::NPoints,
            _ => {
                if let Some(stage) = s.strip_prefix("gammaN.") {
                    match stage.parse::<usize>() {
                        Ok(k @ 1..=3) => SweepParam::GammaStage(k),
                        _ => return Err(format!("stage must be 1, 2 or 3 in `{s}`")),
                    }
                } else if let Some(photon) = s.strip_prefix("fixed.") {
                    SweepParam::Fixed(photon.parse().map_err(|e| format!("{e}"))?)
                } else {
                    return Err(format!(
                        "`{s}` is not a sweepable parameter (tau_a, tau_b, gammaN, gammaN.<stage>, \
                         delta_a3, delta_omega_i, grid.half_width, grid.n_points, fixed.<photon>)"
                    ));
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub modes: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
    pub volume: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub route: Route,
    pub params: SpectralParams,
    /// Fixed photons in route order.
    pub fixed: Vec<(Photon, f64)>,
    pub half_width: f64,
    /// `None` means the command's default grid density.
    pub n_points: Option<usize>,
    pub tol: f64,
    /// Refine the grid until the entropy settles; otherwise decompose the
    /// configured grid once.
    pub converge: bool,
    pub eigenvalues: usize,
    pub workers: usize,
    pub sweep: Vec<SweepAxis>,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            route: Route::Biphoton,
            params: SpectralParams::default(),
            fixed: Vec::new(),
            half_width: GridSpec::DEFAULT_HALF_WIDTH,
            n_points: None,
            tol: DEFAULT_TOL,
            converge: true,
            eigenvalues: DEFAULT_EIGENVALUES,
            workers: 1,
            sweep: Vec::new(),
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn points_or(&self, default: usize) -> usize {
        self.n_points.unwrap_or(default)
    }

    /// Photons left on the grid axes, in route order.
    pub fn free_axes(&self) -> Vec<Photon> {
        cascade_core::projector::free_axes(self.route, &self.fixed)
    }

    pub fn grid_spec(&self, default_points: usize) -> GridSpec {
        GridSpec::new(self.half_width, self.points_or(default_points), self.free_axes())
    }

    /// Sets a sweepable parameter.
    pub fn apply(&mut self, param: SweepParam, value: f64) -> Result<(), ConfigError> {
        let key = param.key();
        match param {
            SweepParam::TauA => self.params.tau_a = value,
            SweepParam::TauB => self.params.tau_b = value,
            SweepParam::GammaN => self.params.gamma_n = vec![value],
            SweepParam::GammaStage(k) => {
                while self.params.gamma_n.len() < 3 {
                    let last = *self.params.gamma_n.last().unwrap_or(&value);
                    self.params.gamma_n.push(last);
                }
                self.params.gamma_n[k - 1] = value;
            }
            SweepParam::DeltaA3 => self.params.delta_a3 = value,
            SweepParam::DeltaOmegaI => self.params.delta_omega_i = value,
            SweepParam::HalfWidth => self.half_width = value,
            SweepParam::NPoints => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(ConfigError::new(None, key, format!("expected an integer >= 2, got {value}")));
                }
                self.n_points = Some(value as usize);
            }
            SweepParam::Fixed(photon) => self.set_fixed(photon, value, None)?,
        }
        Ok(())
    }

    fn set_fixed(&mut self, photon: Photon, value: f64, line: Option<usize>) -> Result<(), ConfigError> {
        let key = format!("fixed.{}", photon.ascii_label());
        let Some(pos) = self.route.index_of(photon) else {
            let valid: Vec<&str> = self.route.photon_labels().iter().map(|p| p.label()).collect();
            return Err(ConfigError::new(
                line,
                key,
                format!("photon {photon} is not emitted by route {} (photons: {})", self.route, valid.join(", ")),
            ));
        };
        if let Some(entry) = self.fixed.iter_mut().find(|(p, _)| *p == photon) {
            entry.1 = value;
        } else {
            self.fixed.push((photon, value));
            self.fixed
                .sort_by_key(|(p, _)| self.route.index_of(*p).unwrap_or(pos));
        }
        Ok(())
    }

    /// Checks everything that does not depend on the command being run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| ConfigError::new(None, "params", e.to_string()))?;
        for (photon, value) in &self.fixed {
            if self.route.index_of(*photon).is_none() {
                return Err(ConfigError::new(
                    None,
                    format!("fixed.{}", photon.ascii_label()),
                    format!("photon {photon} is not emitted by route {}", self.route),
                ));
            }
            if !value.is_finite() {
                return Err(ConfigError::new(None, format!("fixed.{}", photon.ascii_label()), "must be finite"));
            }
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(ConfigError::new(None, "grid.half_width", "must be positive"));
        }
        if let Some(n) = self.n_points {
            if n < 2 {
                return Err(ConfigError::new(None, "grid.n_points", "must be at least 2"));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ConfigError::new(None, "tol", "must be positive"));
        }
        if self.eigenvalues == 0 {
            return Err(ConfigError::new(None, "eigenvalues", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(ConfigError::new(None, "workers", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical flat form; [`parse_config`] reads it back unchanged.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let list = |v: &[f64]| v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",");
        m.insert("route".into(), self.route.to_string());
        m.insert("gammaN".into(), list(&self.params.gamma_n));
        m.insert("tau_a".into(), fmt_num(self.params.tau_a));
        m.insert("tau_b".into(), fmt_num(self.params.tau_b));
        m.insert("delta_a3".into(), fmt_num(self.params.delta_a3));
        m.insert("delta_omega_i".into(), fmt_num(self.params.delta_omega_i));
        for (p, v) in &self.fixed {
            m.insert(format!("fixed.{}", p.ascii_label()), fmt_num(*v));
        }
        m.insert("grid.half_width".into(), fmt_num(self.half_width));
        if let Some(n) = self.n_points {
            m.insert("grid.n_points".into(), n.to_string());
        }
        m.insert("tol".into(), fmt_num(self.tol));
        m.insert("converge".into(), self.converge.to_string());
        m.insert("eigenvalues".into(), self.eigenvalues.to_string());
        for axis in &self.sweep {
            m.insert(format!("sweep.{}", axis.param), list(&axis.values));
        }
        m
    }

    pub fn to_text(&self) -> String {
        self.to_map()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(Some(line), key, format!("expected a number, got `{}`", v.trim())))?;
    if !x.is_finite() {
        return Err(ConfigError::new(Some(line), key, format!("expected a finite number, got `{}`", v.trim())));
    }
    Ok(x)
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let values = v
        .split(',')
        .map(|item| parse_f64(line, key, item))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(ConfigError::new(Some(line), key, "expected at least one value"));
    }
    Ok(values)
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::new(Some(line), key, format!("expected a non-negative integer, got `{}`", v.trim())))
}

/// Parses and validates a configuration document, filling in defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::new(Some(line), content, "expected `key = value`"));
        };
        let key = key.trim().to_owned();
        if let Some((first, _, _)) = entries.iter().find(|(_, k, _)| *k == key) {
            return Err(ConfigError::new(Some(line), key, format!("duplicate key, first set on line {first}")));
        }
        entries.push((line, key, value.trim().to_owned()));
    }

    let mut cfg = RunConfig::default();
    // the route decides which photon labels are valid, so read it first
    if let Some((line, key, value)) = entries.iter().find(|(_, k, _)| k == "route") {
        cfg.route = value
            .parse()
            .map_err(|e: cascade_core::route::ParseRouteError| ConfigError::new(Some(*line), key, e.to_string()))?;
    }

    for (line, key, value) in &entries {
        let (line, key, value) = (*line, key.as_str(), value.as_str());
        match key {
            "route" => {}
            "gammaN" => cfg.params.gamma_n = parse_list(line, key, value)?,
            "tau_a" => cfg.params.tau_a = parse_f64(line, key, value)?,
            "tau_b" => cfg.params.tau_b = parse_f64(line, key, value)?,
            "delta_a3" => cfg.params.delta_a3 = parse_f64(line, key, value)?,
            "delta_omega_i" => cfg.params.delta_omega_i = parse_f64(line, key, value)?,
            "grid.half_width" => cfg.half_width = parse_f64(line, key, value)?,
            "grid.n_points" => cfg.n_points = Some(parse_usize(line, key, value)?),
            "tol" => cfg.tol = parse_f64(line, key, value)?,
            "converge" => {
                cfg.converge = value
                    .parse()
                    .map_err(|_| ConfigError::new(Some(line), key, format!("expected true or false, got `{value}`")))?
            }
            "eigenvalues" => cfg.eigenvalues = parse_usize(line, key, value)?,
            "workers" => cfg.workers = parse_usize(line, key, value)?,
            "output.report" => cfg.outputs.report = Some(value.into()),
            "output.grid" => cfg.outputs.grid = Some(value.into()),
            "output.modes" => cfg.outputs.modes = Some(value.into()),
            "output.sweep" => cfg.outputs.sweep = Some(value.into()),
            "output.volume" => cfg.outputs.volume = Some(value.into()),
            _ => {
                if let Some(label) = key.strip_prefix("fixed.") {
                    let photon: Photon = label
                        .parse()
                        .map_err(|e: cascade_core::route::ParsePhotonError| {
                            ConfigError::new(Some(line), key, e.to_string())
                        })?;
                    let v = parse_f64(line, key, value)?;
                    cfg.set_fixed(photon, v, Some(line))?;
                } else if let Some(name) = key.strip_prefix("sweep.") {
                    let param: SweepParam = name.parse().map_err(|e| ConfigError::new(Some(line), key, e))?;
                    if cfg.sweep.iter().any(|a| a.param == param) {
                        return Err(ConfigError::new(Some(line), key, "parameter swept twice"));
                    }
                    if let SweepParam::Fixed(p) = param {
                        if cfg.route.index_of(p).is_none() {
                            return Err(ConfigError::new(
                                Some(line),
                                key,
                                format!("photon {p} is not emitted by route {}", cfg.route),
                            ));
                        }
                    }
                    let values = parse_list(line, key, value)?;
                    cfg.sweep.push(SweepAxis { param, values });
                } else {
                    return Err(ConfigError::new(Some(line), key, "unknown key"));
                }
            }
        }
    }

    // a swept fixed photon counts as fixed even if no base value was given
    for axis in cfg.sweep.clone() {
        if let SweepParam::Fixed(p) = axis.param {
            if !cfg.fixed.iter().any(|(q, _)| *q == p) {
                cfg.set_fixed(p, axis.values[0], None)?;
            }
        }
    }

    cfg.validate()?;
    Ok(cfg)
}
