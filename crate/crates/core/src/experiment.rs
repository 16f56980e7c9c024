//! Configuration-driven experiments: soliton profiles, single trajectories,
//! entanglement maps and intensity/absorption sweeps.
//!
//! A run is described by one JSON document ([`RunConfig`]); individual keys
//! can be overridden with `section.key=value` assignments. Every artifact
//! carries the SHA-256 of the final, fully defaulted configuration.

use std::path::{Path, PathBuf};

use log::{info, warn};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::entanglement::{log_negativity, negativity_map};
use crate::moments::{initial_state, propagate_with, MomentState, PropagateOptions, PropagationError, Snapshot};
use crate::output::{self, fmt_f64, fmt_opt, Provenance};
use crate::params::SystemParams;
use crate::soliton::{find_soliton, linear_stability, SolitonError, SolitonKind, SolitonProfile, StabilityReport};
use crate::validity::{err_metric, validity_limit, DEFAULT_ERR_CAP};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[from] SolitonError),
    #[error("propagation error: {0}")]
    Propagation(#[from] PropagationError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 2 config, 3 solver, 4 numerical blow-up, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Solver(_) => 3,
            HarnessError::Propagation(PropagationError::Params(_) | PropagationError::SizeMismatch { .. }) => 2,
            HarnessError::Propagation(_) => 4,
            HarnessError::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            HarnessError::Config(_) => "ConfigError".into(),
            HarnessError::Solver(e) => solver_error_name(e).into(),
            HarnessError::Propagation(PropagationError::NumericalBlowup { .. }) => "NumericalBlowup".into(),
            HarnessError::Propagation(PropagationError::StepCollapse { .. }) => "StepCollapse".into(),
            HarnessError::Propagation(_) => "ConfigError".into(),
            HarnessError::Io { .. } => "IoError".into(),
        }
    }

    /// Machine-readable `{error, message, exit_code}` document.
    pub fn document(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

fn solver_error_name(e: &SolitonError) -> &'static str {
    match e {
        SolitonError::UnsupportedOmega(_) => "UnsupportedOmega",
        SolitonError::NoConvergence { .. } => "NoConvergence",
        SolitonError::WrongBranch { .. } => "WrongBranch",
        SolitonError::EdgeLeak { .. } => "EdgeLeak",
        SolitonError::SizeMismatch { .. } => "SizeMismatch",
        SolitonError::ArrayTooSmall { .. } => "ArrayTooSmall",
    }
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Soliton,
    #[default]
    Propagate,
    Enmap,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { n_sites: SystemParams::default().n_sites, boundary: Boundary::Open }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolitonConfig {
    pub kind: SolitonKind,
    pub omega: f64,
}

impl Default for SolitonConfig {
    fn default() -> Self {
        Self { kind: SolitonKind::Twisted, omega: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumConfig {
    #[serde(rename = "L")]
    pub scale: f64,
    pub gamma: f64,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self { scale: 0.01, gamma: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    pub z_max: f64,
    pub step: f64,
    pub output_stride: usize,
    pub adaptive: bool,
    /// Relative tolerance used when `adaptive` is set.
    pub tolerance: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self { z_max: 1.5, step: 1e-4, output_stride: 10, adaptive: false, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(rename = "L")]
    pub scale: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// 0-based waveguide pair; defaults to the soliton's central pair.
    pub pair: Option<(usize, usize)>,
    pub sweep_grid: Option<SweepGrid>,
    pub err_cap: f64,
    /// Sweep worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { mode: Mode::Propagate, pair: None, sweep_grid: None, err_cap: DEFAULT_ERR_CAP, workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub soliton: SolitonConfig,
    pub quantum: QuantumConfig,
    pub integration: IntegrationConfig,
    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

/// Applies `a.b.c=value` to a JSON tree. The value is parsed as JSON when
/// possible (`0.02`, `true`, `[1, 2]`, `{"multi_twisted": 3}`) and taken as a
/// plain string otherwise (`twisted`).
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), HarnessError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{assignment}` is not of the form key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(config_err(format!("override `{assignment}` has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        if !node.is_object() {
            return Err(config_err(format!("override `{path}`: `{key}` is not a section")));
        }
        node = node
            .as_object_mut()
            .expect("checked above")
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node.as_object_mut().ok_or_else(|| config_err(format!("override `{path}` does not name a key")))?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parses, applies overrides and validates.
    pub fn from_json_str(text: &str, overrides: &[String]) -> Result<Self, HarnessError> {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
        if !doc.is_object() {
            return Err(config_err("configuration must be a JSON object"));
        }
        for assignment in overrides {
            apply_override(&mut doc, assignment)?;
        }
        let config: RunConfig = serde_json::from_value(doc).map_err(|e| config_err(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text, overrides)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let n = self.lattice.n_sites;
        self.system_params().validate().map_err(|e| config_err(e.to_string()))?;
        if !self.soliton.omega.is_finite() {
            return Err(config_err("soliton.omega must be finite"));
        }
        if self.integration.output_stride == 0 {
            return Err(config_err("integration.output_stride must be at least 1"));
        }
        if self.integration.adaptive && !(self.integration.tolerance > 0.0 && self.integration.tolerance.is_finite()) {
            return Err(config_err("integration.tolerance must be positive"));
        }
        if !(self.experiment.err_cap > 0.0 && self.experiment.err_cap.is_finite()) {
            return Err(config_err("experiment.err_cap must be positive"));
        }
        if let Some((k, l)) = self.experiment.pair {
            if k == l || k >= n || l >= n {
                return Err(config_err(format!("experiment.pair ({k}, {l}) invalid for {n} sites")));
            }
        }
        if self.output.formats.is_empty() {
            return Err(config_err("output.formats must not be empty"));
        }
        if self.experiment.mode == Mode::Sweep {
            let grid = self.experiment.sweep_grid.as_ref().ok_or_else(|| config_err("sweep mode needs experiment.sweep_grid"))?;
            if grid.scale.is_empty() || grid.gamma.is_empty() {
                return Err(config_err("experiment.sweep_grid lists must be nonempty"));
            }
            for &l in &grid.scale {
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(config_err(format!("sweep L value {l} must be nonnegative and finite")));
                }
            }
            for &g in &grid.gamma {
                if !(g >= 0.0 && g.is_finite()) {
                    return Err(config_err(format!("sweep gamma value {g} must be nonnegative and finite")));
                }
            }
        }
        Ok(())
    }

    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            n_sites: self.lattice.n_sites,
            omega: self.soliton.omega,
            quantum_scale: self.quantum.scale,
            absorption: self.quantum.gamma,
            z_max: self.integration.z_max,
            step: self.integration.step,
        }
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(self.hash())
    }

    pub fn pair(&self) -> (usize, usize) {
        self.experiment.pair.unwrap_or_else(|| self.soliton.kind.central_pair(self.lattice.n_sites))
    }

    fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }

    fn options(&self, track_cumulants: bool, store_states: bool) -> PropagateOptions {
        PropagateOptions {
            output_stride: self.integration.output_stride,
            adaptive_tolerance: self.integration.adaptive.then_some(self.integration.tolerance),
            track_cumulants,
            store_states,
        }
    }
}

/// Observables recorded at every snapshot of a trajectory.
#[derive(Debug, Clone, Default)]
pub struct TrajectorySeries {
    pub pair: (usize, usize),
    pub z: Vec<f64>,
    pub log_negativity: Vec<f64>,
    /// Zero throughout in the rescaled (`L = 0`) mode.
    pub err: Vec<f64>,
    pub total_power: Vec<f64>,
    pub states: Vec<MomentState>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationSummary {
    pub pair: (usize, usize),
    pub err_cap: f64,
    /// First distance where `Err` exceeds the cap; `None` if it never does.
    pub z_valid: Option<f64>,
    /// Argmax of the pair's `E_N` over the validity window.
    pub z_star: f64,
    pub en_max: f64,
}

impl TrajectorySeries {
    pub fn summarize(&self, err_cap: f64) -> PropagationSummary {
        let z_valid = validity_limit(&self.z, &self.err, err_cap);
        let window_end = z_valid.unwrap_or(f64::INFINITY);
        let mut best = (self.z.first().copied().unwrap_or(0.0), f64::NEG_INFINITY);
        for (&z, &en) in self.z.iter().zip(&self.log_negativity) {
            if z <= window_end && en > best.1 {
                best = (z, en);
            }
        }
        PropagationSummary { pair: self.pair, err_cap, z_valid, z_star: best.0, en_max: best.1.max(0.0) }
    }

    pub fn state_at(&self, z: f64) -> Option<&MomentState> {
        self.states.iter().find(|s| s.z == z)
    }
}

/// Solves for the configured soliton and its linear stability.
pub fn solve(config: &RunConfig) -> Result<(SolitonProfile, StabilityReport), HarnessError> {
    let profile = find_soliton(config.soliton.kind, &config.system_params())?;
    let stability = linear_stability(&profile);
    if !stability.is_stable() {
        warn!("{} soliton at omega={} is linearly unstable (growth {:.3e})", profile.kind, profile.omega, stability.max_growth_rate);
    }
    Ok((profile, stability))
}

/// Propagates `profile` at the given `L` and `Gamma`, recording the
/// configured pair's `E_N`, the validity metric and the total power.
pub fn simulate(
    config: &RunConfig,
    profile: &SolitonProfile,
    scale: f64,
    gamma: f64,
    store_states: bool,
) -> Result<TrajectorySeries, HarnessError> {
    let params = SystemParams { quantum_scale: scale, absorption: gamma, ..config.system_params() };
    let (k, l) = config.pair();
    let mut series = TrajectorySeries { pair: (k, l), ..Default::default() };
    let mut record = |s: &Snapshot<'_>| {
        series.z.push(s.state.z);
        series.log_negativity.push(log_negativity(s.state, k, l).unwrap_or(f64::NAN));
        series.err.push(s.cumulants.map_or(0.0, |c| err_metric(s.state, c).unwrap_or(f64::NAN)));
        series.total_power.push(s.state.total_power());
    };
    let options = config.options(scale > 0.0, store_states);
    let trajectory = propagate_with(&initial_state(profile, scale), &params, &options, &mut [&mut record])?;
    series.states = trajectory.states;
    Ok(series)
}

fn ensure_dir(config: &RunConfig) -> Result<&Path, HarnessError> {
    let dir = config.output.directory.as_path();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir)
}

/// Writes `profile.json`, `profile.csv` and `stability.csv`.
pub fn run_soliton(config: &RunConfig) -> Result<(SolitonProfile, StabilityReport), HarnessError> {
    let (profile, stability) = solve(config)?;
    info!("{} soliton, omega={}, residual {:.3e}", profile.kind, profile.omega, profile.residual);
    let dir = ensure_dir(config)?;
    let prov = config.provenance();
    if config.wants(Format::Json) {
        let path = dir.join("profile.json");
        output::write_json(&path, &prov, &output::profile_document(&profile, &stability)).map_err(io_err(&path))?;
    }
    if config.wants(Format::Csv) {
        let path = dir.join("profile.csv");
        output::write_profile_csv(&path, &prov, &profile).map_err(io_err(&path))?;
        let path = dir.join("stability.csv");
        output::write_stability_csv(&path, &prov, &stability).map_err(io_err(&path))?;
    }
    Ok((profile, stability))
}

/// Writes `trajectory.csv` `(z, E_N, Err, total_power)`, the two-column
/// `entanglement.csv` and `err.csv`, the per-site `sites.csv`,
/// `snapshots.json` (z = 0, z*, z_max) and `summary.json`.
pub fn run_propagate(config: &RunConfig) -> Result<(TrajectorySeries, PropagationSummary), HarnessError> {
    let (profile, _) = solve(config)?;
    let series = simulate(config, &profile, config.quantum.scale, config.quantum.gamma, true)?;
    let summary = series.summarize(config.experiment.err_cap);
    info!("pair {:?}: E_N max {:.6} at z={:.4}, z_valid {:?}", summary.pair, summary.en_max, summary.z_star, summary.z_valid);
    let dir = ensure_dir(config)?;
    let prov = config.provenance();
    if config.wants(Format::Csv) {
        let path = dir.join("trajectory.csv");
        let rows = (0..series.z.len()).map(|i| {
            vec![
                fmt_f64(series.z[i]),
                fmt_f64(series.log_negativity[i]),
                fmt_f64(series.err[i]),
                fmt_f64(series.total_power[i]),
            ]
        });
        output::write_csv(&path, &prov, &["z", "E_N", "Err", "total_power"], rows).map_err(io_err(&path))?;
        let path = dir.join("entanglement.csv");
        output::write_series_csv(&path, &prov, "E_N", &series.z, &series.log_negativity).map_err(io_err(&path))?;
        let path = dir.join("err.csv");
        output::write_series_csv(&path, &prov, "Err", &series.z, &series.err).map_err(io_err(&path))?;
        let path = dir.join("sites.csv");
        output::write_site_trajectory_csv(&path, &prov, &series.states).map_err(io_err(&path))?;
    }
    if config.wants(Format::Json) {
        let path = dir.join("summary.json");
        output::write_json(&path, &prov, &summary).map_err(io_err(&path))?;
        let mut picked: Vec<MomentState> = Vec::new();
        for z in [series.z.first(), Some(&summary.z_star), series.z.last()].into_iter().flatten() {
            if let Some(s) = series.state_at(*z) {
                if picked.last().is_none_or(|p| p.z != s.z) {
                    picked.push(s.clone());
                }
            }
        }
        let path = dir.join("snapshots.json");
        output::write_json(&path, &prov, &output::snapshots_document(&picked)).map_err(io_err(&path))?;
    }
    Ok((series, summary))
}

#[derive(Debug, Clone)]
pub struct EntanglementMap {
    pub summary: PropagationSummary,
    pub map: DMatrix<f64>,
}

impl EntanglementMap {
    /// Pairs `(k < l)` whose entry reaches `fraction` of the map maximum.
    pub fn support(&self, fraction: f64) -> Vec<(usize, usize)> {
        let max = self.map.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
        let n = self.map.nrows();
        if max <= 0.0 {
            return Vec::new();
        }
        (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).filter(|&(k, l)| self.map[(k, l)] >= fraction * max).collect()
    }
}

/// Pairwise `E_N` at z*, the most entangled distance of the configured pair
/// inside the validity window.
pub fn compute_enmap(config: &RunConfig) -> Result<EntanglementMap, HarnessError> {
    let (profile, _) = solve(config)?;
    let series = simulate(config, &profile, config.quantum.scale, config.quantum.gamma, true)?;
    let summary = series.summarize(config.experiment.err_cap);
    let state = series.state_at(summary.z_star).expect("z* is a recorded snapshot");
    Ok(EntanglementMap { map: negativity_map(state), summary })
}

/// Writes the `N x N` map at z* to `enmap.csv` and a summary to `enmap.json`.
pub fn run_enmap(config: &RunConfig) -> Result<EntanglementMap, HarnessError> {
    let result = compute_enmap(config)?;
    let dir = ensure_dir(config)?;
    let prov = config.provenance();
    if config.wants(Format::Csv) {
        let path = dir.join("enmap.csv");
        output::write_matrix_csv(&path, &prov, &result.map).map_err(io_err(&path))?;
    }
    if config.wants(Format::Json) {
        let path = dir.join("enmap.json");
        let doc = json!({ "summary": result.summary, "support": result.support(0.1) });
        output::write_json(&path, &prov, &doc).map_err(io_err(&path))?;
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "L")]
    pub scale: f64,
    pub gamma: f64,
    pub max_en: Option<f64>,
    pub z_star: Option<f64>,
    pub z_valid: Option<f64>,
    /// `ok`, or the name of the error that stopped this point.
    pub status: String,
}

/// Grid points in deterministic order: `L` outer, `gamma` inner.
pub fn sweep_points(grid: &SweepGrid) -> Vec<(f64, f64)> {
    grid.scale.iter().flat_map(|&l| grid.gamma.iter().map(move |&g| (l, g))).collect()
}

/// Runs every grid point on a pool of `experiment.workers` threads and writes
/// `sweep.csv` `(L, gamma, max_EN, z_star, z_valid, status)`.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>, HarnessError> {
    let grid = config.experiment.sweep_grid.as_ref().ok_or_else(|| config_err("sweep mode needs experiment.sweep_grid"))?;
    let (profile, _) = solve(config)?;
    let points = sweep_points(grid);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.experiment.workers)
        .build()
        .map_err(|e| config_err(format!("cannot build worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&(scale, gamma)| match simulate(config, &profile, scale, gamma, false) {
                Ok(series) => {
                    let s = series.summarize(config.experiment.err_cap);
                    SweepRow { scale, gamma, max_en: Some(s.en_max), z_star: Some(s.z_star), z_valid: s.z_valid, status: "ok".into() }
                }
                Err(e) => {
                    warn!("sweep point L={scale}, gamma={gamma} failed: {e}");
                    SweepRow { scale, gamma, max_en: None, z_star: None, z_valid: None, status: HarnessError::kind(&e) }
                }
            })
            .collect()
    });
    let dir = ensure_dir(config)?;
    let prov = config.provenance();
    if config.wants(Format::Csv) {
        let path = dir.join("sweep.csv");
        let table = rows.iter().map(|r| {
            vec![fmt_f64(r.scale), fmt_f64(r.gamma), fmt_opt(r.max_en), fmt_opt(r.z_star), fmt_opt(r.z_valid), r.status.clone()]
        });
        output::write_csv(&path, &prov, &["L", "gamma", "max_EN", "z_star", "z_valid", "status"], table)
            .map_err(io_err(&path))?;
    }
    if config.wants(Format::Json) {
        let path = dir.join("sweep.json");
        let centre = profile.peak_site();
        let doc = json!({
            "pair": config.pair(),
            "central_amplitude_squared": profile.beta[centre].powi(2),
            "rows": rows,
        });
        output::write_json(&path, &prov, &doc).map_err(io_err(&path))?;
    }
    Ok(rows)
}

/// Dispatches on `experiment.mode`.
pub fn run(config: &RunConfig) -> Result<(), HarnessError> {
    match config.experiment.mode {
        Mode::Soliton => run_soliton(config).map(|_| ()),
        Mode::Propagate => run_propagate(config).map(|_| ()),
        Mode::Enmap => run_enmap(config).map(|_| ()),
        Mode::Sweep => run_sweep(config).map(|_| ()),
    }
}

/// Best-effort `error.json` in the output directory.
pub fn write_error(config: &RunConfig, error: &HarnessError) {
    let dir = config.output.directory.as_path();
    let path = dir.join("error.json");
    let written = std::fs::create_dir_all(dir).and_then(|_| output::write_json(&path, &config.provenance(), &error.document()));
    if let Err(e) = written {
        warn!("could not write {}: {e}", path.display());
    }
}
