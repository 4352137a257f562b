//! Power-surface experiments over the sparsity/strength grid.
//!
//! One experiment fixes a null model and a statistic, calibrates the
//! critical value once, then sweeps a grid of `(a, r)` pairs. Each cell maps
//! to a concrete alternative with support size `s = round(n^{1-a})` (at
//! least 1) and strength `B = artanh(n^{-r})`, and records the Monte Carlo
//! power of the calibrated test. Cells are independent and run in parallel;
//! a failing cell is recorded with its error message, never dropped.
//!
//! Output is a CSV of cells, a CSV of the theoretical detection boundary
//! over the same `a` grid, and a plain-text PGM heat map (`gray =
//! round(255 * p_hat)`, rows in descending `r` so stronger signals sit at
//! the top).

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{make_signal, CouplingKind, CouplingMatrix, Placement};
use crate::rng;
use crate::statistics::{StatTag, StatisticKind};
use crate::testing::{
    calibrate, estimate_power, CriticalValue, ModelSpec, SamplerBackend, SignalPolicy,
};
use crate::theory::detection_boundary;

/// Inclusive arithmetic grid `start, start+step, ..., <= stop`.
///
/// Values are computed on an integer lattice at `1e-6` resolution so that
/// grids like `0.05..0.5 by 0.05` produce exact decimals in output files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, step: f64) -> GridRange {
        GridRange { start, stop, step }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Config(format!("grid step must be > 0, got {}", self.step)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(Error::Config(format!(
                "bad grid range [{}, {}]",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        const SCALE: f64 = 1e6;
        let s = (self.start * SCALE).round() as i64;
        let e = (self.stop * SCALE).round() as i64;
        let d = (self.step * SCALE).round().max(1.0) as i64;
        (0..)
            .map(|k| s + k * d)
            .take_while(|&v| v <= e)
            .map(|v| v as f64 / SCALE)
            .collect()
    }
}

/// Structural model family, as named in config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindLabel {
    CurieWeiss,
    Cycle,
    RegularCirculant,
    ErdosRenyi,
}

/// Sampler backend, as named in config files. `Glauber` uses the default
/// burn-in schedule for the configured `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendLabel {
    Auto,
    Enumeration,
    CurieWeissAux,
    CycleTransfer,
    Glauber,
    Independent,
}

impl BackendLabel {
    pub fn to_backend(self, n: usize) -> SamplerBackend {
        match self {
            BackendLabel::Auto => SamplerBackend::Auto,
            BackendLabel::Enumeration => SamplerBackend::Enumeration,
            BackendLabel::CurieWeissAux => SamplerBackend::CurieWeissAux,
            BackendLabel::CycleTransfer => SamplerBackend::CycleTransfer,
            BackendLabel::Glauber => {
                SamplerBackend::Glauber(crate::samplers::GlauberConfig::default_for(n))
            }
            BackendLabel::Independent => SamplerBackend::Independent,
        }
    }
}

/// Full description of one power-surface experiment. Serialized as JSON for
/// `--config` files; all fields below are required there except the three
/// graph parameters, which default to absent.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub theta: f64,
    pub kind: KindLabel,
    pub stat: StatTag,
    pub alpha: f64,
    pub m_null: usize,
    pub replicates: usize,
    pub a_grid: GridRange,
    pub r_grid: GridRange,
    pub master_seed: u64,
    pub sampler: BackendLabel,
    #[serde(default)]
    pub edge_prob: Option<f64>,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub graph_seed: Option<u64>,
}

impl ExperimentConfig {
    /// Desk-scale defaults: n = 400, 500 calibration draws, 300 replicates
    /// per cell, the standard `[0.05, 0.5]` grids, seed 42. The statistic
    /// defaults to conditional centering off criticality and the
    /// quarter-root scaling at `theta = 1`.
    pub fn desk_default(theta: f64) -> ExperimentConfig {
        ExperimentConfig {
            n: 400,
            theta,
            kind: KindLabel::CurieWeiss,
            stat: if theta == 1.0 { StatTag::QuarterRootMean } else { StatTag::CondCentered },
            alpha: 0.05,
            m_null: 500,
            replicates: 300,
            a_grid: GridRange::new(0.05, 0.5, 0.05),
            r_grid: GridRange::new(0.05, 0.5, 0.05),
            master_seed: 42,
            sampler: BackendLabel::Auto,
            edge_prob: None,
            degree: None,
            graph_seed: None,
        }
    }

    /// Publication-scale preset: n = 1000 with 500/500 draws.
    pub fn paper_preset(theta: f64) -> ExperimentConfig {
        ExperimentConfig { n: 1000, m_null: 500, replicates: 500, ..Self::desk_default(theta) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::Config(format!(
                "power experiments need theta >= 0, got {}",
                self.theta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::Config(format!("alpha must lie in (0, 0.5], got {}", self.alpha)));
        }
        if self.m_null < 100 {
            return Err(Error::Config(format!("m_null must be >= 100, got {}", self.m_null)));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".to_string()));
        }
        self.a_grid.validate()?;
        self.r_grid.validate()?;
        if !(self.a_grid.start > 0.0 && self.a_grid.stop < 1.0) {
            return Err(Error::Config(format!(
                "sparsity exponents must lie in (0, 1), got [{}, {}]",
                self.a_grid.start, self.a_grid.stop
            )));
        }
        if !(self.r_grid.start > 0.0) {
            return Err(Error::Config(format!(
                "strength exponents must be > 0, got start {}",
                self.r_grid.start
            )));
        }
        match self.kind {
            KindLabel::ErdosRenyi => {
                if self.edge_prob.is_none() || self.graph_seed.is_none() {
                    return Err(Error::Config(
                        "erdos_renyi needs edge_prob and graph_seed".to_string(),
                    ));
                }
            }
            KindLabel::RegularCirculant => {
                if self.degree.is_none() {
                    return Err(Error::Config("regular_circulant needs degree".to_string()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn coupling(&self) -> Result<CouplingMatrix> {
        match self.kind {
            KindLabel::CurieWeiss => CouplingMatrix::curie_weiss(self.n, self.theta),
            KindLabel::Cycle => CouplingMatrix::cycle(self.n, self.theta),
            KindLabel::RegularCirculant => {
                let degree = self
                    .degree
                    .ok_or_else(|| Error::Config("regular_circulant needs degree".to_string()))?;
                CouplingMatrix::regular_circulant(self.n, self.theta, degree)
            }
            KindLabel::ErdosRenyi => {
                let p = self
                    .edge_prob
                    .ok_or_else(|| Error::Config("erdos_renyi needs edge_prob".to_string()))?;
                let seed = self
                    .graph_seed
                    .ok_or_else(|| Error::Config("erdos_renyi needs graph_seed".to_string()))?;
                CouplingMatrix::erdos_renyi(self.n, self.theta, p, seed)
            }
        }
    }
}

/// Support size for sparsity exponent `a`: `round(n^{1-a})`, at least 1.
pub fn support_size(n: usize, a: f64) -> usize {
    ((n as f64).powf(1.0 - a).round() as usize).clamp(1, n)
}

/// Signal strength for exponent `r > 0`: `artanh(n^{-r})`.
pub fn signal_strength(n: usize, r: f64) -> f64 {
    (-r * (n as f64).ln()).exp().atanh()
}

/// One grid cell. `p_hat`/`ci_halfwidth` are absent when the cell failed,
/// in which case `error` holds the reason.
#[derive(Clone, Debug)]
pub struct SurfaceCell {
    pub a: f64,
    pub r: f64,
    pub s: usize,
    pub strength: f64,
    pub p_hat: Option<f64>,
    pub ci_halfwidth: Option<f64>,
    pub error: Option<String>,
}

/// A completed experiment: the calibrated critical value, all cells in
/// `a`-major order, and the theoretical boundary exponent per `a`.
#[derive(Clone, Debug)]
pub struct PowerSurface {
    pub config: ExperimentConfig,
    pub critical_value: CriticalValue,
    pub cells: Vec<SurfaceCell>,
    pub boundary: Vec<(f64, f64)>,
}

/// Build the worker pool honoring `ISING_DETECT_THREADS` (unset or 0 means
/// all cores).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("ISING_DETECT_THREADS") {
        Err(_) => 0,
        Ok(raw) if raw.trim().is_empty() => 0,
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("ISING_DETECT_THREADS must be a number, got '{raw}'")))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("failed to build thread pool: {e}")))
}

/// Run a full power-surface experiment: calibrate once on the null model,
/// then estimate the power in every `(a, r)` cell. Deterministic in
/// `master_seed` for any thread count.
pub fn run_power_grid(config: &ExperimentConfig) -> Result<PowerSurface> {
    config.validate()?;
    let pool = thread_pool()?;
    pool.install(|| run_power_grid_inner(config))
}

fn run_power_grid_inner(config: &ExperimentConfig) -> Result<PowerSurface> {
    let q = config.coupling()?;
    let kind = StatisticKind::from_tag(config.stat, &q);
    let backend = config.sampler.to_backend(config.n);
    let null = ModelSpec::null_model(q, backend);
    let critical_value = calibrate(&null, &kind, config.alpha, config.m_null, config.master_seed)?;

    let a_values = config.a_grid.values();
    let r_values = config.r_grid.values();
    let r_len = r_values.len();

    let cells: Vec<SurfaceCell> = (0..a_values.len() * r_len)
        .into_par_iter()
        .map(|idx| {
            let ai = idx / r_len;
            let ri = idx % r_len;
            let a = a_values[ai];
            let r = r_values[ri];
            let s = support_size(config.n, a);
            let strength = signal_strength(config.n, r);
            let outcome = run_cell(config, &null, &kind, &critical_value, s, strength, ai, ri);
            match outcome {
                Ok(p) => SurfaceCell {
                    a,
                    r,
                    s,
                    strength,
                    p_hat: Some(p.p_hat),
                    ci_halfwidth: Some(p.ci_halfwidth),
                    error: None,
                },
                Err(e) => SurfaceCell {
                    a,
                    r,
                    s,
                    strength,
                    p_hat: None,
                    ci_halfwidth: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let boundary = a_values
        .iter()
        .map(|&a| Ok((a, detection_boundary(config.theta, a)?.exponent())))
        .collect::<Result<Vec<_>>>()?;

    Ok(PowerSurface { config: config.clone(), critical_value, cells, boundary })
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    config: &ExperimentConfig,
    null: &ModelSpec,
    kind: &StatisticKind,
    crit: &CriticalValue,
    s: usize,
    strength: f64,
    ai: usize,
    ri: usize,
) -> Result<crate::testing::PowerEstimate> {
    let signal = match null.coupling.kind() {
        // Exchangeable: the prefix support is distributionally equivalent to
        // any placement, and cheaper.
        CouplingKind::CurieWeiss => {
            SignalPolicy::Fixed(make_signal(config.n, s, strength, Placement::Prefix, None)?)
        }
        _ => SignalPolicy::Resampled { s, strength, placement: Placement::UniformRandom },
    };
    let alt = null.with_signal(signal);
    let seed = rng::derive(config.master_seed, rng::role::GRID_CELL, &[ai as u64, ri as u64]);
    estimate_power(&alt, kind, crit, config.replicates, seed)
}

fn display_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Write `{prefix}.csv`, `{prefix}_boundary.csv`, and `{prefix}.pgm`;
/// returns the three paths. Parent directories are created as needed.
pub fn emit_surface(surface: &PowerSurface, prefix: &Path) -> Result<Vec<PathBuf>> {
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let base = prefix.to_string_lossy();
    let csv_path = PathBuf::from(format!("{base}.csv"));
    let boundary_path = PathBuf::from(format!("{base}_boundary.csv"));
    let pgm_path = PathBuf::from(format!("{base}.pgm"));

    let mut csv = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(csv, "a,r,s,B,crit,p_hat,ci")?;
    for cell in &surface.cells {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            cell.a,
            cell.r,
            cell.s,
            cell.strength,
            surface.critical_value.value,
            display_opt(cell.p_hat),
            display_opt(cell.ci_halfwidth),
        )?;
    }
    csv.flush()?;

    let mut boundary = std::io::BufWriter::new(std::fs::File::create(&boundary_path)?);
    writeln!(boundary, "a,r_boundary")?;
    for (a, r) in &surface.boundary {
        writeln!(boundary, "{a},{r}")?;
    }
    boundary.flush()?;

    let a_values = surface.config.a_grid.values();
    let r_values = surface.config.r_grid.values();
    let r_len = r_values.len();
    let mut pgm = std::io::BufWriter::new(std::fs::File::create(&pgm_path)?);
    writeln!(pgm, "P2")?;
    writeln!(pgm, "{} {}", a_values.len(), r_len)?;
    writeln!(pgm, "255")?;
    // Rows top-to-bottom are descending r; failed cells render black.
    for ri in (0..r_len).rev() {
        let row: Vec<String> = (0..a_values.len())
            .map(|ai| {
                let cell = &surface.cells[ai * r_len + ri];
                let gray = cell.p_hat.map(|p| (255.0 * p).round() as u32).unwrap_or(0);
                gray.to_string()
            })
            .collect();
        writeln!(pgm, "{}", row.join(" "))?;
    }
    pgm.flush()?;

    Ok(vec![csv_path, boundary_path, pgm_path])
}
