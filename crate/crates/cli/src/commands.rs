//! Subcommand implementations.

use std::f64::consts::PI;
use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use windward_core::config::{ConfigError, ContinuityConfig, ScenarioConfig, WindRange};
use windward_core::presets;
use windward_core::sim::{self, continuity_sweep, metrics, phase_grid, SimError};
use windward_core::{PathModel, Regime};

use crate::number::{format_sig, parse_list};
use crate::output::write_atomic;
use crate::trajectory::{write_continuity, write_phase_traces, write_trajectory};

/// Horizon of the error-dynamics comparison in `validate`, seconds.
pub const ORACLE_HORIZON: f64 = 60.0;
/// Allowed `‖e‖` gap between simulation and oracle, metres.
pub const ORACLE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Aborted(String),
    #[error("validation failed")]
    Validation,
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Aborted(_) => 3,
            CliError::Validation => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidScenario(m) => CliError::Config(m),
            e @ SimError::Aborted { .. } => CliError::Aborted(e.to_string()),
        }
    }
}

fn write_csv<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn io::Write) -> csv::Result<()>,
{
    write_atomic(path, |w| fill(w).map_err(io::Error::other)).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("plain data serialises")
    );
}

pub fn simulate(config: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = ScenarioConfig::load(config)?;
    let scenario = cfg.scenario()?;
    for w in scenario.warnings() {
        eprintln!("windward: warning: {w}");
    }
    let log = sim::run(&scenario)?;
    write_csv(out, |w| write_trajectory(&log.records, cfg.output.record_every, w))?;
    print_json(&metrics(&log));
    Ok(())
}

#[derive(Debug, Serialize)]
struct PhaseSummary {
    wind: f64,
    file: String,
    traces: usize,
    converged: usize,
}

/// A trace counts as converged when it ends within 1 m and 0.02 rad of
/// the path.
fn converged(e_star: f64, eta: f64) -> bool {
    e_star.abs() < 1.0 && eta.abs() < 0.02
}

pub fn phase_portrait(config: &Path, winds: &str, out: &Path) -> Result<(), CliError> {
    let winds = parse_list(winds).map_err(CliError::Config)?;
    if winds.is_empty() {
        return Err(CliError::Config("wind list is empty".into()));
    }
    let cfg = ScenarioConfig::load(config)?;
    let portraits = winds
        .iter()
        .map(|&w| cfg.phase_portrait(w))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = cfg.phase_portrait.unwrap_or_default();
    let grid = phase_grid(spec.n_eta, spec.n_e_star, PI, spec.e_star_max);
    std::fs::create_dir_all(out).map_err(|source| CliError::Output {
        path: out.display().to_string(),
        source,
    })?;
    let mut summary = Vec::with_capacity(winds.len());
    for (&wind, portrait) in winds.iter().zip(&portraits) {
        let traces = portrait.run(&grid)?;
        let file = out.join(format!("phase_w{}.csv", format_sig(wind)));
        write_csv(&file, |w| write_phase_traces(&traces, w))?;
        summary.push(PhaseSummary {
            wind,
            file: file.display().to_string(),
            traces: traces.len(),
            converged: traces
                .iter()
                .filter(|t| converged(t.last().e_star, t.last().eta))
                .count(),
        });
    }
    print_json(&summary);
    Ok(())
}

#[derive(Debug, Serialize)]
struct ContinuitySummary {
    file: String,
    rows: usize,
    slow: usize,
    fast1: usize,
    fast2: usize,
}

fn parse_wind_range(s: &str) -> Result<WindRange, CliError> {
    let parts = parse_list(s).map_err(CliError::Config)?;
    let [min, max, steps] = parts[..] else {
        return Err(CliError::Config(format!("wind range must be min,max,steps, got {s:?}")));
    };
    if !(steps >= 0.0 && steps.fract() == 0.0) {
        return Err(CliError::Config(format!(
            "wind range step count must be a whole number, got {steps}"
        )));
    }
    Ok(WindRange {
        min,
        max,
        steps: steps as usize,
    })
}

pub fn continuity(
    config: Option<&Path>,
    nu: Option<&str>,
    wind_range: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let mut cfg = match config {
        Some(p) => ContinuityConfig::load(p)?,
        None => presets::fig10(),
    };
    if let Some(nu) = nu {
        cfg.nu_deg = parse_list(nu).map_err(CliError::Config)?;
    }
    if let Some(r) = wind_range {
        cfg.wind_range = parse_wind_range(r)?;
    }
    if cfg.nu_deg.is_empty() {
        return Err(CliError::Config("angle list is empty".into()));
    }
    let winds = cfg.wind_range.values()?;
    let nus: Vec<f64> = cfg.nu_deg.iter().map(|d| d.to_radians()).collect();
    let rows =
        continuity_sweep(&nus, &winds, cfg.airspeed, &cfg.params).map_err(|e| CliError::Aborted(e.to_string()))?;
    write_csv(out, |w| write_continuity(&rows, w))?;
    let count = |r: Regime| rows.iter().filter(|row| row.regime == r).count();
    print_json(&ContinuitySummary {
        file: out.display().to_string(),
        rows: rows.len(),
        slow: count(Regime::Slow),
        fast1: count(Regime::FastFeasible),
        fast2: count(Regime::FastInfeasible),
    });
    Ok(())
}

#[derive(Debug, Serialize)]
struct GainReport {
    k: f64,
    bound: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    horizon: f64,
    tolerance: f64,
    /// `None` when the path has no error-dynamics form.
    max_discrepancy: Option<f64>,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct ValidationReport {
    gain: GainReport,
    oracle: OracleReport,
    warnings: Vec<String>,
    pass: bool,
}

pub fn validate(config: &Path) -> Result<(), CliError> {
    let cfg = ScenarioConfig::load(config)?;
    let scenario = cfg.scenario()?;
    let bound = scenario.gain_bound();
    let warnings = scenario.warnings();
    let gain = GainReport {
        k: scenario.params.k,
        bound,
        pass: warnings.is_empty(),
    };
    let max_discrepancy = match scenario.path {
        PathModel::Line(_) | PathModel::Circle(_) => Some(sim::oracle_discrepancy(&scenario, ORACLE_HORIZON)?),
        _ => None,
    };
    let oracle = OracleReport {
        horizon: scenario.duration.min(ORACLE_HORIZON),
        tolerance: ORACLE_TOLERANCE,
        max_discrepancy,
        pass: max_discrepancy.is_none_or(|d| d <= ORACLE_TOLERANCE),
    };
    let pass = gain.pass && oracle.pass;
    print_json(&ValidationReport {
        gain,
        oracle,
        warnings,
        pass,
    });
    if pass {
        Ok(())
    } else {
        Err(CliError::Validation)
    }
}
