//! JSON scenario descriptions.
//!
//! Unknown keys are rejected everywhere. Directions are given as vectors
//! and normalised on load; angles are in degrees.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{IntegratorConfig, VehicleState};
use crate::geometry::{UnitVec2, Vec2};
use crate::guidance::GuidanceParams;
use crate::path::{ArcChain, Circle, Line, Orientation, PathModel};
use crate::sim::{PhasePortrait, Scenario};
use crate::wind::WindModel;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(e: impl ToString) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Line {
        anchor: Vec2,
        direction: UnitVec2,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<f64>,
    },
    Circle {
        center: Vec2,
        radius: f64,
        #[serde(default = "ccw")]
        orientation: Orientation,
    },
    ArcChain {
        start: Vec2,
        heading: UnitVec2,
        #[serde(default)]
        closed: bool,
        segments: Vec<SegmentSpec>,
    },
    Point {
        point: Vec2,
    },
}

fn ccw() -> Orientation {
    Orientation::Ccw
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentSpec {
    Line {
        length: f64,
    },
    /// Positive sweep turns left.
    Arc {
        radius: f64,
        sweep_deg: f64,
    },
}

impl PathSpec {
    pub fn build(&self) -> Result<PathModel, ConfigError> {
        Ok(match self {
            PathSpec::Line {
                anchor,
                direction,
                length,
            } => match length {
                None => PathModel::Line(Line::infinite(*anchor, *direction)),
                Some(l) => PathModel::Line(Line::segment(*anchor, *direction, *l).map_err(invalid)?),
            },
            PathSpec::Circle {
                center,
                radius,
                orientation,
            } => PathModel::Circle(Circle::new(*center, *radius, *orientation).map_err(invalid)?),
            PathSpec::ArcChain {
                start,
                heading,
                closed,
                segments,
            } => {
                let mut b = ArcChain::builder(*start, *heading);
                for s in segments {
                    b = match s {
                        SegmentSpec::Line { length } => b.line(*length),
                        SegmentSpec::Arc { radius, sweep_deg } => b.arc(*radius, sweep_deg.to_radians()),
                    };
                }
                PathModel::ArcChain(b.build(*closed).map_err(invalid)?)
            }
            PathSpec::Point { point } => {
                if !point.is_finite() {
                    return Err(invalid("point must be finite"));
                }
                PathModel::SinglePoint(*point)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindSpec {
    Constant {
        velocity: Vec2,
    },
    Sinusoidal {
        amplitude: f64,
        pulsation: f64,
        direction: UnitVec2,
    },
    Piecewise {
        breakpoints: Vec<(f64, Vec2)>,
    },
}

impl WindSpec {
    pub fn build(&self) -> Result<WindModel, ConfigError> {
        match self {
            WindSpec::Constant { velocity } => WindModel::constant(*velocity),
            WindSpec::Sinusoidal {
                amplitude,
                pulsation,
                direction,
            } => WindModel::sinusoidal(*amplitude, *pulsation, *direction),
            WindSpec::Piecewise { breakpoints } => WindModel::piecewise(breakpoints.clone()),
        }
        .map_err(invalid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePortraitSpec {
    #[serde(default = "default_n_eta")]
    pub n_eta: usize,
    #[serde(default = "default_n_e_star")]
    pub n_e_star: usize,
    #[serde(default = "default_e_star_max")]
    pub e_star_max: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Direction of the ray the initial positions lie on, degrees from `+i`.
    /// The wind blows along `+i`.
    #[serde(default = "default_bearing_deg")]
    pub bearing_deg: f64,
}

fn default_n_eta() -> usize {
    13
}
fn default_n_e_star() -> usize {
    9
}
fn default_e_star_max() -> f64 {
    200.0
}
fn default_record_every() -> usize {
    10
}
fn default_bearing_deg() -> f64 {
    90.0
}

impl Default for PhasePortraitSpec {
    fn default() -> Self {
        PhasePortraitSpec {
            n_eta: default_n_eta(),
            n_e_star: default_n_e_star(),
            e_star_max: default_e_star_max(),
            record_every: default_record_every(),
            bearing_deg: default_bearing_deg(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Write every n-th record to the trajectory CSV.
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { record_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub path: PathSpec,
    pub wind: WindSpec,
    pub initial: VehicleState,
    pub params: GuidanceParams,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub geometric_idealization: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_portrait: Option<PhasePortraitSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialise")
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        if self.output.record_every == 0 {
            return Err(invalid("output.record_every must be at least 1"));
        }
        let sc = Scenario {
            path: self.path.build()?,
            wind: self.wind.build()?,
            initial: self.initial,
            params: self.params,
            integrator: self.integrator,
            duration: self.duration,
            seed: self.seed,
            geometric_idealization: self.geometric_idealization,
        };
        sc.validate().map_err(invalid)?;
        Ok(sc)
    }

    /// Phase-portrait setup for a given wind speed, blowing along `+i`.
    /// Needs a circular path.
    pub fn phase_portrait(&self, wind_speed: f64) -> Result<PhasePortrait, ConfigError> {
        let sc = self.scenario()?;
        let PathModel::Circle(circle) = sc.path else {
            return Err(invalid("phase portraits need a circular path"));
        };
        if !(wind_speed >= 0.0 && wind_speed < sc.initial.airspeed) {
            return Err(invalid(format!(
                "phase-portrait wind {wind_speed} m/s must lie in [0, airspeed)"
            )));
        }
        let spec = self.phase_portrait.unwrap_or_default();
        Ok(PhasePortrait {
            circle,
            bearing: spec.bearing_deg.to_radians(),
            wind: Vec2::new(wind_speed, 0.0),
            airspeed: sc.initial.airspeed,
            params: sc.params,
            integrator: sc.integrator,
            duration: sc.duration,
            record_every: spec.record_every.max(1),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl WindRange {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0 && self.max >= self.min) {
            return Err(invalid(format!("bad wind range [{}, {}]", self.min, self.max)));
        }
        if self.steps == 0 {
            return Err(invalid("wind range is empty"));
        }
        if self.steps == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.min + step * i as f64).collect())
    }
}

/// Fixed-geometry sweep of the command across wind speeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuityConfig {
    pub airspeed: f64,
    pub params: GuidanceParams,
    /// Angles between `−ŵ` and `L̂₀`, degrees.
    pub nu_deg: Vec<f64>,
    pub wind_range: WindRange,
}

impl ContinuityConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: ContinuityConfig = serde_json::from_str(text)?;
        c.params.validate().map_err(invalid)?;
        if !(c.airspeed > 0.0 && c.airspeed.is_finite()) {
            return Err(invalid("airspeed must be positive"));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialise")
    }
}
