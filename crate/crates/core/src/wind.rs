//! Flowfield models.

use thiserror::Error;

use crate::geometry::{UnitVec2, Vec2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WindError {
    #[error("sinusoidal amplitude must be finite and non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("sinusoidal pulsation must be finite and positive, got {0}")]
    NonPositivePulsation(f64),
    #[error("piecewise wind needs at least one breakpoint")]
    NoBreakpoints,
    #[error("breakpoint times must be strictly increasing (index {0})")]
    UnorderedBreakpoints(usize),
    #[error("non-finite wind value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindModel {
    Constant(Vec2),
    /// `w(t) = amplitude · sin(pulsation · t) · direction`
    Sinusoidal {
        amplitude: f64,
        pulsation: f64,
        direction: UnitVec2,
    },
    /// Left-continuous steps: on `(t_i, t_{i+1}]` the wind is `w_i`, and
    /// before the first breakpoint it is `w_0`.
    PiecewiseConstant(Vec<(f64, Vec2)>),
}

impl WindModel {
    pub fn constant(w: Vec2) -> Result<Self, WindError> {
        if !w.is_finite() {
            return Err(WindError::NonFinite);
        }
        Ok(WindModel::Constant(w))
    }

    pub fn sinusoidal(amplitude: f64, pulsation: f64, direction: UnitVec2) -> Result<Self, WindError> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(WindError::NegativeAmplitude(amplitude));
        }
        if !(pulsation > 0.0 && pulsation.is_finite()) {
            return Err(WindError::NonPositivePulsation(pulsation));
        }
        Ok(WindModel::Sinusoidal {
            amplitude,
            pulsation,
            direction,
        })
    }

    pub fn piecewise(breakpoints: Vec<(f64, Vec2)>) -> Result<Self, WindError> {
        if breakpoints.is_empty() {
            return Err(WindError::NoBreakpoints);
        }
        if breakpoints.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
            return Err(WindError::NonFinite);
        }
        for (i, pair) in breakpoints.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(WindError::UnorderedBreakpoints(i + 1));
            }
        }
        Ok(WindModel::PiecewiseConstant(breakpoints))
    }

    pub fn sample(&self, t: f64) -> Vec2 {
        match self {
            WindModel::Constant(w) => *w,
            WindModel::Sinusoidal {
                amplitude,
                pulsation,
                direction,
            } => *direction * (amplitude * (pulsation * t).sin()),
            WindModel::PiecewiseConstant(points) => {
                let idx = points.partition_point(|(ti, _)| *ti < t);
                points[idx.saturating_sub(1)].1
            }
        }
    }

    /// Upper bound of `‖w(t)‖` over all time.
    pub fn max_speed(&self) -> f64 {
        match self {
            WindModel::Constant(w) => w.norm(),
            WindModel::Sinusoidal { amplitude, .. } => *amplitude,
            WindModel::PiecewiseConstant(points) => points.iter().map(|(_, w)| w.norm()).fold(0.0, f64::max),
        }
    }
}
