//! Scenarios behind the bundled configuration files.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::config::{ContinuityConfig, OutputSpec, PathSpec, PhasePortraitSpec, ScenarioConfig, WindRange, WindSpec};
use crate::dynamics::{IntegratorConfig, VehicleState};
use crate::geometry::{UnitVec2, Vec2};
use crate::guidance::GuidanceParams;
use crate::path::Orientation;

pub const AIRSPEED: f64 = 14.0;
pub const RADIUS: f64 = 100.0;

pub fn params() -> GuidanceParams {
    GuidanceParams::new(0.05, 50.0).expect("valid constants")
}

fn circle() -> PathSpec {
    PathSpec::Circle {
        center: Vec2::ZERO,
        radius: RADIUS,
        orientation: Orientation::Ccw,
    }
}

fn base(wind: WindSpec, position: Vec2, heading: UnitVec2, duration: f64) -> ScenarioConfig {
    ScenarioConfig {
        path: circle(),
        wind,
        initial: VehicleState {
            position,
            heading,
            airspeed: AIRSPEED,
        },
        params: params(),
        integrator: IntegratorConfig::default(),
        duration,
        seed: 0,
        geometric_idealization: false,
        phase_portrait: None,
        output: OutputSpec::default(),
    }
}

fn constant(x: f64) -> WindSpec {
    WindSpec::Constant {
        velocity: Vec2::new(x, 0.0),
    }
}

/// Circle tracking in calm or slow wind, with a phase-portrait grid.
pub fn fig4(wind_speed: f64) -> ScenarioConfig {
    ScenarioConfig {
        phase_portrait: Some(PhasePortraitSpec::default()),
        ..base(constant(wind_speed), Vec2::new(250.0, 0.0), UnitVec2::J, 600.0)
    }
}

/// 12 m/s wind against a 14 m/s vehicle on a 100 m circle.
pub fn fig6() -> ScenarioConfig {
    base(constant(12.0), Vec2::new(250.0, 0.0), UnitVec2::J, 600.0)
}

/// 16 m/s wind, faster than the vehicle.
pub fn fig8() -> ScenarioConfig {
    base(constant(16.0), Vec2::new(0.0, -200.0), UnitVec2::I, 300.0)
}

/// Command direction against wind speed for a fixed look-ahead.
pub fn fig10() -> ContinuityConfig {
    ContinuityConfig {
        airspeed: AIRSPEED,
        params: params(),
        nu_deg: vec![15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 105.0, 120.0, 135.0, 150.0, 165.0],
        wind_range: WindRange {
            min: 0.0,
            max: 30.0,
            steps: 601,
        },
    }
}

/// Sinusoidal wind peaking at 16 m/s, vehicle starting 800 m upwind of
/// the circle centre.
pub fn fig11() -> ScenarioConfig {
    base(
        WindSpec::Sinusoidal {
            amplitude: 16.0,
            pulsation: 0.05,
            direction: UnitVec2::I,
        },
        Vec2::new(-800.0, 0.0),
        UnitVec2::I,
        400.0,
    )
}

/// Infinite line at 45° in a 30 m/s wind.
pub fn appendix_line() -> ScenarioConfig {
    ScenarioConfig {
        path: PathSpec::Line {
            anchor: Vec2::ZERO,
            direction: UnitVec2::new(Vec2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).expect("nonzero"),
            length: None,
        },
        ..base(constant(30.0), Vec2::new(0.0, -100.0), UnitVec2::J, 300.0)
    }
}

/// File name and contents of every bundled configuration.
pub fn bundled() -> Vec<(&'static str, String)> {
    vec![
        ("fig4_a.json", fig4(0.0).to_json()),
        ("fig4_b.json", fig4(7.0).to_json()),
        ("fig4_c.json", fig4(13.5).to_json()),
        ("fig6.json", fig6().to_json()),
        ("fig8.json", fig8().to_json()),
        ("fig10.json", fig10().to_json()),
        ("fig11.json", fig11().to_json()),
        ("appendix_line.json", appendix_line().to_json()),
    ]
}
