//! Look-ahead path-following guidance for unicycle vehicles in arbitrarily
//! strong wind, with the kinematic simulation needed to exercise it.
//!
//! ```
//! use windward_core::{guidance_step, presets, Regime, UnitVec2, Vec2, VehicleState};
//!
//! let path = presets::fig6().scenario().unwrap().path;
//! let vehicle = VehicleState::new(Vec2::new(250.0, 0.0), UnitVec2::J, 14.0).unwrap();
//! let out = guidance_step(&vehicle, &path, Vec2::new(16.0, 0.0), &presets::params()).unwrap();
//! assert_ne!(out.diagnostics.regime, Regime::Slow);
//! assert!((out.u.norm() - 0.05).abs() < 1e-12);
//!
//! let log = windward_core::run(&presets::fig6().scenario().unwrap()).unwrap();
//! assert!(log.last().error.norm() < 1.0);
//! ```

pub mod config;
pub mod dynamics;
pub mod geometry;
pub mod guidance;
pub mod path;
pub mod presets;
pub mod sim;
pub mod wind;

pub use dynamics::{IntegratorConfig, Method, VehicleState};
pub use geometry::{UnitVec2, Vec2};
pub use guidance::{guidance_step, GuidanceDiagnostics, GuidanceError, GuidanceOutput, GuidanceParams, Regime};
pub use path::{ArcChain, Circle, Footprint, FrenetFrame, Line, Orientation, PathError, PathModel};
pub use sim::{metrics, run, Metrics, Record, Scenario, SimError, TrajectoryLog};
pub use wind::WindModel;
