//! Closed-loop simulation, metrics, phase portraits, continuity sweeps and
//! an independent integration of the error dynamics.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{step, IntegratorConfig, Method, VehicleState};
use crate::geometry::{angle_between, cross_k, wrap_pi, UnitVec2, Vec2};
use crate::guidance::{
    gain_lower_bound, guidance_from_footprint, GuidanceDiagnostics, GuidanceError, GuidanceParams, Regime,
};
use crate::path::{Circle, Footprint, FrenetFrame, PathError, PathModel};
use crate::wind::WindModel;

/// Consecutive steps a singular footprint may be bridged before aborting.
pub const MAX_SINGULAR_STREAK: usize = 10;

/// Duration over which the error must stay inside the boundary layer to
/// count as settled, s.
pub const SETTLING_HOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("simulation aborted at t = {t} s (step {step}): {reason}")]
    Aborted { t: f64, step: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub path: PathModel,
    pub wind: WindModel,
    pub initial: VehicleState,
    pub params: GuidanceParams,
    pub integrator: IntegratorConfig,
    pub duration: f64,
    pub seed: u64,
    /// Slave the heading to the command direction every step.
    pub geometric_idealization: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if let Err(e) = self.params.validate() {
            return bad(e.to_string());
        }
        if let Err(e) = self.integrator.validate() {
            return bad(e.to_string());
        }
        if let Err(e) = self.initial.validate() {
            return bad(e.to_string());
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.integrator.dt).round() as usize
    }

    /// Minimum gain for zero steady-state error over this path and wind.
    pub fn gain_bound(&self) -> f64 {
        gain_lower_bound(
            self.path.max_abs_curvature(),
            self.wind.max_speed(),
            self.initial.airspeed,
        )
    }

    pub fn warnings(&self) -> Vec<String> {
        let bound = self.gain_bound();
        let mut out = Vec::new();
        if self.path.max_abs_curvature() > 0.0 && self.params.k <= bound {
            out.push(format!(
                "gain k = {} does not exceed the worst-case bound {:.6} for this path and wind",
                self.params.k, bound
            ));
        }
        out
    }
}

/// One logged step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub position: Vec2,
    pub heading: UnitVec2,
    pub ground_velocity: Vec2,
    pub wind: Vec2,
    pub u: Vec2,
    pub accel: Vec2,
    pub error: Vec2,
    pub e_star: f64,
    pub eta: f64,
    pub diagnostics: GuidanceDiagnostics,
}

impl Record {
    pub fn regime(&self) -> Regime {
        self.diagnostics.regime
    }

    /// Curvature of the ground track, assuming the wind is not changing.
    pub fn ground_curvature(&self) -> f64 {
        let vg = self.ground_velocity;
        cross_k(vg, self.accel) / vg.norm().powi(3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    pub dt: f64,
    pub delta_bl: f64,
}

impl TrajectoryLog {
    pub fn last(&self) -> &Record {
        self.records.last().expect("a log holds at least the initial record")
    }

    /// Records with `t ≥ t0`.
    pub fn since(&self, t0: f64) -> &[Record] {
        let i = self.records.partition_point(|r| r.t < t0);
        &self.records[i..]
    }
}

/// Signed cross-track error: positive when the vehicle lies on the
/// concave side of the path.
pub fn signed_cross_track(fp: &Footprint) -> f64 {
    -fp.error.dot(fp.frame.normal.vec())
}

/// Path course minus ground course, wrapped to `[−π, π]`.
pub fn tracking_angle(tangent: UnitVec2, ground_velocity: Vec2, heading: UnitVec2) -> f64 {
    let course = if ground_velocity.norm() > 0.0 {
        ground_velocity.angle()
    } else {
        heading.angle()
    };
    wrap_pi(tangent.angle() - course)
}

/// Steps a scenario one record at a time.
pub struct Simulation<'a> {
    scenario: &'a Scenario,
    state: VehicleState,
    index: usize,
    steps: usize,
    last_frame: Option<(FrenetFrame, f64)>,
    singular_streak: usize,
}

impl<'a> Simulation<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        Ok(Simulation {
            scenario,
            state: scenario.initial,
            index: 0,
            steps: scenario.steps(),
            last_frame: None,
            singular_streak: 0,
        })
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.index as f64 * self.scenario.integrator.dt
    }

    fn abort(&self, reason: impl Into<String>) -> SimError {
        SimError::Aborted {
            t: self.time(),
            step: self.index,
            reason: reason.into(),
        }
    }

    fn footprint(&mut self) -> Result<Footprint, SimError> {
        let pos = self.state.position;
        match self.scenario.path.project(pos) {
            Ok(fp) => {
                self.singular_streak = 0;
                self.last_frame = Some((fp.frame, fp.param));
                Ok(fp)
            }
            Err(e @ (PathError::DegenerateProjection(_) | PathError::FrenetSingularity(_))) => {
                self.singular_streak += 1;
                match self.last_frame {
                    Some((frame, param)) if self.singular_streak <= MAX_SINGULAR_STREAK => Ok(Footprint {
                        error: frame.point - pos,
                        frame,
                        param,
                    }),
                    Some(_) => Err(self.abort(format!("{e} for more than {MAX_SINGULAR_STREAK} steps"))),
                    None => Err(self.abort(e.to_string())),
                }
            }
            Err(e) => Err(self.abort(e.to_string())),
        }
    }

    /// Evaluates the law at the current time, logs it and integrates to the
    /// next step. Returns `None` once the final record has been produced.
    pub fn next_record(&mut self) -> Result<Option<Record>, SimError> {
        if self.index > self.steps {
            return Ok(None);
        }
        let sc = self.scenario;
        let t = self.time();
        let w = sc.wind.sample(t);
        let fp = self.footprint()?;
        let out = guidance_from_footprint(&self.state, &fp, w, &sc.params).map_err(|e| self.abort(e.to_string()))?;
        if sc.geometric_idealization {
            if let Some(dir) = out.u.normalize() {
                self.state.heading = dir;
            }
        }
        let vg = self.state.ground_velocity(w);
        let record = Record {
            t,
            position: self.state.position,
            heading: self.state.heading,
            ground_velocity: vg,
            wind: w,
            u: out.u,
            accel: out.accel,
            error: fp.error,
            e_star: signed_cross_track(&fp),
            eta: tracking_angle(fp.frame.tangent, vg, self.state.heading),
            diagnostics: out.diagnostics,
        };
        if self.index < self.steps {
            let accel = if sc.geometric_idealization {
                Vec2::ZERO
            } else {
                out.accel
            };
            self.state = step(&self.state, accel, &sc.wind, t, &sc.integrator);
            if !self.state.position.is_finite() {
                return Err(self.abort("state became non-finite"));
            }
        }
        self.index += 1;
        Ok(Some(record))
    }
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario) -> Result<TrajectoryLog, SimError> {
    let mut sim = Simulation::new(scenario)?;
    let mut records = Vec::with_capacity(scenario.steps() + 1);
    while let Some(r) = sim.next_record()? {
        records.push(r);
    }
    Ok(TrajectoryLog {
        records,
        warnings: scenario.warnings(),
        dt: scenario.integrator.dt,
        delta_bl: scenario.params.delta_bl,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RegimeOccupancy {
    pub slow: f64,
    pub fast1: f64,
    pub fast2: f64,
}

impl RegimeOccupancy {
    pub fn of(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Slow => self.slow,
            Regime::FastFeasible => self.fast1,
            Regime::FastInfeasible => self.fast2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub duration: f64,
    pub records: usize,
    pub final_error: f64,
    pub max_error: f64,
    pub settling_time: Option<f64>,
    pub max_error_after_settling: Option<f64>,
    pub mean_abs_eta_after_settling: Option<f64>,
    pub regime_occupancy: RegimeOccupancy,
    /// `T̂_M·(−ŵ)` at the last record; absent in calm air.
    pub terminal_antiwind_alignment: Option<f64>,
    pub terminal_accel: f64,
    pub warnings: Vec<String>,
}

/// First time after which `‖e‖ < δ_BL` holds for [`SETTLING_HOLD`] seconds.
pub fn settling_time(log: &TrajectoryLog) -> Option<f64> {
    let mut start: Option<f64> = None;
    for r in &log.records {
        if r.error.norm() < log.delta_bl {
            let s = *start.get_or_insert(r.t);
            if r.t - s >= SETTLING_HOLD - 1e-9 {
                return Some(s);
            }
        } else {
            start = None;
        }
    }
    None
}

pub fn metrics(log: &TrajectoryLog) -> Metrics {
    let last = log.last();
    let n = log.records.len() as f64;
    let count = |reg: Regime| log.records.iter().filter(|r| r.regime() == reg).count() as f64 / n;
    let settling = settling_time(log);
    let (max_after, mean_eta) = match settling {
        Some(ts) => {
            let tail = log.since(ts);
            let max = tail.iter().map(|r| r.error.norm()).fold(0.0, f64::max);
            let mean = tail.iter().map(|r| r.eta.abs()).sum::<f64>() / tail.len() as f64;
            (Some(max), Some(mean))
        }
        None => (None, None),
    };
    Metrics {
        duration: last.t,
        records: log.records.len(),
        final_error: last.error.norm(),
        max_error: log.records.iter().map(|r| r.error.norm()).fold(0.0, f64::max),
        settling_time: settling,
        max_error_after_settling: max_after,
        mean_abs_eta_after_settling: mean_eta,
        regime_occupancy: RegimeOccupancy {
            slow: count(Regime::Slow),
            fast1: count(Regime::FastFeasible),
            fast2: count(Regime::FastInfeasible),
        },
        terminal_antiwind_alignment: last.wind.normalize().map(|w| -last.heading.dot(w)),
        terminal_accel: last.accel.norm(),
        warnings: log.warnings.clone(),
    }
}

/// State of the error dynamics: the error and the three moving frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDynamicsState {
    pub e: Vec2,
    pub path_tangent: UnitVec2,
    pub path_normal: UnitVec2,
    pub heading: UnitVec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDynamicsRates {
    pub e: Vec2,
    pub path_tangent: Vec2,
    pub path_normal: Vec2,
    pub heading: Vec2,
}

/// Time derivatives of the error-coordinate state. The path normal always
/// points to the centre of curvature, so only `|κ|` enters.
pub fn error_dynamics_rhs(
    s: &ErrorDynamicsState,
    kappa: f64,
    w: Vec2,
    airspeed: f64,
    accel: Vec2,
) -> Result<ErrorDynamicsRates, PathError> {
    let x = RawEd {
        e: s.e,
        tp: s.path_tangent.vec(),
        np: s.path_normal.vec(),
        tm: s.heading.vec(),
    };
    let mut r = raw_rates(&x, kappa, w, airspeed)?;
    r.heading = accel / airspeed;
    Ok(r)
}

/// Rates on unnormalised frames, heading rate left at zero.
fn raw_rates(x: &RawEd, kappa: f64, w: Vec2, airspeed: f64) -> Result<ErrorDynamicsRates, PathError> {
    let kappa = kappa.abs();
    let en = x.e.dot(x.np);
    let denom = 1.0 + kappa * en;
    if denom.abs() <= 1e-9 {
        return Err(PathError::FrenetSingularity(denom));
    }
    let vg = x.tm * airspeed + w;
    let (vt, vn) = (vg.dot(x.tp), vg.dot(x.np));
    let turn = kappa * vt / denom;
    Ok(ErrorDynamicsRates {
        e: x.tp * (-vt * kappa * en / denom) - x.np * vn,
        path_tangent: x.np * turn,
        path_normal: x.tp * -turn,
        heading: Vec2::ZERO,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub t: f64,
    pub e: Vec2,
}

/// Closes the loop directly in error coordinates, without ever
/// projecting onto the path. Only paths of constant curvature qualify.
pub fn run_error_dynamics(scenario: &Scenario) -> Result<Vec<ErrorSample>, SimError> {
    scenario.validate()?;
    if !matches!(scenario.path, PathModel::Line(_) | PathModel::Circle(_)) {
        return Err(SimError::InvalidScenario(
            "error-dynamics integration needs a line or a circle".into(),
        ));
    }
    let fp0 = scenario
        .path
        .project(scenario.initial.position)
        .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    let kappa = fp0.frame.curvature;
    let v = scenario.initial.airspeed;
    let dt = scenario.integrator.dt;
    let mut s = ErrorDynamicsState {
        e: fp0.error,
        path_tangent: fp0.frame.tangent,
        path_normal: fp0.frame.normal,
        heading: scenario.initial.heading,
    };
    let steps = scenario.steps();
    let mut out = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = i as f64 * dt;
        out.push(ErrorSample { t, e: s.e });
        if i == steps {
            break;
        }
        let abort = |reason: String| SimError::Aborted { t, step: i, reason };
        let fp = Footprint {
            frame: FrenetFrame {
                point: s.e,
                tangent: s.path_tangent,
                normal: s.path_normal,
                curvature: kappa,
                torsion: 0.0,
            },
            error: s.e,
            param: 0.0,
        };
        let vehicle = VehicleState {
            position: Vec2::ZERO,
            heading: s.heading,
            airspeed: v,
        };
        let cmd = guidance_from_footprint(&vehicle, &fp, scenario.wind.sample(t), &scenario.params)
            .map_err(|e: GuidanceError| abort(e.to_string()))?;
        let a_n = cross_k(s.heading.vec(), cmd.accel);
        s = error_dynamics_step(&s, kappa, a_n, &scenario.wind, v, t, &scenario.integrator)
            .map_err(|e| abort(e.to_string()))?;
    }
    Ok(out)
}

/// Largest gap between `‖e‖` from the kinematic simulation and from the
/// error-dynamics integration, over the first `horizon` seconds.
pub fn oracle_discrepancy(scenario: &Scenario, horizon: f64) -> Result<f64, SimError> {
    let mut sc = scenario.clone();
    sc.duration = sc.duration.min(horizon);
    let log = run(&sc)?;
    let oracle = run_error_dynamics(&sc)?;
    if log.records.len() != oracle.len() {
        return Err(SimError::InvalidScenario(
            "oracle and simulation disagree on step count".into(),
        ));
    }
    Ok(log
        .records
        .iter()
        .zip(&oracle)
        .map(|(r, o)| (r.error.norm() - o.e.norm()).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy)]
struct RawEd {
    e: Vec2,
    tp: Vec2,
    np: Vec2,
    tm: Vec2,
}

impl RawEd {
    fn axpy(self, r: &ErrorDynamicsRates, h: f64) -> RawEd {
        RawEd {
            e: self.e + r.e * h,
            tp: self.tp + r.path_tangent * h,
            np: self.np + r.path_normal * h,
            tm: self.tm + r.heading * h,
        }
    }
}

fn error_dynamics_step(
    s: &ErrorDynamicsState,
    kappa: f64,
    a_n: f64,
    wind: &WindModel,
    airspeed: f64,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<ErrorDynamicsState, PathError> {
    let unit = |v: Vec2, fallback: UnitVec2| UnitVec2::new(v).unwrap_or(fallback);
    let rates = |x: RawEd, t: f64| {
        let mut r = raw_rates(&x, kappa, wind.sample(t), airspeed)?;
        r.heading = x.tm.perp() * (a_n / airspeed);
        Ok::<_, PathError>(r)
    };
    let x0 = RawEd {
        e: s.e,
        tp: s.path_tangent.vec(),
        np: s.path_normal.vec(),
        tm: s.heading.vec(),
    };
    let h = cfg.dt;
    let x1 = match cfg.method {
        Method::Euler => x0.axpy(&rates(x0, t)?, h),
        Method::Rk4 => {
            let k1 = rates(x0, t)?;
            let k2 = rates(x0.axpy(&k1, h / 2.0), t + h / 2.0)?;
            let k3 = rates(x0.axpy(&k2, h / 2.0), t + h / 2.0)?;
            let k4 = rates(x0.axpy(&k3, h), t + h)?;
            let sum = ErrorDynamicsRates {
                e: k1.e + (k2.e + k3.e) * 2.0 + k4.e,
                path_tangent: k1.path_tangent + (k2.path_tangent + k3.path_tangent) * 2.0 + k4.path_tangent,
                path_normal: k1.path_normal + (k2.path_normal + k3.path_normal) * 2.0 + k4.path_normal,
                heading: k1.heading + (k2.heading + k3.heading) * 2.0 + k4.heading,
            };
            x0.axpy(&sum, h / 6.0)
        }
    };
    Ok(ErrorDynamicsState {
        e: x1.e,
        path_tangent: unit(x1.tp, s.path_tangent),
        path_normal: unit(x1.np, s.path_normal),
        heading: unit(x1.tm, s.heading),
    })
}

/// Initial state on a circle for a phase-portrait cell. The vehicle sits
/// on the ray from the centre at angle `bearing`, `e*` inside the circle
/// (or outside for negative values), flying a ground course `η` to the
/// right of the path tangent. Cells with `e* > R` land on the opposite
/// side of the centre; a start within 1 m of the centre is pushed out to
/// 1 m.
pub fn phase_initial_state(
    circle: &Circle,
    bearing: f64,
    eta: f64,
    e_star: f64,
    airspeed: f64,
    wind: Vec2,
) -> Result<VehicleState, SimError> {
    let mut offset = circle.radius - e_star;
    if offset.abs() < 1.0 {
        offset = 1.0;
    }
    let position = circle.center + Vec2::from_angle(bearing) * offset;
    let fp = PathModel::Circle(*circle)
        .project(position)
        .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    let course = fp.frame.tangent.rotate(-eta);
    let tri =
        crate::guidance::solve_l1e(course, wind, airspeed).map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    VehicleState::new(position, tri.l1e, airspeed).map_err(|e| SimError::InvalidScenario(e.to_string()))
}

/// Uniform grid, endpoints included, `η` varying slowest.
pub fn phase_grid(n_eta: usize, n_e: usize, eta_max: f64, e_max: f64) -> Vec<(f64, f64)> {
    let lin = |n: usize, lim: f64, i: usize| {
        if n == 1 {
            0.0
        } else {
            -lim + 2.0 * lim * i as f64 / (n - 1) as f64
        }
    };
    (0..n_eta)
        .flat_map(|i| (0..n_e).map(move |j| (lin(n_eta, eta_max, i), lin(n_e, e_max, j))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    pub circle: Circle,
    /// Direction of the ray holding the initial positions, rad from `+i`.
    pub bearing: f64,
    pub wind: Vec2,
    pub airspeed: f64,
    pub params: GuidanceParams,
    pub integrator: IntegratorConfig,
    pub duration: f64,
    /// Keep every n-th sample; the last one is always kept.
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub t: f64,
    pub eta: f64,
    pub e_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub id: usize,
    /// Grid cell the trace was started from.
    pub target: (f64, f64),
    pub samples: Vec<PhaseSample>,
}

impl PhaseTrace {
    pub fn last(&self) -> &PhaseSample {
        self.samples.last().expect("traces hold at least one sample")
    }
}

impl PhasePortrait {
    pub fn scenario(&self, eta: f64, e_star: f64) -> Result<Scenario, SimError> {
        Ok(Scenario {
            path: PathModel::Circle(self.circle),
            wind: WindModel::Constant(self.wind),
            initial: phase_initial_state(&self.circle, self.bearing, eta, e_star, self.airspeed, self.wind)?,
            params: self.params,
            integrator: self.integrator,
            duration: self.duration,
            seed: 0,
            geometric_idealization: false,
        })
    }

    pub fn trace(&self, id: usize, eta: f64, e_star: f64) -> Result<PhaseTrace, SimError> {
        let sc = self.scenario(eta, e_star)?;
        let mut sim = Simulation::new(&sc)?;
        let every = self.record_every.max(1);
        let last_index = sc.steps();
        let mut samples = Vec::with_capacity(last_index / every + 2);
        let mut i = 0;
        while let Some(r) = sim.next_record()? {
            if i % every == 0 || i == last_index {
                samples.push(PhaseSample {
                    t: r.t,
                    eta: r.eta,
                    e_star: r.e_star,
                });
            }
            i += 1;
        }
        Ok(PhaseTrace {
            id,
            target: (eta, e_star),
            samples,
        })
    }

    /// One trace per grid cell, evaluated in parallel on the current
    /// rayon pool.
    pub fn run(&self, grid: &[(f64, f64)]) -> Result<Vec<PhaseTrace>, SimError> {
        grid.par_iter()
            .enumerate()
            .map(|(id, &(eta, e_star))| self.trace(id, eta, e_star))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub nu: f64,
    pub w_star: f64,
    pub regime: Regime,
    /// Angle between `−ŵ` and the command direction.
    pub y: f64,
    pub ux: f64,
    pub uy: f64,
}

/// Command at a fixed look-ahead geometry: the vehicle is far from a
/// straight path so that `L̂₀ = L̂ = ê`, and the wind is placed at angle
/// `π − ν` from `L̂₀`.
pub fn continuity_point(
    nu: f64,
    w_star: f64,
    airspeed: f64,
    params: &GuidanceParams,
) -> Result<ContinuityRow, GuidanceError> {
    let l0 = UnitVec2::J;
    let w_hat = l0.rotate(-(PI - nu));
    let w = w_hat * w_star;
    let dist = 10.0 * params.delta_bl;
    let fp = PathModel::line(Vec2::new(0.0, dist), UnitVec2::I).project(Vec2::ZERO)?;
    let vehicle = VehicleState {
        position: Vec2::ZERO,
        heading: l0,
        airspeed,
    };
    let out = guidance_from_footprint(&vehicle, &fp, w, params)?;
    let u_hat = out.u.normalize().expect("‖u‖ = k > 0");
    Ok(ContinuityRow {
        nu,
        w_star,
        regime: out.diagnostics.regime,
        y: angle_between(-w_hat, u_hat),
        ux: out.u.x,
        uy: out.u.y,
    })
}

/// Command direction across a sweep of wind speeds, one series per `ν`.
pub fn continuity_sweep(
    nus: &[f64],
    winds: &[f64],
    airspeed: f64,
    params: &GuidanceParams,
) -> Result<Vec<ContinuityRow>, GuidanceError> {
    nus.iter()
        .flat_map(|&nu| winds.iter().map(move |&w| (nu, w)))
        .map(|(nu, w)| continuity_point(nu, w, airspeed, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::Orientation;

    fn params() -> GuidanceParams {
        GuidanceParams::new(0.05, 50.0).unwrap()
    }

    fn circle_scenario(wind: Vec2, start: Vec2, heading: UnitVec2, duration: f64) -> Scenario {
        Scenario {
            path: PathModel::circle(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap(),
            wind: WindModel::Constant(wind),
            initial: VehicleState::new(start, heading, 14.0).unwrap(),
            params: params(),
            integrator: IntegratorConfig::default(),
            duration,
            seed: 0,
            geometric_idealization: false,
        }
    }

    #[test]
    fn record_count_and_times() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(100.0, 0.0), UnitVec2::J, 2.0);
        let log = run(&sc).unwrap();
        assert_eq!(log.records.len(), 201);
        assert!(log.records.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(log.last().t, 2.0);
    }

    #[test]
    fn equilibrium_on_line_persists() {
        let sc = Scenario {
            path: PathModel::line(Vec2::ZERO, UnitVec2::I),
            ..circle_scenario(Vec2::ZERO, Vec2::ZERO, UnitVec2::I, 300.0)
        };
        let log = run(&sc).unwrap();
        let max = log.records.iter().map(|r| r.error.norm()).fold(0.0, f64::max);
        assert!(max <= 0.1, "{max}");
    }

    #[test]
    fn calm_circle_stays_on_path() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(100.0, 0.0), UnitVec2::J, 300.0);
        let log = run(&sc).unwrap();
        let max = log.records.iter().map(|r| r.error.norm()).fold(0.0, f64::max);
        assert!(max < 0.1, "{max}");
    }

    #[test]
    fn deterministic() {
        let sc = circle_scenario(Vec2::new(12.0, 0.0), Vec2::new(200.0, -30.0), UnitVec2::I, 20.0);
        assert_eq!(run(&sc).unwrap(), run(&sc).unwrap());
    }

    #[test]
    fn centre_start_aborts() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::ZERO, UnitVec2::I, 5.0);
        assert!(matches!(run(&sc), Err(SimError::Aborted { step: 0, .. })));
    }

    #[test]
    fn passing_near_the_centre_is_bridged() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(-0.07, 0.0), UnitVec2::I, 0.02);
        let mut sim = Simulation::new(&sc).unwrap();
        assert!(sim.next_record().unwrap().is_some());
        // fly straight through the centre: projection is singular there
        sim.state.position = Vec2::ZERO;
        let r = sim.next_record().unwrap().unwrap();
        assert_eq!(sim.singular_streak, 1);
        assert!(r.u.norm() > 0.0);
        for _ in 0..MAX_SINGULAR_STREAK {
            sim.state.position = Vec2::ZERO;
            sim.index = 1;
            let _ = sim.next_record();
        }
        sim.state.position = Vec2::ZERO;
        sim.index = 1;
        assert!(matches!(sim.next_record(), Err(SimError::Aborted { .. })));
    }

    #[test]
    fn invalid_scenarios() {
        let mut sc = circle_scenario(Vec2::ZERO, Vec2::new(100.0, 0.0), UnitVec2::J, 0.0);
        assert!(matches!(run(&sc), Err(SimError::InvalidScenario(_))));
        sc.duration = 1.0;
        sc.integrator.dt = -1.0;
        assert!(matches!(run(&sc), Err(SimError::InvalidScenario(_))));
    }

    #[test]
    fn gain_warning() {
        let mut sc = circle_scenario(Vec2::new(12.0, 0.0), Vec2::new(100.0, 0.0), UnitVec2::J, 1.0);
        assert!(sc.warnings().is_empty());
        sc.params.k = 0.03;
        let bound = (1.0 + 12.0 / 14.0f64).powi(2) * 0.01;
        assert!((sc.gain_bound() - bound).abs() < 1e-15);
        assert_eq!(sc.warnings().len(), 1);
    }

    #[test]
    fn e_star_and_eta_conventions() {
        // outside the circle, flying along the tangent
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(150.0, 0.0), UnitVec2::J, 0.0 + 0.01);
        let log = run(&sc).unwrap();
        let r = &log.records[0];
        assert!((r.e_star + 50.0).abs() < 1e-12);
        assert!(r.eta.abs() < 1e-12);
        // inside, flying 0.3 rad to the right of the tangent
        let sc = circle_scenario(
            Vec2::ZERO,
            Vec2::new(80.0, 0.0),
            UnitVec2::from_angle(PI / 2.0 - 0.3),
            0.01,
        );
        let r = run(&sc).unwrap().records[0];
        assert!((r.e_star - 20.0).abs() < 1e-12);
        assert!((r.eta - 0.3).abs() < 1e-12);
    }

    #[test]
    fn phase_initial_state_hits_the_cell() {
        let circle = Circle::new(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap();
        for (eta, e_star) in [(0.5, -150.0), (-2.0, 40.0), (3.0, 0.0)] {
            let s = phase_initial_state(&circle, 1.0, eta, e_star, 14.0, Vec2::new(7.0, 0.0)).unwrap();
            let fp = PathModel::Circle(circle).project(s.position).unwrap();
            assert!((signed_cross_track(&fp) - e_star).abs() < 1e-9);
            let vg = s.ground_velocity(Vec2::new(7.0, 0.0));
            assert!((tracking_angle(fp.frame.tangent, vg, s.heading) - eta).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_layout() {
        let g = phase_grid(13, 9, PI, 200.0);
        assert_eq!(g.len(), 117);
        assert_eq!(g[0], (-PI, -200.0));
        assert_eq!(g[116], (PI, 200.0));
        assert_eq!(g[8], (-PI, 200.0));
    }

    #[test]
    fn phase_trace_from_equilibrium_stays() {
        let pp = PhasePortrait {
            circle: Circle::new(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap(),
            bearing: 0.0,
            wind: Vec2::ZERO,
            airspeed: 14.0,
            params: params(),
            integrator: IntegratorConfig::default(),
            duration: 60.0,
            record_every: 100,
        };
        let tr = pp.trace(0, 0.0, 0.0).unwrap();
        assert_eq!(tr.samples.len(), 61);
        for s in &tr.samples {
            assert!(s.eta.abs() < 0.02 && s.e_star.abs() < 1.0);
        }
    }

    #[test]
    fn error_rhs_straight_line() {
        let s = ErrorDynamicsState {
            e: Vec2::ZERO,
            path_tangent: UnitVec2::I,
            path_normal: UnitVec2::J,
            heading: UnitVec2::from_angle(0.2),
        };
        let r = error_dynamics_rhs(&s, 0.0, Vec2::new(3.0, 0.0), 14.0, Vec2::ZERO).unwrap();
        assert_eq!(r.path_tangent, Vec2::ZERO);
        assert_eq!(r.path_normal, Vec2::ZERO);
        // only the cross-track part of the ground speed moves the error
        let vg = UnitVec2::from_angle(0.2) * 14.0 + Vec2::new(3.0, 0.0);
        assert!((r.e - Vec2::new(0.0, -vg.y)).norm() < 1e-15);
    }

    #[test]
    fn error_rhs_matches_kinematics() {
        // ė = ṙ_P − ṙ_M with ṙ_P = ṡ T̂_P
        let frame = FrenetFrame::new(Vec2::new(100.0, 0.0), UnitVec2::J, 0.01);
        let e = Vec2::new(-30.0, 0.0);
        let heading = UnitVec2::from_angle(2.0);
        let w = Vec2::new(5.0, -4.0);
        let s = ErrorDynamicsState {
            e,
            path_tangent: frame.tangent,
            path_normal: frame.normal,
            heading,
        };
        let r = error_dynamics_rhs(&s, 0.01, w, 14.0, Vec2::ZERO).unwrap();
        let vg = heading * 14.0 + w;
        let sd = crate::path::s_dot(&frame, e, vg).unwrap();
        let expected = frame.tangent * sd - vg;
        assert!((r.e - expected).norm() < 1e-12);
        assert!((r.path_tangent - frame.normal * (0.01 * sd)).norm() < 1e-15);
    }

    #[test]
    fn error_rhs_singularity() {
        let s = ErrorDynamicsState {
            e: Vec2::new(100.0, 0.0),
            path_tangent: UnitVec2::J,
            path_normal: -UnitVec2::I,
            heading: UnitVec2::I,
        };
        assert!(matches!(
            error_dynamics_rhs(&s, -0.01, Vec2::ZERO, 14.0, Vec2::ZERO),
            Err(PathError::FrenetSingularity(_))
        ));
    }

    #[test]
    fn error_dynamics_rejects_arc_chains() {
        let chain = crate::path::ArcChain::builder(Vec2::ZERO, UnitVec2::I)
            .line(10.0)
            .build(false)
            .unwrap();
        let sc = Scenario {
            path: PathModel::ArcChain(chain),
            ..circle_scenario(Vec2::ZERO, Vec2::new(1.0, 1.0), UnitVec2::I, 1.0)
        };
        assert!(run_error_dynamics(&sc).is_err());
    }

    #[test]
    fn metrics_of_perfect_tracking() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(100.0, 0.0), UnitVec2::J, 30.0);
        let m = metrics(&run(&sc).unwrap());
        assert!(m.final_error < 1e-6);
        assert_eq!(m.settling_time, Some(0.0));
        assert_eq!(m.regime_occupancy.slow, 1.0);
        assert_eq!(m.terminal_antiwind_alignment, None);
        assert_eq!(m.records, 3001);
    }

    #[test]
    fn settling_requires_a_hold() {
        let sc = circle_scenario(Vec2::ZERO, Vec2::new(100.0, 0.0), UnitVec2::J, 5.0);
        assert_eq!(settling_time(&run(&sc).unwrap()), None);
    }

    #[test]
    fn continuity_rows() {
        let p = params();
        let rows = continuity_sweep(&[0.0, 1.0, 2.5], &[10.0, 16.0], 14.0, &p).unwrap();
        assert_eq!(rows.len(), 6);
        // ν = 0 means L̂₀ = −ŵ: straight into the wind in any regime
        assert!(rows[0].y < 1e-9 && rows[1].y < 1e-9);
        assert_eq!(rows[0].regime, Regime::Slow);
        assert_eq!(rows[1].regime, Regime::FastInfeasible);
        assert_eq!(rows[5].regime, Regime::FastFeasible);
        // ν = 1 rad with w⋆ = 16: λ = π − 1 lies outside the cone
        assert_eq!(rows[3].regime, Regime::FastInfeasible);
        let f = crate::guidance::infeasible_mapping(1.0, (14.0f64 / 16.0).asin());
        assert!((rows[3].y - f).abs() < 1e-9);
        assert!(rows.iter().all(|r| (r.ux.hypot(r.uy) - 0.05).abs() < 1e-12));
    }
}
