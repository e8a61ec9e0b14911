//! Look-ahead guidance for unicycle vehicles in arbitrarily strong wind.
//!
//! The command is an auxiliary vector `u` with `‖u‖ = k`; the applied
//! normal acceleration is `(v_M × u) × v_M`, which never has a component
//! along the airspeed. Three regimes share that structure:
//!
//! * [`Regime::Slow`]: wind no faster than the vehicle. The heading that
//!   makes the ground track follow `L̂₀` is found from the wind triangle and
//!   rotated by a shifting angle that supplies the path's centripetal
//!   acceleration.
//! * [`Regime::FastFeasible`]: faster wind, but `L̂₀` still inside the cone
//!   of reachable ground directions. Same construction with a shifting
//!   angle that fades to zero at the cone edge.
//! * [`Regime::FastInfeasible`]: `L̂₀` outside the cone. The vehicle trades
//!   tracking for safety, turning progressively into the wind.
//!
//! Angles are unsigned (`arccos` of dot products) unless noted; the side is
//! recovered from `s = sign((ŵ × L̂₀)·k)` with `s = +1` on ties.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::VehicleState;
use crate::geometry::{angle_between, clamp_unit, rot, triple_product_dir, UnitVec2, Vec2};
use crate::path::{Footprint, FrenetFrame, PathError, PathModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("gain k = {k} is below the path curvature |κ| = {kappa}")]
    GainTooSmall { kappa: f64, k: f64 },
    #[error("no heading makes the ground track follow L0 (w sin λe / v = {ratio})")]
    Infeasible { ratio: f64 },
    #[error("feasibility cone is degenerate (β = π/2)")]
    DegenerateCone,
    #[error("{0} called outside its wind regime")]
    RegimeMismatch(&'static str),
    #[error("invalid guidance parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceParams {
    /// Gain of `u = k L̂`, 1/m.
    pub k: f64,
    /// Boundary-layer width, m.
    pub delta_bl: f64,
    /// Added to the airspeed in the `w⋆ ≤ v⋆` regime test, m/s.
    #[serde(default)]
    pub eps_speed: f64,
    /// Guard for vanishing denominators and radicands.
    #[serde(default = "default_eps_singularity")]
    pub eps_singularity: f64,
}

fn default_eps_singularity() -> f64 {
    1e-9
}

impl GuidanceParams {
    pub fn new(k: f64, delta_bl: f64) -> Result<Self, GuidanceError> {
        let p = GuidanceParams {
            k,
            delta_bl,
            eps_speed: 0.0,
            eps_singularity: default_eps_singularity(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(GuidanceError::InvalidParams(format!(
                "k must be positive, got {}",
                self.k
            )));
        }
        if !(self.delta_bl > 0.0 && self.delta_bl.is_finite()) {
            return Err(GuidanceError::InvalidParams(format!(
                "delta_bl must be positive, got {}",
                self.delta_bl
            )));
        }
        if !(self.eps_speed >= 0.0 && self.eps_speed.is_finite()) {
            return Err(GuidanceError::InvalidParams("eps_speed must be non-negative".into()));
        }
        if !(self.eps_singularity > 0.0 && self.eps_singularity < 1e-3) {
            return Err(GuidanceError::InvalidParams(
                "eps_singularity must lie in (0, 1e-3)".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest gain that keeps zero steady-state error on a path with
/// curvature up to `max_kappa` in winds up to `w_max`.
pub fn gain_lower_bound(max_kappa: f64, w_max: f64, airspeed: f64) -> f64 {
    (1.0 + w_max / airspeed).powi(2) * max_kappa
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "slow")]
    Slow,
    #[serde(rename = "fast1")]
    FastFeasible,
    #[serde(rename = "fast2")]
    FastInfeasible,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Slow, Regime::FastFeasible, Regime::FastInfeasible];

    pub fn label(self) -> &'static str {
        match self {
            Regime::Slow => "slow",
            Regime::FastFeasible => "fast1",
            Regime::FastInfeasible => "fast2",
        }
    }

    pub fn from_label(s: &str) -> Option<Regime> {
        Regime::ALL.into_iter().find(|r| r.label() == s)
    }
}

/// Every named intermediate of the law. `None` marks quantities that are
/// undefined at this state (e.g. wind angles for zero wind) or unused by
/// the active regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceDiagnostics {
    pub regime: Regime,
    pub beta: f64,
    pub lambda: Option<f64>,
    pub lambda_e: Option<f64>,
    pub y: Option<f64>,
    pub nu: Option<f64>,
    pub theta_l: f64,
    pub d_shift: f64,
    pub theta_s: Option<f64>,
    pub theta_s2: Option<f64>,
    pub alpha_out: Option<f64>,
    pub sigma_safe: Option<f64>,
    pub l0: UnitVec2,
    pub l: UnitVec2,
    pub l1e: Option<UnitVec2>,
}

impl GuidanceDiagnostics {
    /// The rotation actually applied to `k L̂₁ₑ`, if any.
    pub fn theta_shift(&self) -> Option<f64> {
        match self.regime {
            Regime::Slow => self.theta_s,
            Regime::FastFeasible => self.theta_s2,
            Regime::FastInfeasible => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceOutput {
    pub u: Vec2,
    pub accel: Vec2,
    pub diagnostics: GuidanceDiagnostics,
}

/// Blend angle: `π/2` on the path, `0` at and beyond the boundary layer.
pub fn theta_l(dist: f64, delta_bl: f64) -> f64 {
    FRAC_PI_2 * (1.0 - (dist / delta_bl).clamp(0.0, 1.0)).sqrt()
}

/// Radial shift that makes the steady-state look-ahead ask for exactly
/// the path curvature.
pub fn d_shift(kappa: f64, params: &GuidanceParams) -> Result<f64, GuidanceError> {
    let ratio = kappa.abs() / params.k;
    if ratio > 1.0 {
        return Err(GuidanceError::GainTooSmall {
            kappa: kappa.abs(),
            k: params.k,
        });
    }
    let c = 2.0 / PI * ratio.acos();
    Ok((1.0 - c * c) * params.delta_bl)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookAhead {
    pub dir: UnitVec2,
    pub theta_l: f64,
    pub d_shift: f64,
}

fn blend(d: Vec2, tangent: UnitVec2, delta_bl: f64) -> (UnitVec2, f64) {
    let dist = d.norm();
    let th = theta_l(dist, delta_bl);
    let dir = match d.normalize() {
        // d̂ is undefined at d = 0, where its weight cos(π/2) vanishes anyway
        None => tangent,
        Some(d_hat) => {
            let (s, c) = th.sin_cos();
            (d_hat * c + tangent * s).normalize().unwrap_or(tangent)
        }
    };
    (dir, th)
}

/// `L̂ = cos θ_L d̂ + sin θ_L T̂_P` for an already shifted distance `d`.
/// `kappa` only enters through the returned `d_shift` and the gain check.
pub fn lookahead(d: Vec2, tangent: UnitVec2, params: &GuidanceParams, kappa: f64) -> Result<LookAhead, GuidanceError> {
    let shift = d_shift(kappa, params)?;
    let (dir, theta_l) = blend(d, tangent, params.delta_bl);
    Ok(LookAhead {
        dir,
        theta_l,
        d_shift: shift,
    })
}

/// `d = e + d_shift N̂_P`.
pub fn shifted_distance(e: Vec2, frame: &FrenetFrame, params: &GuidanceParams) -> Result<Vec2, GuidanceError> {
    Ok(e + frame.normal * d_shift(frame.curvature, params)?)
}

/// Look-ahead evaluated on the raw error instead of the shifted distance.
pub fn lookahead_l0(e: Vec2, tangent: UnitVec2, params: &GuidanceParams) -> UnitVec2 {
    blend(e, tangent, params.delta_bl).0
}

/// Half-aperture of the cone of reachable ground-speed directions.
pub fn feasibility_cone(w: Vec2, airspeed: f64) -> f64 {
    let w_star = w.norm();
    if w_star >= airspeed {
        (airspeed / w_star).asin()
    } else {
        PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindTriangle {
    pub l1e: UnitVec2,
    /// Angle between `−ŵ` and `L̂₁ₑ`; `None` in zero wind.
    pub y: Option<f64>,
    /// Angle between `ŵ` and `L̂₀`; `None` in zero wind.
    pub lambda_e: Option<f64>,
}

/// Heading `L̂₁ₑ` whose ground velocity `w + v L̂₁ₑ` points along `L̂₀`.
pub fn solve_l1e(l0: UnitVec2, w: Vec2, airspeed: f64) -> Result<WindTriangle, GuidanceError> {
    let Some(w_hat) = w.normalize() else {
        return Ok(WindTriangle {
            l1e: l0,
            y: None,
            lambda_e: None,
        });
    };
    let w_star = w.norm();
    let lambda_e = angle_between(w_hat, l0);
    let ratio = w_star * lambda_e.sin() / airspeed;
    // rounding at the cone edge may push the ratio a hair past one
    if ratio > 1.0 + 1e-9 {
        return Err(GuidanceError::Infeasible { ratio });
    }
    // faster wind with L̂₀ upwind: the only root flies backwards along L̂₀
    if w_star > airspeed && lambda_e > FRAC_PI_2 {
        return Err(GuidanceError::Infeasible { ratio });
    }
    let y = PI - lambda_e - ratio.min(1.0).asin();
    let l1e = (-w_hat).rotate(-side(w_hat, l0) * y);
    Ok(WindTriangle {
        l1e,
        y: Some(y),
        lambda_e: Some(lambda_e),
    })
}

/// `s = sign((ŵ × L̂₀)·k)`, taking `+1` when the two are collinear.
fn side(w_hat: UnitVec2, l0: UnitVec2) -> f64 {
    if w_hat.cross(l0) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Extra ground-speed centripetal acceleration requested by the gap
/// between `L̂₀` and `L̂`: `k ‖v_G‖² ‖(L̂₀ × L̂) × L̂₀‖`.
pub fn residual_accel_norm(l0: UnitVec2, l: UnitVec2, v_g: Vec2, params: &GuidanceParams) -> f64 {
    params.k * v_g.norm_squared() * l0.cross(l).abs()
}

/// Shifting angle applied to `k L̂₁ₑ` in slow wind (and, scaled, inside
/// the cone). Positive curvature (a left-turning path) yields a
/// counterclockwise rotation.
#[allow(clippy::too_many_arguments)]
pub fn theta_s(
    l0: UnitVec2,
    l: UnitVec2,
    v_g: Vec2,
    w: Vec2,
    airspeed: f64,
    kappa: f64,
    params: &GuidanceParams,
) -> f64 {
    let sign = sign0(kappa);
    if sign == 0.0 {
        return 0.0;
    }
    let residual = v_g.norm() * l0.cross(l).abs() / airspeed;
    if residual == 0.0 {
        return 0.0;
    }
    let gain = match w.normalize() {
        None => 1.0,
        Some(w_hat) => {
            let w_star = w.norm();
            let lambda_e = angle_between(w_hat, l0);
            let radicand = airspeed * airspeed - (w_star * lambda_e.sin()).powi(2);
            if radicand < params.eps_singularity * airspeed * airspeed {
                f64::INFINITY
            } else {
                1.0 + w_star * lambda_e.cos() / radicand.sqrt()
            }
        }
    };
    sign * (residual * gain).clamp(-1.0, 1.0).asin()
}

/// Shifting angle inside the cone: equals `θ_s` at `w⋆ = v⋆` and vanishes
/// at the cone edge.
pub fn theta_s2(theta_s: f64, lambda_e: f64, w_star: f64, airspeed: f64, eps: f64) -> f64 {
    let cos = lambda_e.cos();
    if cos < eps {
        return 0.0;
    }
    let r = w_star * lambda_e.sin() / airspeed;
    (1.0 - r * r).max(0.0).sqrt() / cos * theta_s
}

/// `y = f(ν)`: angle between `−ŵ` and the command outside the cone, for
/// `ν ∈ [0, π − β]`.
pub fn infeasible_mapping(nu: f64, beta: f64) -> f64 {
    let c = beta.cos();
    let denom = (1.0 + c * c + 2.0 * c * nu.cos()).max(0.0).sqrt();
    if denom < 1e-15 {
        return FRAC_PI_2 - beta;
    }
    clamp_unit(nu.sin() * c / denom).asin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfeasibilityIndices {
    pub alpha_out: f64,
    pub sigma_safe: f64,
}

/// Infeasibility parameter `α_out` and safety function `σ_safe`.
pub fn infeasibility_indices(lambda: f64, beta: f64, y: f64, eps: f64) -> Result<InfeasibilityIndices, GuidanceError> {
    let half_gap = FRAC_PI_2 - beta;
    if half_gap.abs() < eps {
        return Err(GuidanceError::DegenerateCone);
    }
    Ok(InfeasibilityIndices {
        alpha_out: ((lambda - beta) / (PI - beta)).clamp(0.0, 1.0),
        sigma_safe: ((half_gap - y) / half_gap).clamp(0.0, 1.0),
    })
}

/// `σ_safe` as an explicit function of `α_out`.
pub fn incremental_safety(alpha_out: f64, beta: f64) -> f64 {
    let nu = (PI - beta) * (1.0 - alpha_out);
    let c = beta.cos();
    let y = clamp_unit(nu.sin() * c / (1.0 + c * c + 2.0 * c * nu.cos()).sqrt()).asin();
    (beta - FRAC_PI_2 + y) / (beta - FRAC_PI_2)
}

/// Quantities shared by every regime at one state.
struct Context {
    v_m: Vec2,
    v_g: Vec2,
    w: Vec2,
    w_star: f64,
    w_hat: Option<UnitVec2>,
    airspeed: f64,
    kappa: f64,
    l0: UnitVec2,
    la: LookAhead,
    beta: f64,
    lambda: Option<f64>,
}

impl Context {
    fn new(state: &VehicleState, fp: &Footprint, w: Vec2, params: &GuidanceParams) -> Result<Self, GuidanceError> {
        let frame = &fp.frame;
        let d = shifted_distance(fp.error, frame, params)?;
        let la = lookahead(d, frame.tangent, params, frame.curvature)?;
        let l0 = lookahead_l0(fp.error, frame.tangent, params);
        let v_m = state.heading * state.airspeed;
        let w_hat = w.normalize();
        Ok(Context {
            v_m,
            v_g: v_m + w,
            w,
            w_star: w.norm(),
            w_hat,
            airspeed: state.airspeed,
            kappa: frame.curvature,
            l0,
            la,
            beta: feasibility_cone(w, state.airspeed),
            lambda: w_hat.map(|wh| angle_between(wh, l0)),
        })
    }

    fn is_slow(&self, params: &GuidanceParams) -> bool {
        self.w_star <= self.airspeed + params.eps_speed
    }

    fn regime(&self, params: &GuidanceParams) -> Regime {
        if self.is_slow(params) {
            Regime::Slow
        } else if self.lambda.unwrap_or(0.0) <= self.beta {
            Regime::FastFeasible
        } else {
            Regime::FastInfeasible
        }
    }

    fn theta_s(&self, params: &GuidanceParams) -> f64 {
        theta_s(
            self.l0,
            self.la.dir,
            self.v_g,
            self.w,
            self.airspeed,
            self.kappa,
            params,
        )
    }

    fn output(&self, regime: Regime, u: Vec2) -> GuidanceOutput {
        GuidanceOutput {
            u,
            accel: triple_product_dir(self.v_m, u),
            diagnostics: GuidanceDiagnostics {
                regime,
                beta: self.beta,
                lambda: self.lambda,
                lambda_e: self.lambda,
                y: None,
                nu: self.lambda.map(|l| PI - l),
                theta_l: self.la.theta_l,
                d_shift: self.la.d_shift,
                theta_s: None,
                theta_s2: None,
                alpha_out: None,
                sigma_safe: None,
                l0: self.l0,
                l: self.la.dir,
                l1e: None,
            },
        }
    }

    fn slow(&self, params: &GuidanceParams) -> Result<GuidanceOutput, GuidanceError> {
        let tri = match solve_l1e(self.l0, self.w, self.airspeed) {
            // only reachable when eps_speed admits winds a little faster
            // than the vehicle: hold the nose into the wind
            Err(GuidanceError::Infeasible { .. }) => WindTriangle {
                l1e: -self.w_hat.expect("infeasible implies wind"),
                y: Some(0.0),
                lambda_e: self.lambda,
            },
            other => other?,
        };
        let th = self.theta_s(params);
        let u = rot(tri.l1e * params.k, th);
        let mut out = self.output(Regime::Slow, u);
        out.diagnostics.y = tri.y;
        out.diagnostics.theta_s = Some(th);
        out.diagnostics.l1e = Some(tri.l1e);
        Ok(out)
    }

    fn fast_feasible(&self, params: &GuidanceParams) -> Result<GuidanceOutput, GuidanceError> {
        let tri = solve_l1e(self.l0, self.w, self.airspeed)?;
        let lambda_e = tri.lambda_e.expect("fast regime has nonzero wind");
        let th = self.theta_s(params);
        let th2 = theta_s2(th, lambda_e, self.w_star, self.airspeed, params.eps_singularity);
        let u = rot(tri.l1e * params.k, th2);
        let mut out = self.output(Regime::FastFeasible, u);
        out.diagnostics.y = tri.y;
        out.diagnostics.theta_s = Some(th);
        out.diagnostics.theta_s2 = Some(th2);
        out.diagnostics.l1e = Some(tri.l1e);
        Ok(out)
    }

    fn fast_infeasible(&self, params: &GuidanceParams) -> Result<GuidanceOutput, GuidanceError> {
        let w_hat = self.w_hat.expect("fast regime has nonzero wind");
        let lambda = self.lambda.expect("fast regime has nonzero wind");
        let a = (self.w_star * self.w_star - self.airspeed * self.airspeed)
            .max(0.0)
            .sqrt();
        // ‖a L̂₀ − w‖ ≥ w⋆ − a > 0 whenever w⋆ > v⋆
        let dir = (self.l0 * a - self.w).normalize().unwrap_or(-w_hat);
        let u = dir * params.k;
        let nu = PI - lambda;
        let y = infeasible_mapping(nu, self.beta);
        let idx = infeasibility_indices(lambda, self.beta, y, params.eps_singularity).unwrap_or(InfeasibilityIndices {
            alpha_out: ((lambda - self.beta) / (PI - self.beta)).clamp(0.0, 1.0),
            sigma_safe: 1.0,
        });
        let mut out = self.output(Regime::FastInfeasible, u);
        out.diagnostics.y = Some(y);
        out.diagnostics.alpha_out = Some(idx.alpha_out);
        out.diagnostics.sigma_safe = Some(idx.sigma_safe);
        Ok(out)
    }
}

/// `u_slow = rot(k L̂₁ₑ, θ_s)`. Requires `w⋆ ≤ v⋆`.
pub fn u_slow(
    state: &VehicleState,
    fp: &Footprint,
    w: Vec2,
    params: &GuidanceParams,
) -> Result<GuidanceOutput, GuidanceError> {
    let ctx = Context::new(state, fp, w, params)?;
    if !ctx.is_slow(params) {
        return Err(GuidanceError::RegimeMismatch("u_slow"));
    }
    ctx.slow(params)
}

/// `u_fast,1 = rot(k L̂₁ₑ, θ_s2)`. Requires `w⋆ > v⋆` and `L̂₀` inside the cone.
pub fn u_fast1(
    state: &VehicleState,
    fp: &Footprint,
    w: Vec2,
    params: &GuidanceParams,
) -> Result<GuidanceOutput, GuidanceError> {
    let ctx = Context::new(state, fp, w, params)?;
    if ctx.is_slow(params) {
        return Err(GuidanceError::RegimeMismatch("u_fast1"));
    }
    ctx.fast_feasible(params)
}

/// `u_fast,2 = k (a L̂₀ − w)/‖a L̂₀ − w‖` with `a = √(w⋆² − v⋆²)`.
/// Requires `w⋆ > v⋆`.
pub fn u_fast2(
    state: &VehicleState,
    fp: &Footprint,
    w: Vec2,
    params: &GuidanceParams,
) -> Result<GuidanceOutput, GuidanceError> {
    let ctx = Context::new(state, fp, w, params)?;
    if ctx.is_slow(params) {
        return Err(GuidanceError::RegimeMismatch("u_fast2"));
    }
    ctx.fast_infeasible(params)
}

/// Full law for a known footprint: picks the regime and evaluates it.
pub fn guidance_from_footprint(
    state: &VehicleState,
    fp: &Footprint,
    w: Vec2,
    params: &GuidanceParams,
) -> Result<GuidanceOutput, GuidanceError> {
    let ctx = Context::new(state, fp, w, params)?;
    match ctx.regime(params) {
        Regime::Slow => ctx.slow(params),
        Regime::FastFeasible => ctx.fast_feasible(params),
        Regime::FastInfeasible => ctx.fast_infeasible(params),
    }
}

/// Projects the vehicle on `path` and evaluates the full law.
pub fn guidance_step(
    state: &VehicleState,
    path: &PathModel,
    w: Vec2,
    params: &GuidanceParams,
) -> Result<GuidanceOutput, GuidanceError> {
    let fp = path.project(state.position)?;
    guidance_from_footprint(state, &fp, w, params)
}
