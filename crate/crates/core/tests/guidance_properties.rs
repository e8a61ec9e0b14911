use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use windward_core::geometry::angle_between;
use windward_core::guidance::{guidance_from_footprint, lookahead_l0, solve_l1e, GuidanceOutput, Regime};
use windward_core::path::{ArcChain, Footprint, Orientation};
use windward_core::{guidance_step, presets, GuidanceParams, PathModel, UnitVec2, Vec2, VehicleState};

const V: f64 = 14.0;

fn params() -> GuidanceParams {
    presets::params()
}

fn unit() -> impl Strategy<Value = UnitVec2> {
    (0.0..2.0 * PI).prop_map(UnitVec2::from_angle)
}

fn paths() -> Vec<PathModel> {
    let racetrack = ArcChain::builder(Vec2::new(-100.0, -80.0), UnitVec2::I)
        .line(200.0)
        .arc(80.0, PI)
        .line(200.0)
        .arc(80.0, PI)
        .build(true)
        .unwrap();
    vec![
        PathModel::circle(Vec2::new(30.0, 0.0), 100.0, Orientation::Cw).unwrap(),
        PathModel::circle(Vec2::ZERO, 150.0, Orientation::Ccw).unwrap(),
        PathModel::line(Vec2::new(10.0, -20.0), UnitVec2::from_angle(0.4)),
        PathModel::ArcChain(racetrack),
        PathModel::SinglePoint(Vec2::new(5.0, 5.0)),
    ]
}

proptest! {
    #[test]
    fn command_is_bounded_and_normal(
        x in -500.0..500.0f64,
        y in -500.0..500.0f64,
        heading in unit(),
        w_star in 0.0..45.0f64,
        w_dir in unit(),
        which in 0usize..5,
    ) {
        let p = params();
        let path = &paths()[which];
        let s = VehicleState::new(Vec2::new(x, y), heading, V).unwrap();
        let Ok(out) = guidance_step(&s, path, w_dir * w_star, &p) else {
            return Ok(());
        };
        prop_assert!((out.u.norm() - p.k).abs() <= 1e-9);
        prop_assert!(out.accel.dot(s.air_velocity()).abs() <= 1e-9 * (out.accel.norm() * V).max(1e-12));
        prop_assert!(out.accel.norm() <= p.k * V * V * (1.0 + 1e-12));
        let expect = if w_star <= V {
            Regime::Slow
        } else {
            out.diagnostics.regime
        };
        prop_assert_eq!(out.diagnostics.regime, expect);
    }

    #[test]
    fn wind_triangle_round_trip(l0 in unit(), w_star in 0.0..60.0f64, w_dir in unit()) {
        let w = w_dir * w_star;
        if let Ok(tri) = solve_l1e(l0, w, V) {
            let g = (w + tri.l1e * V).normalize().unwrap();
            prop_assert!((g.vec() - l0.vec()).norm() <= 1e-9);
            if let Some(y) = tri.y {
                prop_assert!((0.0..=PI).contains(&y));
            }
        }
    }

    #[test]
    fn slow_wind_triangle_always_solves(l0 in unit(), w_star in 0.0..13.99f64, w_dir in unit()) {
        prop_assert!(solve_l1e(l0, w_dir * w_star, V).is_ok());
    }
}

struct Probe {
    state: VehicleState,
    fp: Footprint,
    w_hat: UnitVec2,
}

impl Probe {
    fn u(&self, w_star: f64) -> GuidanceOutput {
        guidance_from_footprint(&self.state, &self.fp, self.w_hat * w_star, &params()).unwrap()
    }

    /// Command jump and direction jump across `[w_star − eps, w_star + eps]`.
    fn jump(&self, w_star: f64, eps: f64) -> (f64, f64) {
        let (a, b) = (self.u(w_star - eps).u, self.u(w_star + eps).u);
        (
            (a - b).norm(),
            angle_between(a.normalize().unwrap(), b.normalize().unwrap()),
        )
    }
}

fn probes(lambda: f64) -> Vec<Probe> {
    let p = params();
    let far = PathModel::line(Vec2::new(0.0, 500.0), UnitVec2::I);
    let near = PathModel::circle(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap();
    let mut out = Vec::new();
    for (path, pos, heading) in [
        (&far, Vec2::ZERO, UnitVec2::J),
        (&near, Vec2::new(120.0, 15.0), UnitVec2::from_angle(1.2)),
        (&near, Vec2::new(85.0, -20.0), UnitVec2::from_angle(2.2)),
    ] {
        let fp = path.project(pos).unwrap();
        let l0 = lookahead_l0(fp.error, fp.frame.tangent, &p);
        for side in [1.0, -1.0] {
            out.push(Probe {
                state: VehicleState::new(pos, heading, V).unwrap(),
                fp,
                w_hat: l0.rotate(-side * lambda),
            });
        }
    }
    out
}

#[test]
fn slow_to_feasible_boundary_is_lipschitz() {
    for lambda in [0.1, 0.5, 0.9, 1.3, 1.5] {
        for pr in probes(lambda) {
            assert_eq!(pr.u(V - 1e-4).diagnostics.regime, Regime::Slow);
            assert_eq!(pr.u(V + 1e-4).diagnostics.regime, Regime::FastFeasible);
            let slopes: Vec<f64> = [1e-3, 1e-5, 1e-7].iter().map(|&e| pr.jump(V, e).0 / e).collect();
            assert!(slopes.iter().all(|c| c.is_finite()), "lambda {lambda}: {slopes:?}");
            assert!(slopes[2] <= 2.0 * slopes[1] + 1e-9, "lambda {lambda}: {slopes:?}");
        }
    }
}

#[test]
fn feasible_to_infeasible_boundary_is_continuous() {
    for w_edge in [15.0, 16.0, 20.0, 28.0] {
        let lambda = (V / w_edge).asin();
        for pr in probes(lambda) {
            assert_eq!(pr.u(w_edge - 1e-4).diagnostics.regime, Regime::FastFeasible);
            assert_eq!(pr.u(w_edge + 1e-4).diagnostics.regime, Regime::FastInfeasible);
            let jumps: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8].iter().map(|&e| pr.jump(w_edge, e).1).collect();
            assert!(jumps.windows(2).all(|w| w[1] < w[0]), "{jumps:?}");
            assert!(jumps[3] <= 1e-3, "{jumps:?}");
        }
    }
}

#[test]
fn slow_to_infeasible_boundary_is_close_when_aligned() {
    for lambda in [1.7, 2.0, 2.5, 3.0, PI] {
        for mut pr in probes(lambda) {
            let slow = pr.u(V - 1e-4);
            pr.state.heading = slow.diagnostics.l1e.unwrap();
            assert_eq!(pr.u(V + 1e-4).diagnostics.regime, Regime::FastInfeasible);
            let (_, angle) = pr.jump(V, 1e-4);
            assert!(angle <= 0.05, "lambda {lambda}: {angle}");
        }
    }
}

#[test]
fn infeasible_command_points_downwind_of_the_crosswind() {
    let p = params();
    for lambda in [1.6, 2.0, 2.6, 3.1] {
        for pr in probes(lambda) {
            for w in [14.5, 20.0, 40.0] {
                let out = guidance_from_footprint(&pr.state, &pr.fp, pr.w_hat * w, &p).unwrap();
                assert_eq!(out.diagnostics.regime, Regime::FastInfeasible);
                let y = angle_between(-pr.w_hat, out.u.normalize().unwrap());
                assert!(y <= FRAC_PI_2 + 1e-12, "y = {y}");
            }
        }
    }
}
