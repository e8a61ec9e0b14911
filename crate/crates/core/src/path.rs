//! Desired paths: closest-point projection and Frenet frames.
//!
//! Curvature is signed: positive for paths turning counterclockwise. The
//! stored normal always points towards the centre of curvature, so that
//! `dT/ds = |κ| N` holds for every variant. Straight pieces use the left
//! normal.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{UnitVec2, Vec2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("query point {0:?} is at the circle centre; the footprint is undefined")]
    DegenerateProjection(Vec2),
    #[error("vehicle sits at the path's centre of curvature (1 + κ e·N = {0:e})")]
    FrenetSingularity(f64),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("segment length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("arc sweep must be nonzero and at most 2π in magnitude, got {0}")]
    InvalidSweep(f64),
    #[error("segments {index} and {next} are not G1-continuous (gap {gap:e} m, tangent mismatch {angle:e} rad)")]
    NotG1 {
        index: usize,
        next: usize,
        gap: f64,
        angle: f64,
    },
    #[error("an arc chain needs at least one segment")]
    EmptyChain,
    #[error("non-finite path geometry")]
    NonFinite,
}

pub const G1_GAP_TOL: f64 = 1e-6;
pub const G1_ANGLE_TOL: f64 = 1e-6;
const CENTER_TOL: f64 = 1e-9;
const FRENET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub point: Vec2,
    pub tangent: UnitVec2,
    pub normal: UnitVec2,
    /// Signed curvature, 1/m.
    pub curvature: f64,
    /// Always zero for planar paths; kept so the frame reads like the 3D one.
    pub torsion: f64,
}

impl FrenetFrame {
    /// Builds a frame from a tangent and signed curvature, picking the
    /// normal on the side of the centre of curvature.
    pub fn new(point: Vec2, tangent: UnitVec2, curvature: f64) -> Self {
        let normal = if curvature >= 0.0 {
            tangent.perp()
        } else {
            -tangent.perp()
        };
        FrenetFrame {
            point,
            tangent,
            normal,
            curvature,
            torsion: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub frame: FrenetFrame,
    /// `r_P − r_M`.
    pub error: Vec2,
    /// Arc length of the footprint from the path origin.
    pub param: f64,
}

/// Arc-length rate of the footprint for a vehicle with ground velocity
/// `v_g` and error `e`.
pub fn s_dot(frame: &FrenetFrame, e: Vec2, v_g: Vec2) -> Result<f64, PathError> {
    let denom = 1.0 + frame.curvature.abs() * e.dot(frame.normal.vec());
    if denom.abs() <= FRENET_TOL {
        return Err(PathError::FrenetSingularity(denom));
    }
    Ok(v_g.dot(frame.tangent.vec()) / denom)
}

/// A straight line through `anchor` along `direction`. Infinite when
/// `length` is `None`, otherwise the segment `[0, length]` from the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub anchor: Vec2,
    pub direction: UnitVec2,
    pub length: Option<f64>,
}

impl Line {
    pub fn infinite(anchor: Vec2, direction: UnitVec2) -> Self {
        Line {
            anchor,
            direction,
            length: None,
        }
    }

    pub fn segment(start: Vec2, direction: UnitVec2, length: f64) -> Result<Self, PathError> {
        check_length(length)?;
        Ok(Line {
            anchor: start,
            direction,
            length: Some(length),
        })
    }

    fn clamp(&self, l: f64) -> f64 {
        match self.length {
            Some(len) => l.clamp(0.0, len),
            None => l,
        }
    }

    fn frame_at(&self, l: f64) -> FrenetFrame {
        FrenetFrame::new(self.anchor + self.direction * l, self.direction, 0.0)
    }

    fn project(&self, r: Vec2) -> Footprint {
        let l = self.clamp((r - self.anchor).dot(self.direction.vec()));
        footprint(self.frame_at(l), r, l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
    pub orientation: Orientation,
}

impl Circle {
    pub fn new(center: Vec2, radius: f64, orientation: Orientation) -> Result<Self, PathError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(PathError::InvalidRadius(radius));
        }
        if !center.is_finite() {
            return Err(PathError::NonFinite);
        }
        Ok(Circle {
            center,
            radius,
            orientation,
        })
    }

    pub fn curvature(&self) -> f64 {
        self.orientation.sign() / self.radius
    }

    fn frame_at_angle(&self, phi: f64) -> FrenetFrame {
        let radial = UnitVec2::from_angle(phi);
        let tangent = match self.orientation {
            Orientation::Ccw => radial.perp(),
            Orientation::Cw => -radial.perp(),
        };
        FrenetFrame {
            point: self.center + radial * self.radius,
            tangent,
            normal: -radial,
            curvature: self.curvature(),
            torsion: 0.0,
        }
    }

    fn param_of(&self, phi: f64) -> f64 {
        (self.orientation.sign() * phi).rem_euclid(TAU) * self.radius
    }

    fn point_at(&self, l: f64) -> Vec2 {
        let phi = self.orientation.sign() * l / self.radius;
        self.center + Vec2::from_angle(phi) * self.radius
    }

    fn project(&self, r: Vec2) -> Result<Footprint, PathError> {
        let rel = r - self.center;
        if rel.norm() < CENTER_TOL {
            return Err(PathError::DegenerateProjection(r));
        }
        let phi = rel.angle();
        Ok(footprint(self.frame_at_angle(phi), r, self.param_of(phi)))
    }
}

/// One G1 piece of an [`ArcChain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        start: Vec2,
        direction: UnitVec2,
        length: f64,
    },
    /// Arc of `radius` about `center`, starting at polar angle
    /// `start_angle`. Positive `sweep` runs counterclockwise.
    Arc {
        center: Vec2,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { length, .. } => length,
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn curvature(&self) -> f64 {
        match *self {
            Segment::Line { .. } => 0.0,
            Segment::Arc { radius, sweep, .. } => sweep.signum() / radius,
        }
    }

    pub fn frame_at(&self, s: f64) -> FrenetFrame {
        match *self {
            Segment::Line { start, direction, .. } => FrenetFrame::new(start + direction * s, direction, 0.0),
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let sign = sweep.signum();
                let radial = UnitVec2::from_angle(start_angle + sign * s / radius);
                FrenetFrame {
                    point: center + radial * radius,
                    tangent: if sign > 0.0 { radial.perp() } else { -radial.perp() },
                    normal: -radial,
                    curvature: sign / radius,
                    torsion: 0.0,
                }
            }
        }
    }

    pub fn start_frame(&self) -> FrenetFrame {
        self.frame_at(0.0)
    }

    pub fn end_frame(&self) -> FrenetFrame {
        self.frame_at(self.length())
    }

    /// Local arc length of the closest point to `r`.
    fn closest(&self, r: Vec2) -> f64 {
        match *self {
            Segment::Line {
                start,
                direction,
                length,
            } => (r - start).dot(direction.vec()).clamp(0.0, length),
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = r - center;
                if rel.norm() < CENTER_TOL {
                    // every point of the arc is equidistant
                    return 0.0;
                }
                let delta = (sweep.signum() * (rel.angle() - start_angle)).rem_euclid(TAU);
                if delta <= sweep.abs() {
                    delta * radius
                } else {
                    let len = self.length();
                    let d0 = (self.frame_at(0.0).point - r).norm();
                    let d1 = (self.frame_at(len).point - r).norm();
                    if d1 < d0 {
                        len
                    } else {
                        0.0
                    }
                }
            }
        }
    }
}

/// A sequence of G1-continuous line and arc segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcChain {
    segments: Vec<Segment>,
    offsets: Vec<f64>,
    closed: bool,
}

impl ArcChain {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self, PathError> {
        if segments.is_empty() {
            return Err(PathError::EmptyChain);
        }
        for seg in &segments {
            match *seg {
                Segment::Line { start, length, .. } => {
                    check_length(length)?;
                    if !start.is_finite() {
                        return Err(PathError::NonFinite);
                    }
                }
                Segment::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                } => {
                    if !(radius > 0.0 && radius.is_finite()) {
                        return Err(PathError::InvalidRadius(radius));
                    }
                    if !(sweep != 0.0 && sweep.abs() <= TAU + 1e-12) {
                        return Err(PathError::InvalidSweep(sweep));
                    }
                    if !center.is_finite() || !start_angle.is_finite() {
                        return Err(PathError::NonFinite);
                    }
                }
            }
        }
        let n = segments.len();
        let pairs = if closed { n } else { n - 1 };
        for i in 0..pairs {
            let next = (i + 1) % n;
            let a = segments[i].end_frame();
            let b = segments[next].start_frame();
            let gap = (a.point - b.point).norm();
            let angle = crate::geometry::angle_between(a.tangent, b.tangent);
            if gap > G1_GAP_TOL || angle > G1_ANGLE_TOL {
                return Err(PathError::NotG1 {
                    index: i,
                    next,
                    gap,
                    angle,
                });
            }
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0.0;
        for seg in &segments {
            offsets.push(acc);
            acc += seg.length();
        }
        Ok(ArcChain {
            segments,
            offsets,
            closed,
        })
    }

    pub fn builder(start: Vec2, heading: UnitVec2) -> ArcChainBuilder {
        ArcChainBuilder {
            position: start,
            heading,
            segments: Vec::new(),
            error: None,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        self.offsets.last().copied().unwrap_or(0.0) + self.segments.last().map_or(0.0, Segment::length)
    }

    fn locate(&self, l: f64) -> (usize, f64) {
        let l = if self.closed {
            l.rem_euclid(self.length())
        } else {
            l.clamp(0.0, self.length())
        };
        let idx = self.offsets.partition_point(|&o| o <= l).saturating_sub(1);
        let s = (l - self.offsets[idx]).min(self.segments[idx].length());
        (idx, s)
    }

    fn project(&self, r: Vec2) -> Footprint {
        let mut best: Option<(f64, usize, f64)> = None;
        for (i, seg) in self.segments.iter().enumerate() {
            let s = seg.closest(r);
            let dist = (seg.frame_at(s).point - r).norm();
            // strict comparison: ties go to the lowest index
            if best.is_none_or(|(d, _, _)| dist < d) {
                best = Some((dist, i, s));
            }
        }
        let (_, i, s) = best.expect("chain is never empty");
        footprint(self.segments[i].frame_at(s), r, self.offsets[i] + s)
    }
}

/// Appends segments tangent to the current end of the chain.
pub struct ArcChainBuilder {
    position: Vec2,
    heading: UnitVec2,
    segments: Vec<Segment>,
    error: Option<PathError>,
}

impl ArcChainBuilder {
    pub fn line(mut self, length: f64) -> Self {
        if let Err(e) = check_length(length) {
            self.error.get_or_insert(e);
            return self;
        }
        let seg = Segment::Line {
            start: self.position,
            direction: self.heading,
            length,
        };
        self.push(seg)
    }

    /// Arc of `radius` turning by `sweep` radians (positive = left).
    pub fn arc(mut self, radius: f64, sweep: f64) -> Self {
        if !(radius > 0.0 && radius.is_finite()) {
            self.error.get_or_insert(PathError::InvalidRadius(radius));
            return self;
        }
        if !(sweep != 0.0 && sweep.abs() <= TAU) {
            self.error.get_or_insert(PathError::InvalidSweep(sweep));
            return self;
        }
        let side = if sweep > 0.0 {
            self.heading.perp()
        } else {
            -self.heading.perp()
        };
        let center = self.position + side * radius;
        let seg = Segment::Arc {
            center,
            radius,
            start_angle: (self.position - center).angle(),
            sweep,
        };
        self.push(seg)
    }

    fn push(mut self, seg: Segment) -> Self {
        let end = seg.end_frame();
        self.position = end.point;
        self.heading = end.tangent;
        self.segments.push(seg);
        self
    }

    pub fn build(self, closed: bool) -> Result<ArcChain, PathError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        ArcChain::new(self.segments, closed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathModel {
    Line(Line),
    Circle(Circle),
    ArcChain(ArcChain),
    SinglePoint(Vec2),
}

impl PathModel {
    pub fn circle(center: Vec2, radius: f64, orientation: Orientation) -> Result<Self, PathError> {
        Circle::new(center, radius, orientation).map(PathModel::Circle)
    }

    pub fn line(anchor: Vec2, direction: UnitVec2) -> Self {
        PathModel::Line(Line::infinite(anchor, direction))
    }

    /// Closest point of the path to `r_m`, with its Frenet frame.
    pub fn project(&self, r_m: Vec2) -> Result<Footprint, PathError> {
        if !r_m.is_finite() {
            return Err(PathError::NonFinite);
        }
        match self {
            PathModel::Line(line) => Ok(line.project(r_m)),
            PathModel::Circle(c) => c.project(r_m),
            PathModel::ArcChain(chain) => Ok(chain.project(r_m)),
            PathModel::SinglePoint(p) => Ok(single_point_footprint(*p, r_m)),
        }
    }

    pub fn max_abs_curvature(&self) -> f64 {
        match self {
            PathModel::Line(_) | PathModel::SinglePoint(_) => 0.0,
            PathModel::Circle(c) => 1.0 / c.radius,
            PathModel::ArcChain(chain) => chain.segments.iter().map(|s| s.curvature().abs()).fold(0.0, f64::max),
        }
    }

    /// Whether the path has bounded extent.
    pub fn is_finite(&self) -> bool {
        match self {
            PathModel::Line(l) => l.length.is_some(),
            _ => true,
        }
    }

    /// Total arc length; `None` for infinite lines.
    pub fn length(&self) -> Option<f64> {
        match self {
            PathModel::Line(l) => l.length,
            PathModel::Circle(c) => Some(TAU * c.radius),
            PathModel::ArcChain(chain) => Some(chain.length()),
            PathModel::SinglePoint(_) => Some(0.0),
        }
    }

    /// Point at arc length `l` from the path origin. Infinite lines accept
    /// any `l`; bounded open paths clamp it.
    pub fn point_at(&self, l: f64) -> Vec2 {
        match self {
            PathModel::Line(line) => line.anchor + line.direction * line.clamp(l),
            PathModel::Circle(c) => c.point_at(l),
            PathModel::ArcChain(chain) => {
                let (i, s) = chain.locate(l);
                chain.segments[i].frame_at(s).point
            }
            PathModel::SinglePoint(p) => *p,
        }
    }
}

fn footprint(frame: FrenetFrame, r: Vec2, param: f64) -> Footprint {
    Footprint {
        error: frame.point - r,
        frame,
        param,
    }
}

/// The frame of a point path degenerates. Orient it so the error runs
/// along `−N`, which makes the look-ahead reduce to the error direction.
fn single_point_footprint(p: Vec2, r: Vec2) -> Footprint {
    let e = p - r;
    let (tangent, normal) = match e.normalize() {
        Some(e_hat) => {
            let normal = -e_hat;
            (normal.rotate(-PI / 2.0), normal)
        }
        None => (UnitVec2::I, UnitVec2::J),
    };
    Footprint {
        frame: FrenetFrame {
            point: p,
            tangent,
            normal,
            curvature: 0.0,
            torsion: 0.0,
        },
        error: e,
        param: 0.0,
    }
}

fn check_length(length: f64) -> Result<(), PathError> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(PathError::InvalidLength(length))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle_between;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn racetrack() -> ArcChain {
        ArcChain::builder(v(0.0, -50.0), UnitVec2::I)
            .line(200.0)
            .arc(50.0, PI)
            .line(200.0)
            .arc(50.0, PI)
            .build(true)
            .unwrap()
    }

    fn open_s_curve() -> ArcChain {
        ArcChain::builder(v(0.0, 0.0), UnitVec2::I)
            .line(100.0)
            .arc(80.0, FRAC_PI_2)
            .arc(60.0, -PI)
            .line(50.0)
            .build(false)
            .unwrap()
    }

    /// Dense sampling of the path: brute-force closest distance.
    fn brute_force_min(path: &PathModel, r: Vec2, extent: (f64, f64), step: f64) -> f64 {
        let n = ((extent.1 - extent.0) / step).ceil() as usize;
        (0..=n)
            .map(|i| (path.point_at(extent.0 + i as f64 * step) - r).norm())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn circle_projection_outside() {
        let path = PathModel::circle(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap();
        let fp = path.project(v(200.0, 0.0)).unwrap();
        assert!((fp.frame.point - v(100.0, 0.0)).norm() < 1e-12);
        assert!((fp.error - v(-100.0, 0.0)).norm() < 1e-12);
        assert!((fp.frame.curvature - 0.01).abs() < 1e-15);
        assert!((fp.frame.tangent.vec() - v(0.0, 1.0)).norm() < 1e-12);
        assert!((fp.frame.normal.vec() - v(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn clockwise_circle_frame() {
        let path = PathModel::circle(Vec2::ZERO, 50.0, Orientation::Cw).unwrap();
        let fp = path.project(v(0.0, 10.0)).unwrap();
        assert!((fp.frame.curvature + 0.02).abs() < 1e-15);
        assert!((fp.frame.tangent.vec() - v(1.0, 0.0)).norm() < 1e-12);
        // normal still points at the centre
        assert!((fp.frame.normal.vec() - v(0.0, -1.0)).norm() < 1e-12);
        assert!((fp.frame.normal.vec() - fp.frame.tangent.rotate(-FRAC_PI_2).vec()).norm() < 1e-12);
    }

    #[test]
    fn circle_center_is_degenerate() {
        let path = PathModel::circle(v(3.0, 4.0), 10.0, Orientation::Ccw).unwrap();
        assert!(matches!(
            path.project(v(3.0, 4.0)),
            Err(PathError::DegenerateProjection(_))
        ));
    }

    #[test]
    fn invalid_radius() {
        assert_eq!(
            Circle::new(Vec2::ZERO, 0.0, Orientation::Ccw),
            Err(PathError::InvalidRadius(0.0))
        );
    }

    #[test]
    fn line_projection() {
        let path = PathModel::line(Vec2::ZERO, UnitVec2::I);
        let fp = path.project(v(5.0, 3.0)).unwrap();
        assert_eq!(fp.frame.point, v(5.0, 0.0));
        assert_eq!(fp.error, v(0.0, -3.0));
        assert_eq!(fp.param, 5.0);
    }

    #[test]
    fn line_segment_clamps() {
        let path = PathModel::Line(Line::segment(Vec2::ZERO, UnitVec2::I, 10.0).unwrap());
        let fp = path.project(v(15.0, 2.0)).unwrap();
        assert_eq!(fp.frame.point, v(10.0, 0.0));
        assert_eq!(fp.param, 10.0);
    }

    #[test]
    fn single_point_frame() {
        let path = PathModel::SinglePoint(Vec2::ZERO);
        let fp = path.project(v(3.0, 4.0)).unwrap();
        assert_eq!(fp.frame.point, Vec2::ZERO);
        assert!((fp.error.norm() - 5.0).abs() < 1e-15);
        let e_hat = fp.error.normalize().unwrap();
        assert!((fp.frame.normal.vec() + e_hat.vec()).norm() < 1e-15);
        assert!(fp.frame.tangent.dot(e_hat).abs() < 1e-15);
        assert_eq!(fp.frame.curvature, 0.0);
    }

    #[test]
    fn s_dot_values() {
        let frame = FrenetFrame::new(Vec2::ZERO, UnitVec2::I, 0.0);
        assert!((s_dot(&frame, Vec2::ZERO, v(14.0, 0.0)).unwrap() - 14.0).abs() < 1e-15);
        assert_eq!(s_dot(&frame, v(0.0, 3.0), v(0.0, 7.0)).unwrap(), 0.0);

        // inside a R=100 circle, 50 m from the path
        let circle = Circle::new(Vec2::ZERO, 100.0, Orientation::Ccw).unwrap();
        let fp = circle.project(v(50.0, 0.0)).unwrap();
        assert!((fp.error.dot(fp.frame.normal.vec()) + 50.0).abs() < 1e-12);
        let vg = fp.frame.tangent * 10.0;
        assert!((s_dot(&fp.frame, fp.error, vg).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn s_dot_singular_at_center() {
        let circle = Circle::new(Vec2::ZERO, 100.0, Orientation::Cw).unwrap();
        let fp = circle.project(v(1e-3, 0.0)).unwrap();
        // move the query onto the centre without re-projecting
        let e = fp.frame.point;
        assert!(matches!(
            s_dot(&fp.frame, e, v(1.0, 0.0)),
            Err(PathError::FrenetSingularity(_))
        ));
    }

    #[test]
    fn builder_rejects_bad_segments() {
        let err = ArcChain::builder(Vec2::ZERO, UnitVec2::I).line(-1.0).build(false);
        assert_eq!(err, Err(PathError::InvalidLength(-1.0)));
        let err = ArcChain::builder(Vec2::ZERO, UnitVec2::I).arc(10.0, 0.0).build(false);
        assert_eq!(err, Err(PathError::InvalidSweep(0.0)));
        assert_eq!(ArcChain::new(vec![], false), Err(PathError::EmptyChain));
    }

    #[test]
    fn chain_rejects_gap() {
        let a = Segment::Line {
            start: Vec2::ZERO,
            direction: UnitVec2::I,
            length: 10.0,
        };
        let b = Segment::Line {
            start: v(10.0, 1e-3),
            direction: UnitVec2::I,
            length: 10.0,
        };
        assert!(matches!(
            ArcChain::new(vec![a, b], false),
            Err(PathError::NotG1 { index: 0, .. })
        ));
        let kinked = Segment::Line {
            start: v(10.0, 0.0),
            direction: UnitVec2::J,
            length: 10.0,
        };
        assert!(matches!(
            ArcChain::new(vec![a, kinked], false),
            Err(PathError::NotG1 { .. })
        ));
    }

    #[test]
    fn racetrack_closes_and_matches_segments() {
        let chain = racetrack();
        assert!((chain.length() - (400.0 + 100.0 * PI)).abs() < 1e-9);
        let path = PathModel::ArcChain(chain);
        // straight bottom leg
        let fp = path.project(v(80.0, -70.0)).unwrap();
        assert!((fp.frame.point - v(80.0, -50.0)).norm() < 1e-9);
        assert_eq!(fp.frame.curvature, 0.0);
        // right-hand turn-around, centre (200, 0)
        let fp = path.project(v(300.0, 0.0)).unwrap();
        assert!((fp.frame.point - v(250.0, 0.0)).norm() < 1e-9);
        assert!((fp.frame.curvature - 0.02).abs() < 1e-15);
        assert!((fp.param - (200.0 + 25.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn chain_ties_go_to_lowest_index() {
        // Two arcs of the racetrack share the centre line; a point midway
        // between both straights is equidistant to segments 0 and 2.
        let path = PathModel::ArcChain(racetrack());
        let fp = path.project(v(100.0, 0.0)).unwrap();
        assert!((fp.frame.point - v(100.0, -50.0)).norm() < 1e-9);
    }

    #[test]
    fn open_chain_clamps_at_end() {
        let chain = open_s_curve();
        let end = chain.segments().last().unwrap().end_frame();
        let path = PathModel::ArcChain(chain);
        let beyond = end.point + end.tangent * 30.0 + end.tangent.perp() * 5.0;
        let fp = path.project(beyond).unwrap();
        assert!((fp.frame.point - end.point).norm() < 1e-9);
        assert!(angle_between(fp.frame.tangent, end.tangent) < 1e-12);
    }

    #[test]
    fn frenet_relation_holds_numerically() {
        // dT/ds = |κ| N, by central differences along the chain
        let path = PathModel::ArcChain(open_s_curve());
        let h = 1e-4;
        for l in [50.0, 150.0, 200.0, 260.0, 330.0] {
            let frame = path.project(path.point_at(l)).unwrap().frame;
            let ahead = path.project(path.point_at(l + h)).unwrap().frame.tangent.vec();
            let behind = path.project(path.point_at(l - h)).unwrap().frame.tangent.vec();
            let dt = (ahead - behind) / (2.0 * h);
            let expected = frame.normal * frame.curvature.abs();
            assert!((dt - expected).norm() < 1e-6, "l={l}: {dt:?} vs {expected:?}");
        }
    }

    fn paths() -> Vec<(PathModel, (f64, f64), f64)> {
        vec![
            (
                PathModel::circle(v(10.0, -5.0), 100.0, Orientation::Ccw).unwrap(),
                (0.0, TAU * 100.0),
                100.0,
            ),
            (
                PathModel::circle(Vec2::ZERO, 40.0, Orientation::Cw).unwrap(),
                (0.0, TAU * 40.0),
                40.0,
            ),
            (PathModel::ArcChain(racetrack()), (0.0, 400.0 + 100.0 * PI), 100.0),
            (
                PathModel::ArcChain(open_s_curve()),
                (0.0, 100.0 + 40.0 * PI + 60.0 * PI + 50.0),
                100.0,
            ),
            (
                PathModel::Line(Line::segment(v(-20.0, 3.0), UnitVec2::from_angle(0.3), 150.0).unwrap()),
                (0.0, 150.0),
                100.0,
            ),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn projection_is_global_minimum(which in 0usize..5, x in -300.0f64..400.0, y in -300.0f64..300.0) {
            let (path, extent, scale) = &paths()[which];
            let r = v(x, y);
            let Ok(fp) = path.project(r) else { return Ok(()); };
            let step = 1e-3 * scale;
            let brute = brute_force_min(path, r, *extent, step);
            // sampling can only overestimate the true minimum
            prop_assert!(fp.error.norm() <= brute + 1e-9);
            prop_assert!(fp.error.norm() >= brute - step);
            prop_assert_eq!(fp.error, fp.frame.point - r);
            prop_assert!(fp.frame.tangent.dot(fp.frame.normal).abs() <= 1e-10);
            let expected_normal = if fp.frame.curvature >= 0.0 {
                fp.frame.tangent.perp()
            } else {
                -fp.frame.tangent.perp()
            };
            prop_assert!((fp.frame.normal.vec() - expected_normal.vec()).norm() <= 1e-12);
            prop_assert_eq!(fp.frame.torsion, 0.0);
        }

        #[test]
        fn circle_matches_closed_form(x in -500.0f64..500.0, y in -500.0f64..500.0, r in 1.0f64..300.0) {
            let path = PathModel::circle(Vec2::ZERO, r, Orientation::Ccw).unwrap();
            let q = v(x, y);
            prop_assume!(q.norm() > 1e-6);
            let fp = path.project(q).unwrap();
            let closed = q * (r / q.norm());
            prop_assert!((fp.frame.point - closed).norm() <= 1e-9);
            // interior projections have perpendicular error
            prop_assert!(fp.error.dot(fp.frame.tangent.vec()).abs() <= 1e-6);
        }

        #[test]
        fn line_matches_closed_form(x in -1e3f64..1e3, y in -1e3f64..1e3, a in -PI..PI) {
            let dir = UnitVec2::from_angle(a);
            let path = PathModel::line(v(1.0, 2.0), dir);
            let q = v(x, y);
            let fp = path.project(q).unwrap();
            let rel = q - v(1.0, 2.0);
            let foot = v(1.0, 2.0) + dir * rel.dot(dir.vec());
            prop_assert!((fp.frame.point - foot).norm() <= 1e-9);
            prop_assert!(fp.error.dot(dir.vec()).abs() <= 1e-6);
        }
    }
}
