//! Planar vector algebra.
//!
//! Everything lives in the horizontal (i, j) plane. Cross products are
//! returned as their scalar component along the vertical axis k, and
//! rotations are counterclockwise about +k.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from +i.
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(c, s)
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// k-component of `self × other`.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise quarter turn, `k × self`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Direction of `self`, or `None` for a (numerically) zero vector.
    pub fn normalize(self) -> Option<UnitVec2> {
        UnitVec2::new(self)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A direction in the plane. Always renormalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 2]")]
pub struct UnitVec2(Vec2);

impl UnitVec2 {
    pub const I: UnitVec2 = UnitVec2(Vec2 { x: 1.0, y: 0.0 });
    pub const J: UnitVec2 = UnitVec2(Vec2 { x: 0.0, y: 1.0 });

    /// Normalizes `v`. Returns `None` when `v` is not finite or too short
    /// to carry a direction.
    pub fn new(v: Vec2) -> Option<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return None;
        }
        let u = v / n;
        // One more pass brings |‖u‖ − 1| down to an ulp or two.
        Some(UnitVec2(u / u.norm()))
    }

    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        UnitVec2(Vec2::from_angle(angle))
    }

    #[inline]
    pub fn vec(self) -> Vec2 {
        self.0
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.0.angle()
    }

    #[inline]
    pub fn dot(self, o: UnitVec2) -> f64 {
        self.0.dot(o.0)
    }

    #[inline]
    pub fn cross(self, o: UnitVec2) -> f64 {
        self.0.cross(o.0)
    }

    #[inline]
    pub fn perp(self) -> UnitVec2 {
        UnitVec2(self.0.perp())
    }

    #[inline]
    pub fn rotate(self, theta: f64) -> UnitVec2 {
        UnitVec2(rot(self.0, theta))
    }
}

impl Neg for UnitVec2 {
    type Output = UnitVec2;
    #[inline]
    fn neg(self) -> UnitVec2 {
        UnitVec2(-self.0)
    }
}

impl Mul<f64> for UnitVec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        self.0 * s
    }
}

impl Mul<UnitVec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, u: UnitVec2) -> Vec2 {
        u.0 * self
    }
}

impl From<UnitVec2> for Vec2 {
    fn from(u: UnitVec2) -> Vec2 {
        u.0
    }
}

impl From<UnitVec2> for [f64; 2] {
    fn from(u: UnitVec2) -> Self {
        u.0.into()
    }
}

impl<'de> Deserialize<'de> for UnitVec2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec2::deserialize(d)?;
        UnitVec2::new(v).ok_or_else(|| serde::de::Error::custom("direction must be a nonzero finite vector"))
    }
}

/// Rotates `a` counterclockwise by `theta` about the vertical axis.
#[inline]
pub fn rot(a: Vec2, theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(c * a.x - s * a.y, s * a.x + c * a.y)
}

/// `(a × b)·k`.
#[inline]
pub fn cross_k(a: Vec2, b: Vec2) -> f64 {
    a.cross(b)
}

/// Unsigned angle between two directions, in `[0, π]`.
#[inline]
pub fn angle_between(a: UnitVec2, b: UnitVec2) -> f64 {
    clamp_unit(a.dot(b)).acos()
}

/// Signed angle that rotates `a` onto `b`, in `(−π, π]`.
#[inline]
pub fn signed_angle(a: UnitVec2, b: UnitVec2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

/// `(v × u) × v`: the part of `u` orthogonal to `v`, scaled by ‖v‖².
#[inline]
pub fn triple_product_dir(v: Vec2, u: Vec2) -> Vec2 {
    v.perp() * cross_k(v, u)
}

#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Wraps an angle into `[−π, π]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let a = (angle + PI).rem_euclid(2.0 * PI) - PI;
    if a == -PI && angle > 0.0 {
        PI
    } else {
        a
    }
}
