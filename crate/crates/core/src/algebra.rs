//! Three-vector algebra over Euclidean space and Lorentz-Minkowski space.
//!
//! Vectors carry no signature of their own; every metric-dependent operation
//! takes a [`Metric`]. The Lorentzian form is `dx² + dy² − dz²`, so the third
//! coordinate is the time axis. Orientation is right-handed in both
//! signatures: `triple(e1, e2, e3) = +1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used by [`causal_character_tol`] when no other is given.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("vector component is not finite: ({0}, {1}, {2})")]
    NonFinite(f64, f64, f64),
    #[error("vector is not timelike: {0}")]
    NotTimelike(Vec3),
    #[error("timelike vectors lie in different timelike cones")]
    DifferentCones,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    /// Unchecked constructor for arithmetic on values already known finite.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, AlgebraError> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Vec3 { x, y, z })
        } else {
            Err(AlgebraError::NonFinite(x, y, z))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Plain coordinate dot product (ignores any metric).
    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Coordinate cross product (the Euclidean one).
    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Euclidean length of the coordinate vector.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.x / k, self.y / k, self.z / k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Lorentzian,
}

impl Metric {
    pub fn inner(self, u: &Vec3, v: &Vec3) -> f64 {
        inner(self, u, v)
    }

    pub fn cross(self, u: &Vec3, v: &Vec3) -> Vec3 {
        cross(self, u, v)
    }

    /// `sqrt(|<v, v>|)` in this metric.
    pub fn norm(self, v: &Vec3) -> f64 {
        inner(self, v, v).abs().sqrt()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => f.write_str("euclidean"),
            Metric::Lorentzian => f.write_str("lorentzian"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

pub fn inner(m: Metric, u: &Vec3, v: &Vec3) -> f64 {
    match m {
        Metric::Euclidean => u.x * v.x + u.y * v.y + u.z * v.z,
        Metric::Lorentzian => u.x * v.x + u.y * v.y - u.z * v.z,
    }
}

/// The vector `c` with `inner(m, c, w) = triple(u, v, w)` for every `w`.
///
/// In the Lorentzian case this is the coordinate cross product with its time
/// component negated.
pub fn cross(m: Metric, u: &Vec3, v: &Vec3) -> Vec3 {
    let c = u.cross(v);
    match m {
        Metric::Euclidean => c,
        Metric::Lorentzian => Vec3::new(c.x, c.y, -c.z),
    }
}

/// `det[u; v; w]`, independent of the metric.
pub fn triple(u: &Vec3, v: &Vec3, w: &Vec3) -> f64 {
    u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x)
}

/// Exact classification; the zero vector is spacelike.
pub fn causal_character(v: &Vec3) -> CausalCharacter {
    let q = inner(Metric::Lorentzian, v, v);
    if q > 0.0 || *v == Vec3::ZERO {
        CausalCharacter::Spacelike
    } else if q < 0.0 {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}

/// Classification for computed vectors: lightlike when
/// `|<v, v>_L| <= eps * |v|_inf²` and `v` is not exactly zero.
pub fn causal_character_tol(v: &Vec3, eps: f64) -> CausalCharacter {
    if *v == Vec3::ZERO {
        return CausalCharacter::Spacelike;
    }
    let q = inner(Metric::Lorentzian, v, v);
    let scale = v.norm_inf();
    if q.abs() <= eps * scale * scale {
        CausalCharacter::Lightlike
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

fn require_timelike(v: &Vec3) -> Result<(), AlgebraError> {
    match causal_character(v) {
        CausalCharacter::Timelike => Ok(()),
        _ => Err(AlgebraError::NotTimelike(*v)),
    }
}

pub fn same_timelike_cone(u: &Vec3, v: &Vec3) -> Result<bool, AlgebraError> {
    require_timelike(u)?;
    require_timelike(v)?;
    Ok(inner(Metric::Lorentzian, u, v) < 0.0)
}

/// Hyperbolic angle `θ >= 0` with `<u, v>_L = −|u|_L |v|_L cosh θ`.
pub fn hyperbolic_angle(u: &Vec3, v: &Vec3) -> Result<f64, AlgebraError> {
    if !same_timelike_cone(u, v)? {
        return Err(AlgebraError::DifferentCones);
    }
    let l = Metric::Lorentzian;
    let c = -inner(l, u, v) / (l.norm(u) * l.norm(v));
    // reverse Cauchy-Schwarz gives c >= 1; rounding can land just below
    Ok(c.max(1.0).acosh())
}
