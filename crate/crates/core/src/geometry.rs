//! 3-vectors, spherical coordinates and pure-translation frames.
//!
//! Spherical angles use the physics convention: `theta` is measured from +z,
//! `phi` from +x toward +y. Angles are canonicalized to `theta ∈ [0, π]`,
//! `phi ∈ [0, 2π)`, with `phi = 0` on the z axis.

use core::f64::consts::{PI, TAU};
use core::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::math::{atan, atan2, cos, hypot, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Constructor that rejects NaN and infinite components.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Vec3 { x, y, z })
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm, computed with `hypot` to avoid overflow.
    #[inline]
    pub fn norm(self) -> f64 {
        hypot(hypot(self.x, self.y), self.z)
    }

    pub fn normalize(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 {
            Err(Error::ZeroVector)
        } else if !n.is_finite() {
            Err(Error::NonFinite)
        } else {
            Ok(self / n)
        }
    }

    pub fn sum(self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}
impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}
impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}
impl SubAssign for Vec3 {
    #[inline]
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}
impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}
impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}
impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}
impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}
impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if r < 0.0 {
            return Err(Error::NonPositive { what: "radius", value: r });
        }
        Ok(SphericalPoint { r, theta, phi })
    }
}

/// Direction cosines `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[inline]
pub fn unit_direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = (sin(theta), cos(theta));
    Vec3::new(st * cos(phi), st * sin(phi), ct)
}

/// ∂Λ/∂θ, the unit polar tangent.
#[inline]
pub fn d_theta(theta: f64, phi: f64) -> Vec3 {
    let ct = cos(theta);
    Vec3::new(ct * cos(phi), ct * sin(phi), -sin(theta))
}

/// ∂Λ/∂φ, which has length sinθ.
#[inline]
pub fn d_phi(theta: f64, phi: f64) -> Vec3 {
    let st = sin(theta);
    Vec3::new(-st * sin(phi), st * cos(phi), 0.0)
}

/// ∂²Λ/∂θ² = −Λ.
#[inline]
pub fn d_theta_theta(theta: f64, phi: f64) -> Vec3 {
    -unit_direction(theta, phi)
}

/// ∂²Λ/∂θ∂φ.
#[inline]
pub fn d_theta_phi(theta: f64, phi: f64) -> Vec3 {
    let ct = cos(theta);
    Vec3::new(-ct * sin(phi), ct * cos(phi), 0.0)
}

/// ∂²Λ/∂φ².
#[inline]
pub fn d_phi_phi(theta: f64, phi: f64) -> Vec3 {
    let st = sin(theta);
    Vec3::new(-st * cos(phi), -st * sin(phi), 0.0)
}

pub fn to_cartesian(p: SphericalPoint) -> Vec3 {
    unit_direction(p.theta, p.phi) * p.r
}

/// Polar and azimuthal angle of `v` with four-quadrant resolution.
pub fn quadrant_angles(v: Vec3) -> Result<(f64, f64)> {
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    if v == Vec3::ZERO {
        return Err(Error::ZeroVector);
    }
    let rho = hypot(v.x, v.y);
    let theta = atan2(rho, v.z);
    let phi = if rho == 0.0 { 0.0 } else { canonical_phi(atan2(v.y, v.x)) };
    Ok((theta, phi))
}

fn canonical_phi(phi: f64) -> f64 {
    let p = if phi < 0.0 { phi + TAU } else { phi };
    if p >= TAU {
        0.0
    } else {
        p
    }
}

pub fn to_spherical(v: Vec3) -> Result<SphericalPoint> {
    let (theta, phi) = quadrant_angles(v)?;
    Ok(SphericalPoint { r: v.norm(), theta, phi })
}

/// Position of a local frame's origin in the global frame. Rotation-free.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameTranslation {
    pub offset: Vec3,
}

impl FrameTranslation {
    pub const IDENTITY: FrameTranslation = FrameTranslation { offset: Vec3::ZERO };

    pub fn new(offset: Vec3) -> Self {
        FrameTranslation { offset }
    }

    pub fn apply(&self, local: Vec3) -> Vec3 {
        local + self.offset
    }

    pub fn invert(&self, global: Vec3) -> Vec3 {
        global - self.offset
    }
}

/// Global spherical triple of a point given in a translated local frame.
pub fn local_to_global(p: SphericalPoint, t: FrameTranslation) -> Result<SphericalPoint> {
    let g = t.apply(to_cartesian(p));
    // Radius as the root of the summed squared translated components.
    let r = sqrt(g.x * g.x + g.y * g.y + g.z * g.z);
    if r <= 1e-12 * (p.r + t.offset.norm()) {
        return Err(Error::ZeroVector);
    }
    let (theta, phi) = quadrant_angles(g)?;
    Ok(SphericalPoint { r, theta, phi })
}

/// The translated polar angle written through the component sum
/// `(X + Y)/(cos φ + sin φ)`, which is singular where that divisor vanishes.
/// Kept to cross-check [`local_to_global`]; returns `None` on the singular set.
pub fn translated_polar_angle_summed(p: SphericalPoint, t: FrameTranslation) -> Option<f64> {
    let g = t.apply(to_cartesian(p));
    let phi = atan2(g.y, g.x);
    let div = cos(phi) + sin(phi);
    if div.abs() < 1e-12 {
        return None;
    }
    if g.z == 0.0 {
        return Some(PI / 2.0);
    }
    let th = atan((g.x + g.y) / (g.z * div));
    Some(if th < 0.0 { th + PI } else { th })
}
