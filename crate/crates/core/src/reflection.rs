//! Specular reflection inside a sphere centred at the local origin.
//!
//! Every ray stays in its plane of incidence, which contains the center, and
//! strikes the wall at a fixed angle. Successive strikes are therefore a
//! fixed rotation apart, and the Nth point has a closed form. The iterative
//! tracer here is the independent reference for it.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{quadrant_angles, unit_direction, Vec3};
use crate::math::{acos_clamped, cos, sin, sqrt};

/// Incidence angles at or beyond `π/2 − GRAZING_MARGIN` are rejected.
pub const GRAZING_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub origin: Vec3,
    /// Unit wave vector.
    pub direction: Vec3,
    pub incidence_plane_normal: Option<Vec3>,
}

impl RayState {
    /// Normalizes `direction`; the incidence plane is left unset.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(RayState { origin, direction: direction.normalize()?, incidence_plane_normal: None })
    }

    /// Same ray with its incidence plane normal filled in when defined.
    pub fn with_plane(mut self) -> Self {
        self.incidence_plane_normal = incidence_plane_normal(&self).ok();
        self
    }
}

/// Forward intersection with a sphere of `radius` about the origin.
/// Returns the ray parameter and the strike point.
pub fn first_intersection(ray: &RayState, radius: f64) -> Result<(f64, Vec3)> {
    if !(radius > 0.0) {
        return Err(Error::NonPositive { what: "radius", value: radius });
    }
    let r0 = ray.origin;
    let d = r0.norm();
    if !(d < radius) {
        return Err(Error::OriginOutsideSphere { origin_norm: d, radius });
    }
    let b = ray.direction.dot(r0);
    let disc = b * b + (radius - d) * (radius + d);
    debug_assert!(disc >= 0.0);
    let xi = -b + sqrt(disc);
    Ok((xi, r0 + ray.direction * xi))
}

/// Reflected wave vector `α⊥ (n̂×k)×n̂ − α∥ (n̂·k) n̂`.
pub fn reflect(incident: Vec3, normal: Vec3, coeff_parallel: f64, coeff_perp: f64) -> Vec3 {
    normal.cross(incident).cross(normal) * coeff_perp - normal * (normal.dot(incident) * coeff_parallel)
}

/// Angle between the wave vector and the wall normal at `surface_point`.
/// Normal incidence gives 0 and tangential incidence π/2.
pub fn incidence_angle(incident: Vec3, surface_point: Vec3) -> Result<f64> {
    let k = incident.normalize()?;
    let n = surface_point.normalize()?;
    Ok(acos_clamped(k.dot(n).abs()))
}

/// Unit normal `−(k × R0)/‖k × R0‖` of the plane of incidence.
pub fn incidence_plane_normal(ray: &RayState) -> Result<Vec3> {
    let c = ray.direction.cross(ray.origin);
    let scale = ray.origin.norm().max(1.0);
    if c.norm() <= 1e-14 * scale {
        return Err(Error::DegeneratePlane);
    }
    Ok(-c.normalize()?)
}

fn check_grazing(theta: f64) -> Result<()> {
    if theta >= FRAC_PI_2 - GRAZING_MARGIN {
        Err(Error::Grazing { incidence_angle: theta })
    } else {
        Ok(())
    }
}

/// The Nth strike point (N ≥ 1) without tracing the intermediate ones.
///
/// With `R1 = (x1, y1, z1)`, β = (N−1)(π − 2θ_inc), Γ = r² sin β and `c` the
/// unit vector along `k × R0`, the point `X` solves
/// `R1·X + (X × R1)_i = ζ_i` with `ζ_i = Γ c_i + r² cos β`. The system is
/// solved by Cramer's rule using the α-substitutions below, and the point is
/// rebuilt from its quadrant-resolved angles.
pub fn closed_form_nth_point(ray: &RayState, radius: f64, n: u32) -> Result<Vec3> {
    if n == 0 {
        return Err(Error::NonPositive { what: "reflection index", value: 0.0 });
    }
    let (_, r1) = first_intersection(ray, radius)?;
    let theta = incidence_angle(ray.direction, r1)?;
    check_grazing(theta)?;
    if n == 1 {
        return Ok(r1);
    }
    let c = match incidence_plane_normal(ray) {
        Ok(np) => -np,
        // Radial chord: the ray shuttles between two antipodes.
        Err(Error::DegeneratePlane) => return Ok(if n % 2 == 1 { r1 } else { -r1 }),
        Err(e) => return Err(e),
    };

    let r2 = radius * radius;
    let beta = f64::from(n - 1) * (PI - 2.0 * theta);
    let gamma = r2 * sin(beta);
    let base = r2 * cos(beta);
    let zeta = [gamma * c.x + base, gamma * c.y + base, gamma * c.z + base];

    let Vec3 { x: x1, y: y1, z: z1 } = r1;
    let a1 = y1 + z1;
    let a2 = z1 - y1;
    let a3 = x1 - z1;
    let a4 = z1 + x1;
    let a5 = x1 + y1;
    let a6 = y1 - x1;

    let s = x1 + y1 + z1;
    if s.abs() <= 1e-12 * radius {
        return Err(Error::SingularSystem { what: "closed-form strike point" });
    }
    let m1 = [[zeta[0], a1, a2], [zeta[1], y1, a4], [zeta[2], a6, z1]];
    let m2 = [[x1, zeta[0], a2], [a3, zeta[1], a4], [a5, zeta[2], z1]];
    let m3 = [[x1, a1, zeta[0]], [a3, y1, zeta[1]], [a5, a6, zeta[2]]];
    let denom = r2 * s;
    let nu = Vec3::new(det3(&m1) / denom, det3(&m2) / denom, det3(&m3) / denom);

    let (th, ph) = quadrant_angles(nu)?;
    Ok(unit_direction(th, ph) * radius)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionTrace {
    /// Strike points R1, R2, ...
    pub points: Vec<Vec3>,
    /// Wave vector arriving at each strike point.
    pub directions: Vec<Vec3>,
    /// Incidence angle measured at each strike.
    pub incidence_angles: Vec<f64>,
    /// Incidence angle at the first strike.
    pub incidence_angle: f64,
    /// Distance between consecutive strikes (2 r cos θ_inc if only one).
    pub chord_length: f64,
    /// Ray parameter of each leg: ξ₁ from the origin, then the chords.
    pub parameter_values: Vec<f64>,
    /// True when the trace stopped at the reflection limit rather than
    /// closing on itself.
    pub truncated: bool,
}

impl ReflectionTrace {
    /// Direction leaving the last strike point.
    pub fn outgoing(&self) -> Option<Vec3> {
        let (p, k) = (*self.points.last()?, *self.directions.last()?);
        Some(reflect(k, -p.normalize().ok()?, 1.0, 1.0))
    }
}

/// Follows a ray strike by strike with the unit-reflectivity law and the
/// inward wall normal `−R̂`.
pub fn trace_iterative(ray: &RayState, radius: f64, max_reflections: u32) -> Result<ReflectionTrace> {
    if max_reflections == 0 {
        return Err(Error::NonPositive { what: "max_reflections", value: 0.0 });
    }
    let (xi1, r1) = first_intersection(ray, radius)?;
    let theta1 = incidence_angle(ray.direction, r1)?;
    check_grazing(theta1)?;
    let radial = matches!(incidence_plane_normal(ray), Err(Error::DegeneratePlane));

    let cap = max_reflections as usize;
    let mut points = Vec::with_capacity(cap);
    let mut directions = Vec::with_capacity(cap);
    let mut angles = Vec::with_capacity(cap);
    let mut params = Vec::with_capacity(cap);
    let (mut p, mut k) = (r1, ray.direction);
    points.push(p);
    directions.push(k);
    angles.push(theta1);
    params.push(xi1);

    let mut truncated = true;
    while points.len() < cap {
        if radial && points.len() == 2 {
            truncated = false;
            break;
        }
        let normal = -p.normalize()?;
        k = reflect(k, normal, 1.0, 1.0);
        // The other root of ‖p + t k‖² = r² when ‖p‖ = r.
        let t = -2.0 * k.dot(p);
        p += k * t;
        points.push(p);
        directions.push(k);
        angles.push(incidence_angle(k, p)?);
        params.push(t);
    }
    let chord_length = if points.len() >= 2 { points[1].distance(points[0]) } else { 2.0 * radius * cos(theta1) };
    Ok(ReflectionTrace {
        points,
        directions,
        incidence_angles: angles,
        incidence_angle: theta1,
        chord_length,
        parameter_values: params,
        truncated,
    })
}
