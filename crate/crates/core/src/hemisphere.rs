//! Hemispherical cavities and the plate that may face them.
//!
//! Local hemisphere frame: center at the origin, dome on the `y ≥ 0` side,
//! opening disk of radius `r` in the plane `y = 0`. The frame sits at
//! `CavityGeometry::center` in the global frame (translation only). A ray
//! enters through the opening with a positive `y` component.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{d_phi, d_theta, d_theta_phi, d_theta_theta, unit_direction, FrameTranslation, Vec3};
use crate::math::{acos_clamped, ceil, cos, round, sin};
use crate::reflection::{
    first_intersection, incidence_angle, incidence_plane_normal, reflect, RayState, GRAZING_MARGIN,
};

/// Distance from an integer below which a reflection count is ambiguous.
pub const COUNT_BOUNDARY: f64 = 1e-9;
/// Relative spread allowed between the three re-entry scale components.
pub const REENTRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityKind {
    Sphere,
    Hemisphere,
    PlateHemisphere,
}

/// A flat, static, unbounded mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plate {
    /// Polar angle of the plate normal.
    pub theta: f64,
    /// Azimuth of the plate normal.
    pub phi: f64,
    pub center: FrameTranslation,
}

impl Plate {
    pub fn normal(&self) -> Vec3 {
        unit_direction(self.theta, self.phi)
    }

    /// In-plate unit vector along increasing polar angle of the normal.
    pub fn theta_hat(&self) -> Vec3 {
        d_theta(self.theta, self.phi)
    }

    /// In-plate unit vector along increasing azimuth of the normal.
    pub fn phi_hat(&self) -> Vec3 {
        Vec3::new(-sin(self.phi), cos(self.phi), 0.0)
    }

    /// Point with in-plate coordinates `(nu_theta, nu_phi)`.
    pub fn point(&self, nu_theta: f64, nu_phi: f64) -> Vec3 {
        self.center.offset + self.theta_hat() * nu_theta + self.phi_hat() * nu_phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub inner_radius: f64,
    pub shell_thickness: f64,
    pub center: FrameTranslation,
    pub kind: CavityKind,
    pub plate: Option<Plate>,
}

impl CavityGeometry {
    pub fn sphere(radius: f64) -> Self {
        CavityGeometry {
            inner_radius: radius,
            shell_thickness: 0.0,
            center: FrameTranslation::IDENTITY,
            kind: CavityKind::Sphere,
            plate: None,
        }
    }

    pub fn hemisphere(radius: f64) -> Self {
        CavityGeometry { kind: CavityKind::Hemisphere, ..Self::sphere(radius) }
    }

    /// Plate facing the opening, perpendicular to the symmetry axis, at
    /// distance `gap` from the hemisphere center.
    pub fn plate_hemisphere(radius: f64, gap: f64) -> Self {
        CavityGeometry {
            kind: CavityKind::PlateHemisphere,
            plate: Some(Plate {
                theta: FRAC_PI_2,
                phi: FRAC_PI_2,
                center: FrameTranslation::new(Vec3::new(0.0, -gap, 0.0)),
            }),
            ..Self::sphere(radius)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius.is_finite()) {
            return Err(Error::NonPositive { what: "inner_radius", value: self.inner_radius });
        }
        if !(self.shell_thickness >= 0.0 && self.shell_thickness.is_finite()) {
            return Err(Error::NonPositive { what: "shell_thickness", value: self.shell_thickness });
        }
        if !self.center.offset.is_finite() {
            return Err(Error::NonFinite);
        }
        match (self.kind, self.plate) {
            (CavityKind::PlateHemisphere, None) => Err(Error::MissingPlate),
            (CavityKind::PlateHemisphere, Some(p)) => {
                if p.theta.is_finite() && p.phi.is_finite() && p.center.offset.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NonFinite)
                }
            }
            (_, Some(_)) => Err(Error::MissingPlate),
            _ => Ok(()),
        }
    }

    /// Distance from the hemisphere center to the plate plane.
    pub fn plate_gap(&self) -> Option<f64> {
        let p = self.plate?;
        Some(p.normal().dot(self.center.offset - p.center.offset).abs())
    }
}

fn check_entry(ray: &RayState, r: f64) -> Result<()> {
    let o = ray.origin;
    if o.y.abs() > 1e-12 * r || !(o.norm() < r) || !(ray.direction.y > 0.0) {
        return Err(Error::NotEntering);
    }
    Ok(())
}

/// Strike count inside a hemisphere, with the continuous quantity it rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCount {
    pub count: u32,
    /// The continuous count; `None` for axial entry.
    pub z_value: Option<f64>,
    /// Set when `z_value` is within [`COUNT_BOUNDARY`] of an integer.
    pub boundary: bool,
}

struct EntryAngles {
    theta: f64,
    gamma0: f64,
}

fn entry_angles(ray: &RayState, r: f64) -> Result<EntryAngles> {
    let (xi, r1) = first_intersection(ray, r)?;
    let theta = incidence_angle(ray.direction, r1)?;
    if theta >= FRAC_PI_2 - GRAZING_MARGIN {
        return Err(Error::Grazing { incidence_angle: theta });
    }
    let d = ray.origin.norm();
    // Central angle between the entry point and the first strike.
    let gamma0 = acos_clamped(0.5 * (r / d + d / r - xi * xi / (r * d)));
    Ok(EntryAngles { theta, gamma0 })
}

/// Number of wall strikes before a ray entering the opening leaves again.
///
/// Each strike advances the central angle by `π − 2θ_inc`, starting from the
/// angle `γ₀` between the entry point and the first strike, and the ray
/// leaves once the total passes `π`. The count is the ceiling of
/// `Z = (π − γ₀)/(π − 2θ_inc)`.
pub fn max_reflections(ray: &RayState, geom: &CavityGeometry) -> Result<ReflectionCount> {
    let r = geom.inner_radius;
    check_entry(ray, r)?;
    if ray.origin.norm() <= 1e-15 * r {
        return Ok(ReflectionCount { count: 1, z_value: None, boundary: false });
    }
    let a = entry_angles(ray, r)?;
    let z = (PI - a.gamma0) / (PI - 2.0 * a.theta);
    let count = ceil(z).max(1.0);
    if count > u32::MAX as f64 {
        return Err(Error::Grazing { incidence_angle: a.theta });
    }
    Ok(ReflectionCount { count: count as u32, z_value: Some(z), boundary: (z - round(z)).abs() < COUNT_BOUNDARY })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionClass {
    SingleReflection,
    MultipleReflection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeClassification {
    pub class: ReflectionClass,
    /// Distance from the center at which the line of the second leg meets
    /// the diameter through the entry point. Infinite when parallel.
    pub exit_crossing_norm: f64,
    pub max_reflections: u32,
    pub boundary: bool,
    /// The entry ray is radial, so the incidence plane is undefined.
    pub degenerate_plane: bool,
}

/// Single versus multiple internal reflection.
///
/// The second leg runs between strike points at central angles `γ₀` and
/// `γ₀ + π − 2θ` from the entry point. Its line crosses the entry diameter at
/// distance `r sinθ / |sin(γ₀ − θ)|`, which is inside the opening exactly
/// when the second strike would fall beyond the rim.
pub fn classify_reflection(ray: &RayState, geom: &CavityGeometry) -> Result<EscapeClassification> {
    let r = geom.inner_radius;
    let count = max_reflections(ray, geom)?;
    if count.z_value.is_none() {
        return Ok(EscapeClassification {
            class: ReflectionClass::SingleReflection,
            exit_crossing_norm: 0.0,
            max_reflections: 1,
            boundary: false,
            degenerate_plane: true,
        });
    }
    let a = entry_angles(ray, r)?;
    let s = sin(a.gamma0 - a.theta).abs();
    let norm = if s == 0.0 { f64::INFINITY } else { r * sin(a.theta) / s };
    let class = if norm < r { ReflectionClass::SingleReflection } else { ReflectionClass::MultipleReflection };
    Ok(EscapeClassification {
        class,
        exit_crossing_norm: norm,
        max_reflections: count.count,
        boundary: count.boundary,
        degenerate_plane: false,
    })
}

/// A ray followed through the hemisphere until it crosses the opening plane.
/// All positions are in the local hemisphere frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HemisphereTrace {
    pub strikes: Vec<Vec3>,
    pub incidence_angle: f64,
    pub chord_length: f64,
    /// Leg parameters: first from the entry point, then the chords.
    pub parameter_values: Vec<f64>,
    /// Point where the outgoing leg crosses `y = 0`.
    pub exit_point: Vec3,
    /// Direction after the last strike.
    pub exit_direction: Vec3,
    /// Where the outgoing leg would strike the full sphere.
    pub next_sphere_point: Vec3,
}

impl HemisphereTrace {
    pub fn last_strike(&self) -> Vec3 {
        *self.strikes.last().expect("a trace has at least one strike")
    }

    /// Ray leaving the cavity, starting at the last strike.
    pub fn exit_ray(&self) -> RayState {
        RayState { origin: self.last_strike(), direction: self.exit_direction, incidence_plane_normal: None }
    }
}

/// Strike-by-strike trace of a ray entering the opening. Stops once the next
/// strike would lie below the opening plane, or after `limit` strikes.
pub fn trace_hemisphere(ray: &RayState, geom: &CavityGeometry, limit: u32) -> Result<HemisphereTrace> {
    let r = geom.inner_radius;
    check_entry(ray, r)?;
    let (xi1, r1) = first_intersection(ray, r)?;
    let theta = incidence_angle(ray.direction, r1)?;
    if theta >= FRAC_PI_2 - GRAZING_MARGIN {
        return Err(Error::Grazing { incidence_angle: theta });
    }
    let mut strikes = alloc::vec![r1];
    let mut params = alloc::vec![xi1];
    let (mut p, mut k) = (r1, ray.direction);
    loop {
        k = reflect(k, -p.normalize()?, 1.0, 1.0);
        let t = -2.0 * k.dot(p);
        let next = p + k * t;
        if next.y < 0.0 || strikes.len() as u32 >= limit {
            let exit_point = if k.y < 0.0 { p + k * (-p.y / k.y) } else { next };
            return Ok(HemisphereTrace {
                strikes,
                incidence_angle: theta,
                chord_length: 2.0 * r * cos(theta),
                parameter_values: params,
                exit_point,
                exit_direction: k,
                next_sphere_point: next,
            });
        }
        strikes.push(next);
        params.push(t);
        p = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reentry {
    Reenters,
    Escapes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateInteraction {
    /// Reflection point on the plate, global frame.
    pub plate_point: Vec3,
    /// In-plate coordinates along the polar and azimuthal tangents.
    pub plate_coords: (f64, f64),
    /// Distance travelled from the last strike to the plate.
    pub exit_parameter: f64,
    /// Direction after the plate reflection.
    pub reflected_direction: Vec3,
    pub reentry: Reentry,
    /// Per-axis parameters carrying the plate point to the candidate
    /// re-entry point along the reflected direction.
    pub scale_components: [f64; 3],
    /// The reflected line passes within tolerance of the opening rim.
    pub rim_boundary: bool,
}

/// Where the ray leaving the cavity meets the plate.
///
/// `exit_ray` is in the local hemisphere frame with its origin at the last
/// strike. The point is found from the plane equation and expressed through
/// the plate's own tangent coordinates.
pub fn plate_reflection_point(exit_ray: &RayState, geom: &CavityGeometry) -> Result<PlateInteraction> {
    let plate = geom.plate.ok_or(Error::MissingPlate)?;
    let r = geom.inner_radius;
    let n = plate.normal();
    let start = geom.center.apply(exit_ray.origin);
    let k = exit_ray.direction;
    let denom = n.dot(k);
    if denom.abs() < 1e-12 {
        return Err(Error::ParallelToPlate);
    }
    let t = n.dot(plate.center.offset - start) / denom;
    if !(t > 0.0) {
        return Err(Error::PlateBehindExit);
    }
    let hit = start + k * t;
    if geom.center.invert(hit).y > 1e-12 * r {
        return Err(Error::PlateCutsCavity);
    }
    let rel = hit - plate.center.offset;
    let coords = (rel.dot(plate.theta_hat()), rel.dot(plate.phi_hat()));
    let plate_point = plate.point(coords.0, coords.1);
    let check = reentry_check(plate_point, k, geom)?;
    Ok(PlateInteraction {
        plate_point,
        plate_coords: coords,
        exit_parameter: t,
        reflected_direction: check.reflected_direction,
        reentry: check.reentry,
        scale_components: check.scale_components,
        rim_boundary: check.rim_boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReentryCheck {
    pub reentry: Reentry,
    pub reflected_direction: Vec3,
    pub scale_components: [f64; 3],
    pub rim_boundary: bool,
}

/// Whether the ray reflected at `plate_point` passes back through the
/// opening disk.
///
/// The candidate re-entry point is where the reflected line meets the
/// opening plane, pulled back onto the closed disk if it lands outside. The
/// three per-axis parameters from the plate point to that candidate agree,
/// and are positive, exactly when the line truly pierces the disk.
pub fn reentry_check(plate_point: Vec3, exit_direction: Vec3, geom: &CavityGeometry) -> Result<ReentryCheck> {
    let plate = geom.plate.ok_or(Error::MissingPlate)?;
    let r = geom.inner_radius;
    let c = geom.center.offset;
    let kr = reflect(exit_direction, plate.normal(), 1.0, 1.0);

    let local = plate_point - c;
    let in_plane = |v: Vec3| Vec3::new(v.x, 0.0, v.z);
    let (candidate, rho) = if kr.y.abs() > 1e-14 {
        let u = in_plane(local + kr * (-local.y / kr.y));
        let rho = u.norm();
        (if rho <= r { u } else { u * (r / rho) }, rho)
    } else {
        let u = in_plane(local);
        let rho = u.norm();
        (if rho <= r { u } else { u * (r / rho) }, f64::INFINITY)
    };

    let num = c + candidate - plate_point;
    let j = (0..3).max_by(|&a, &b| kr[a].abs().total_cmp(&kr[b].abs())).unwrap_or(0);
    let common = num[j] / kr[j];
    let scale = num.norm().max(r);
    let spread = (num - kr * common).norm();
    let equal = spread <= REENTRY_TOLERANCE * scale;

    let mut comps = [0.0; 3];
    for (i, slot) in comps.iter_mut().enumerate() {
        *slot = if kr[i].abs() > 1e-12 {
            num[i] / kr[i]
        } else if num[i].abs() <= REENTRY_TOLERANCE * scale {
            common
        } else {
            f64::INFINITY.copysign(num[i])
        };
    }
    let reentry = if equal && common > 0.0 { Reentry::Reenters } else { Reentry::Escapes };
    Ok(ReentryCheck {
        reentry,
        reflected_direction: kr,
        scale_components: comps,
        rim_boundary: (rho - r).abs() <= REENTRY_TOLERANCE * r,
    })
}

/// Quantities that rebuild the plate point from sums of components, valid
/// when the plate center lies in the incidence plane so the plate point sits
/// on the line through the plate center along `in_plane_direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateCoefficients {
    /// Distance from the plate center to the would-be next sphere strike.
    pub a_zeta: f64,
    /// Distance from the plate center to the last strike.
    pub b_zeta: f64,
    /// Mixing ratio of the azimuthal and polar plate tangents.
    pub c_zeta: f64,
    /// Component sum of the outgoing chord vector.
    pub a_beta: f64,
    /// Component sum of the last strike's unit direction.
    pub b_beta: f64,
    /// Component sum of the in-plane direction.
    pub c_beta: f64,
    /// Numerator and denominator of the chord fraction reaching the plate.
    pub a_gamma: f64,
    pub c_gamma: f64,
    /// Plate direction lying in the incidence plane.
    pub in_plane_direction: Vec3,
    plate_center: Vec3,
}

impl PlateCoefficients {
    /// Fraction of the outgoing chord travelled before meeting the plate.
    pub fn chord_fraction(&self) -> f64 {
        self.a_gamma / self.c_gamma
    }

    /// Plate point rebuilt from the coefficient blocks (global frame).
    pub fn reconstruct(&self) -> Vec3 {
        let s = (self.b_zeta * self.b_beta + self.chord_fraction() * self.a_beta) / self.c_beta;
        self.plate_center + self.in_plane_direction * s
    }
}

/// Coefficient blocks for the plate point. `entry` fixes the incidence
/// plane; `last_strike` and `next_sphere_point` are local-frame positions.
pub fn plate_coefficients(
    entry: &RayState,
    last_strike: Vec3,
    next_sphere_point: Vec3,
    geom: &CavityGeometry,
) -> Result<PlateCoefficients> {
    let plate = geom.plate.ok_or(Error::MissingPlate)?;
    let c = -incidence_plane_normal(entry)?;
    let pc = plate.center.offset;
    let residual = c.dot(pc - geom.center.offset);
    if residual.abs() > 1e-10 * geom.inner_radius {
        return Err(Error::NotCoplanar { residual });
    }
    let lam = plate.normal();
    let dt = d_theta(plate.theta, plate.phi);
    let dp = d_phi(plate.theta, plate.phi);
    let den = dt.dot(lam + c);
    if den.abs() < 1e-14 {
        return Err(Error::FormulaSingularity { what: "polar tangent is normal to the incidence plane" });
    }
    let c_zeta = -dp.dot(lam + c) / den;
    let w = dp + dt * c_zeta;

    let pn = geom.center.apply(last_strike) - pc;
    let pn1 = geom.center.apply(next_sphere_point) - pc;
    let a_zeta = pn1.norm();
    let b_zeta = pn.norm();
    let (dir_n, dir_n1) = (pn / b_zeta, pn1 / a_zeta);
    let d = pn1 - pn;
    let a_beta = (dir_n1 * a_zeta - dir_n * b_zeta).sum();
    let b_beta = dir_n.sum();
    let c_beta = w.sum();
    let a_gamma = -pn.cross(w).dot(c);
    let c_gamma = d.cross(w).dot(c);
    if c_gamma.abs() < 1e-14 || c_beta.abs() < 1e-14 {
        return Err(Error::FormulaSingularity { what: "vanishing component sum" });
    }
    Ok(PlateCoefficients {
        a_zeta,
        b_zeta,
        c_zeta,
        a_beta,
        b_beta,
        c_beta,
        a_gamma,
        c_gamma,
        in_plane_direction: w,
        plate_center: pc,
    })
}

/// Motion of a plate element given by in-plate coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlateRates {
    pub translation: Vec3,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub nu_theta_dot: f64,
    pub nu_phi_dot: f64,
}

/// Velocity of the plate element at in-plate coordinates `coords`. Zero for
/// a static plate without lattice vibration.
pub fn plate_point_velocity(plate: &Plate, coords: (f64, f64), rates: &PlateRates) -> Vec3 {
    let (th, ph) = (plate.theta, plate.phi);
    let (nt, np) = coords;
    let dphi_hat_dphi = Vec3::new(-cos(ph), -sin(ph), 0.0);
    rates.translation
        + plate.theta_hat() * rates.nu_theta_dot
        + plate.phi_hat() * rates.nu_phi_dot
        + (d_theta_theta(th, ph) * rates.theta_dot + d_theta_phi(th, ph) * rates.phi_dot) * nt
        + dphi_hat_dphi * (rates.phi_dot * np)
}
