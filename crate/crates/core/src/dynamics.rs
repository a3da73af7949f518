//! Quantized field energy between moving boundaries and the driven
//! two-plate system.
//!
//! Mode wave numbers are `k_i = n_i π / L_i`. The two plates obey
//! `R̈ = M Ṙ + ξ(t)` with a constant 2×2 coupling matrix `M`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::force::PhysicalConstants;
use crate::geometry::Vec3;
use crate::math::{abs, cos, exp, sin, sqrt};
use crate::quadrature::{composite_gauss, gauss_legendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldQuantization {
    /// Photon occupation n_s.
    pub occupation: u32,
    /// Polarization degrees of freedom (2 for electromagnetic waves).
    pub polarization_dof: u32,
    pub mode_numbers: [u32; 3],
    pub lengths: [f64; 3],
    pub mode_cutoff: u32,
}

impl FieldQuantization {
    /// One axis of length `length` carrying mode `n`.
    pub fn one_dimensional(n: u32, length: f64, occupation: u32, polarization_dof: u32) -> Self {
        FieldQuantization {
            occupation,
            polarization_dof,
            mode_numbers: [n, 0, 0],
            lengths: [length, 1.0, 1.0],
            mode_cutoff: n.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &l in &self.lengths {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::NonPositive { what: "length", value: l });
            }
        }
        if self.polarization_dof == 0 {
            return Err(Error::NonPositive { what: "polarization_dof", value: 0.0 });
        }
        if self.mode_cutoff == 0 {
            return Err(Error::NonPositive { what: "mode_cutoff", value: 0.0 });
        }
        Ok(())
    }

    /// `f_i = π / L_i`, the wave number per mode index.
    pub fn base_wave_numbers(&self) -> [f64; 3] {
        [PI / self.lengths[0], PI / self.lengths[1], PI / self.lengths[2]]
    }

    pub fn wave_numbers(&self) -> Vec3 {
        let f = self.base_wave_numbers();
        Vec3::new(
            f64::from(self.mode_numbers[0]) * f[0],
            f64::from(self.mode_numbers[1]) * f[1],
            f64::from(self.mode_numbers[2]) * f[2],
        )
    }

    /// `(n_s + ½) ħ c Θ`.
    pub fn energy_prefactor(&self, k: &PhysicalConstants) -> f64 {
        (f64::from(self.occupation) + 0.5) * k.hbar * k.c * f64::from(self.polarization_dof)
    }

    /// `∂f_i/∂L_i = −π/L_i²`.
    pub fn boundary_derivatives(&self) -> [f64; 3] {
        let d = |l: f64| -PI / (l * l);
        [d(self.lengths[0]), d(self.lengths[1]), d(self.lengths[2])]
    }
}

/// Energy of the single mode selected by `mode_numbers`.
pub fn mode_energy(q: &FieldQuantization, k: &PhysicalConstants) -> Result<f64> {
    q.validate()?;
    Ok(q.energy_prefactor(k) * q.wave_numbers().norm())
}

/// Energy of all modes with every index in `0..=mode_cutoff`.
pub fn energy_bounded(q: &FieldQuantization, k: &PhysicalConstants) -> Result<f64> {
    q.validate()?;
    let f = q.base_wave_numbers();
    let mut total = 0.0;
    for n1 in 0..=q.mode_cutoff {
        for n2 in 0..=q.mode_cutoff {
            for n3 in 0..=q.mode_cutoff {
                let v = Vec3::new(f64::from(n1) * f[0], f64::from(n2) * f[1], f64::from(n3) * f[2]);
                total += v.norm();
            }
        }
    }
    Ok(q.energy_prefactor(k) * total)
}

/// Free-space counterpart: `∫∫∫ |k| d³k` over `[0, k_cutoff]³`, divided by
/// `f₁f₂f₃`, by a 64-point Gauss–Legendre rule on each axis.
pub fn energy_free(q: &FieldQuantization, k_cutoff: f64, k: &PhysicalConstants) -> Result<f64> {
    q.validate()?;
    if !(k_cutoff > 0.0 && k_cutoff.is_finite()) {
        return Err(Error::NonPositive { what: "k_cutoff", value: k_cutoff });
    }
    let rule: Vec<(f64, f64)> =
        gauss_legendre(64).into_iter().map(|(x, w)| (0.5 * k_cutoff * (x + 1.0), 0.5 * k_cutoff * w)).collect();
    let mut total = 0.0;
    for &(x, wx) in &rule {
        let mut plane = 0.0;
        for &(y, wy) in &rule {
            let mut line = 0.0;
            for &(z, wz) in &rule {
                line += wz * sqrt(x * x + y * y + z * z);
            }
            plane += wy * line;
        }
        total += wx * plane;
    }
    if !total.is_finite() {
        return Err(Error::NoConvergence { what: "free-space quadrature", change: f64::INFINITY });
    }
    let f = q.base_wave_numbers();
    Ok(q.energy_prefactor(k) * total / (f[0] * f[1] * f[2]))
}

/// First and second wave-number derivatives of the single-mode energy
/// `H = (n_s+½)ħcΘ |k|`.
pub fn energy_derivatives(q: &FieldQuantization, k: &PhysicalConstants) -> ([f64; 3], [[f64; 3]; 3]) {
    let a = q.energy_prefactor(k);
    let kv = q.wave_numbers();
    let kk = kv.to_array();
    let n = kv.norm();
    let mut g = [0.0; 3];
    let mut h = [[0.0; 3]; 3];
    if n == 0.0 {
        return (g, h);
    }
    for i in 0..3 {
        g[i] = a * kk[i] / n;
        for j in 0..3 {
            let delta = if i == j { n * n } else { 0.0 };
            h[i][j] = a * (delta - kk[i] * kk[j]) / (n * n * n);
        }
    }
    (g, h)
}

/// The seven coefficients multiplying the terms of the 3D force along one
/// axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalCoefficients {
    pub axis: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
}

impl DynamicalCoefficients {
    /// Coefficients for axis `alpha` from the energy gradient `grad`.
    pub fn compute(q: &FieldQuantization, grad: &[f64; 3], alpha: usize, k: &PhysicalConstants) -> Result<Self> {
        let ns = f64::from(q.occupation) + 0.5;
        let b = ns * k.hbar * k.c;
        let kk = q.wave_numbers().to_array();
        let c1: f64 = grad.iter().sum();
        let mut c2 = 0.0;
        let mut c3 = 0.0;
        for i in (0..3).filter(|&i| i != alpha) {
            c2 += b * b * kk[i];
            c3 += (ns * k.hbar) * (ns * k.hbar) * kk[i] * kk[i];
        }
        let d = c1 * c1 - b * b;
        if d == 0.0 {
            return Err(Error::FormulaSingularity { what: "gradient sum equals (n_s+½)ħc" });
        }
        let nh2 = ns * ns * k.hbar * k.hbar;
        let radicand = nh2 * c2 * c2 / (d * d) + (c2 * c2 - c1 * c1 * c3) / d;
        if !(radicand > 0.0) {
            return Err(Error::CoefficientDomain { axis: alpha, radicand });
        }
        let c4 = 1.0 / sqrt(radicand);
        let c5 = c1 * c4 * (c1 * c1 * c3 - c2 * c2) / (d * d)
            - 2.0 * nh2 * c1 * c2 * c2 * c4 / (d * d * d)
            - 2.0 * ns * k.hbar * c1 * c2 / (d * d)
            - c1 * c3 * c4 / d;
        let c6 = nh2 * c2 * c4 / (d * d) + c2 * c4 / d + ns * k.hbar / d;
        let c7 = c1 * c1 * c4 / d;
        Ok(DynamicalCoefficients { axis: alpha, c1, c2, c3, c4, c5, c6, c7 })
    }
}

/// 3D dynamical force from supplied energy derivatives. Exposed so the
/// analytic derivatives can be swapped for numerical ones.
pub fn dynamical_force_from_derivatives(
    q: &FieldQuantization,
    rates: [f64; 3],
    grad: &[f64; 3],
    hess: &[[f64; 3]; 3],
    k: &PhysicalConstants,
) -> Result<Vec3> {
    let ns = f64::from(q.occupation) + 0.5;
    let kk = q.wave_numbers().to_array();
    let df = q.boundary_derivatives();
    let n: [f64; 3] = [f64::from(q.mode_numbers[0]), f64::from(q.mode_numbers[1]), f64::from(q.mode_numbers[2])];
    let mut out = [0.0; 3];
    for (alpha, slot) in out.iter_mut().enumerate() {
        let c = DynamicalCoefficients::compute(q, grad, alpha, k)?;
        let mut total = 0.0;
        for i in 0..3 {
            let off = if i == alpha { 0.0 } else { 1.0 };
            total += n[i] * df[i] * (c.c5 * hess[i][i] + off * (c.c6 - c.c7 * ns * kk[i]) * ns) * rates[i];
            for j in (0..3).filter(|&j| j != i) {
                total += c.c5 * n[j] * df[j] * hess[j][i] * rates[j];
            }
        }
        *slot = total;
    }
    Ok(Vec3::from_array(out))
}

/// Force from moving boundaries on the mode `mode_numbers`, with the rates
/// of change of the three lengths.
///
/// A mode with fewer than two nonzero wave numbers has a single constraint
/// and the 3D expression does not apply; its force is zero here and the 1D
/// form [`dynamical_force_1d`] gives the physical answer.
pub fn dynamical_force_3d(q: &FieldQuantization, rates: [f64; 3], k: &PhysicalConstants) -> Result<Vec3> {
    q.validate()?;
    if rates.iter().all(|&r| r == 0.0) {
        return Ok(Vec3::ZERO);
    }
    if q.mode_numbers.iter().filter(|&&n| n > 0).count() < 2 {
        return Ok(Vec3::ZERO);
    }
    let (g, h) = energy_derivatives(q, k);
    dynamical_force_from_derivatives(q, rates, &g, &h, k)
}

/// `(n/c)(∂f/∂L)(∂H/∂k) L̇` for a single quantized axis.
pub fn dynamical_force_1d(q: &FieldQuantization, rate: f64, k: &PhysicalConstants) -> Result<f64> {
    q.validate()?;
    Ok(coupling(q, k)? * rate)
}

/// `g = (n/c)(∂f/∂L)(∂H/∂k)` for a single quantized axis.
pub fn coupling(q: &FieldQuantization, k: &PhysicalConstants) -> Result<f64> {
    q.validate()?;
    let axes: Vec<usize> = (0..3).filter(|&i| q.mode_numbers[i] > 0).collect();
    let axis = match axes.as_slice() {
        [] => return Ok(0.0),
        [a] => *a,
        _ => return Err(Error::NonPositive { what: "1 - extra quantized axes", value: 1.0 - axes.len() as f64 }),
    };
    let n = f64::from(q.mode_numbers[axis]);
    Ok(n / k.c * q.boundary_derivatives()[axis] * q.energy_prefactor(k))
}

/// Prescribed time dependence of a drive term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Constant(f64),
    Sinusoid { amplitude: f64, omega: f64, phase: f64 },
}

impl Drive {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Drive::Constant(v) => v,
            Drive::Sinusoid { amplitude, omega, phase } => amplitude * sin(omega * t + phase),
        }
    }

    pub fn scaled(&self, s: f64) -> Drive {
        match *self {
            Drive::Constant(v) => Drive::Constant(v * s),
            Drive::Sinusoid { amplitude, omega, phase } => Drive::Sinusoid { amplitude: amplitude * s, omega, phase },
        }
    }
}

/// Signs attached to each region's coupling, per plate. Index 0, 1, 2 are
/// the left-outer, inter-plate and right-outer regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSigns {
    pub right: [f64; 3],
    pub left: [f64; 3],
}

impl Default for PlateSigns {
    fn default() -> Self {
        PlateSigns { right: [1.0; 3], left: [1.0; 3] }
    }
}

/// Positions `(R1, R2)` and velocities `(R3, R4)` of the right and left
/// plate centers of mass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlateState {
    pub positions: [f64; 2],
    pub velocities: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSystem1D {
    /// Right and left plate masses.
    pub masses: [f64; 2],
    /// η1..η4; the coupling matrix is `[[η1, η2], [η4, η3]]`.
    pub eta: [f64; 4],
    /// Drive terms for the right and left plate.
    pub drive: [Drive; 2],
    pub signs: PlateSigns,
    /// Region couplings g₁, g₂, g₃.
    pub couplings: [f64; 3],
    /// State at the start of an evolution.
    pub state: PlateState,
}

impl PlateSystem1D {
    /// A system given directly by its coupling matrix and drive.
    pub fn from_eta(eta: [f64; 4], drive: [Drive; 2], state: PlateState) -> Self {
        PlateSystem1D { masses: [1.0, 1.0], eta, drive, signs: PlateSigns::default(), couplings: [0.0; 3], state }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.eta[0], self.eta[1]], [self.eta[3], self.eta[2]]]
    }

    pub fn xi(&self, t: f64) -> [f64; 2] {
        [self.drive[0].value(t), self.drive[1].value(t)]
    }

    /// `Ṙ_η = M R_η + ξ` for the velocity pair.
    pub fn acceleration(&self, t: f64, v: [f64; 2]) -> [f64; 2] {
        let m = self.matrix();
        let xi = self.xi(t);
        [m[0][0] * v[0] + m[0][1] * v[1] + xi[0], m[1][0] * v[0] + m[1][1] * v[1] + xi[1]]
    }
}

/// Coupling matrix and drive of the plate pair from the three regions.
///
/// `driver_velocity` is the prescribed motion of the external driver acting
/// on the right plate.
pub fn plate_coefficients(
    regions: &[FieldQuantization; 3],
    masses: [f64; 2],
    signs: PlateSigns,
    driver_velocity: Drive,
    k: &PhysicalConstants,
) -> Result<PlateSystem1D> {
    for &m in &masses {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonPositive { what: "mass", value: m });
        }
    }
    let g = [coupling(&regions[0], k)?, coupling(&regions[1], k)?, coupling(&regions[2], k)?];
    let (mr, ml) = (masses[0], masses[1]);
    let (sr, sl) = (signs.right, signs.left);
    let eta =
        [(sr[1] * g[1] - sr[2] * g[2]) / mr, -sr[1] * g[1] / mr, (sl[0] * g[0] - sl[1] * g[1]) / ml, sl[1] * g[1] / ml];
    let drive = [driver_velocity.scaled(sr[2] * g[2] / mr), Drive::Constant(-sl[0] * g[0] / ml)];
    Ok(PlateSystem1D { masses, eta, drive, signs, couplings: g, state: PlateState::default() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    Real { lambda3: f64, lambda4: f64 },
    Complex { re: f64, im: f64 },
}

/// Eigenvalues `(η1+η3)/2 ± √(¼(η1−η3)² + η2η4)` of the coupling matrix.
pub fn eigenvalues(sys: &PlateSystem1D) -> Spectrum {
    let [e1, e2, e3, e4] = sys.eta;
    let mean = 0.5 * (e1 + e3);
    let half = 0.5 * (e1 - e3);
    let disc = half * half + e2 * e4;
    if disc >= 0.0 {
        let s = sqrt(disc);
        Spectrum::Real { lambda3: mean + s, lambda4: mean - s }
    } else {
        Spectrum::Complex { re: mean, im: sqrt(-disc) }
    }
}

fn real_pair(sys: &PlateSystem1D) -> Result<(f64, f64)> {
    let (l3, l4) = match eigenvalues(sys) {
        Spectrum::Real { lambda3, lambda4 } => (lambda3, lambda4),
        Spectrum::Complex { re, im } => return Err(Error::ComplexEigenvalues { re, im }),
    };
    let scale = sys.eta.iter().fold(0.0f64, |m, e| m.max(abs(*e)));
    if abs(l3 - l4) <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateEigenvalues { lambda: l3 });
    }
    if abs(l3 - sys.eta[0]) <= 1e-14 * scale {
        return Err(Error::FormulaSingularity { what: "λ3 equals η1" });
    }
    if sys.eta[1] == 0.0 {
        return Err(Error::FormulaSingularity { what: "η2 is zero" });
    }
    Ok((l3, l4))
}

/// Fundamental matrix `ψ(t, t0)` of `Ṙ_η = M R_η`, with unit normalization.
pub fn principal_matrix(t: f64, t0: f64, sys: &PlateSystem1D) -> Result<[[f64; 2]; 2]> {
    let (l3, l4) = real_pair(sys)?;
    Ok(psi(t, t0, l3, l4, sys.eta[0], sys.eta[1]))
}

fn psi(t: f64, t0: f64, l3: f64, l4: f64, e1: f64, e2: f64) -> [[f64; 2]; 2] {
    let rho = (l4 - e1) / (l3 - e1);
    let a = exp(l3 * t + l4 * t0);
    let b = exp(l4 * t + l3 * t0);
    [[rho * a - b, e2 / (l3 - e1) * (b - a)], [(l4 - e1) / e2 * (a - b), rho * b - a]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// Principal-matrix closed form only; singular cases are errors.
    ClosedForm,
    /// Closed form when it applies, otherwise the matrix exponential in
    /// its continuous `cosh`/`sinh` form.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PrincipalMatrix,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub state: PlateState,
    pub method: Method,
}

/// Fixed composite rule for the time integrals. Panels are sized so each
/// spans at most half an e-fold or half a radian of the fastest rate in the
/// system, which puts the 16-point rule at rounding level.
struct TimeQuadrature {
    rule: Vec<(f64, f64)>,
    rate: f64,
}

impl TimeQuadrature {
    fn new(sys: &PlateSystem1D) -> Self {
        let m = sys.matrix();
        let norm = (abs(m[0][0]) + abs(m[0][1])).max(abs(m[1][0]) + abs(m[1][1]));
        let omega = sys
            .drive
            .iter()
            .map(|d| match d {
                Drive::Sinusoid { omega, .. } => abs(*omega),
                Drive::Constant(_) => 0.0,
            })
            .fold(0.0, f64::max);
        TimeQuadrature { rule: gauss_legendre(16), rate: norm + omega + 1.0 }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        let panels = libm::ceil(2.0 * abs(b - a) * self.rate).max(1.0);
        if !(panels < 1e7) {
            return Err(Error::NoConvergence { what: "time quadrature", change: f64::INFINITY });
        }
        let v = composite_gauss(f, a, b, panels as usize, &self.rule);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NoConvergence { what: "time quadrature", change: f64::INFINITY })
        }
    }
}

/// Velocities and positions at `t`, starting from `sys.state` at `t0`, with
/// the coefficients frozen.
pub fn evolve_plates(sys: &PlateSystem1D, t0: f64, t: f64, mode: Propagation) -> Result<Evolution> {
    match real_pair(sys) {
        Ok((l3, l4)) => {
            let prop = ClosedForm { sys, t0, l3, l4, quad: TimeQuadrature::new(sys) };
            Ok(Evolution { state: prop.state_at(t)?, method: Method::PrincipalMatrix })
        }
        Err(e) if mode == Propagation::Auto && e.kind() == crate::error::ErrorKind::Degeneracy => {
            let prop = Exponential::new(sys, t0);
            Ok(Evolution { state: prop.state_at(t)?, method: Method::Exponential })
        }
        Err(e) => Err(e),
    }
}

trait Propagator {
    fn sys(&self) -> &PlateSystem1D;
    fn t0(&self) -> f64;
    fn quad(&self) -> &TimeQuadrature;
    /// Velocity pair at `t`.
    fn velocity(&self, t: f64) -> Result<[f64; 2]>;

    fn state_at(&self, t: f64) -> Result<PlateState> {
        let v = self.velocity(t)?;
        let s0 = self.sys().state;
        let mut pos = s0.positions;
        for (i, p) in pos.iter_mut().enumerate() {
            // Errors inside the integrand surface as NaN and are caught below.
            let f = |tau: f64| self.velocity(tau).map(|v| v[i]).unwrap_or(f64::NAN);
            *p += self.quad().integrate(&f, self.t0(), t)?;
        }
        Ok(PlateState { positions: pos, velocities: v })
    }
}

struct ClosedForm<'a> {
    sys: &'a PlateSystem1D,
    t0: f64,
    l3: f64,
    l4: f64,
    quad: TimeQuadrature,
}

impl ClosedForm<'_> {
    fn psi(&self, t: f64) -> [[f64; 2]; 2] {
        psi(t, self.t0, self.l3, self.l4, self.sys.eta[0], self.sys.eta[1])
    }

    /// `∫_{t0}^{t} ψ⁻¹(t') ξ(t') dt'`, component-wise.
    fn drive_integrals(&self, t: f64) -> Result<[f64; 2]> {
        let inv_xi = |tp: f64, row: usize| {
            let p = self.psi(tp);
            let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
            let xi = self.sys.xi(tp);
            if row == 0 {
                (p[1][1] * xi[0] - p[0][1] * xi[1]) / det
            } else {
                (p[0][0] * xi[1] - p[1][0] * xi[0]) / det
            }
        };
        if self.sys.drive.iter().all(|d| *d == Drive::Constant(0.0)) {
            return Ok([0.0; 2]);
        }
        Ok([
            self.quad.integrate(&|tp| inv_xi(tp, 0), self.t0, t)?,
            self.quad.integrate(&|tp| inv_xi(tp, 1), self.t0, t)?,
        ])
    }
}

impl Propagator for ClosedForm<'_> {
    fn sys(&self) -> &PlateSystem1D {
        self.sys
    }
    fn t0(&self) -> f64 {
        self.t0
    }
    fn quad(&self) -> &TimeQuadrature {
        &self.quad
    }
    fn velocity(&self, t: f64) -> Result<[f64; 2]> {
        // ψ(t0, t0) is a multiple of the identity and the prefactor removes
        // it; skipping the arithmetic keeps the initial state bit-exact.
        if t == self.t0 {
            return Ok(self.sys.state.velocities);
        }
        let e1 = self.sys.eta[0];
        let rho = (self.l4 - e1) / (self.l3 - e1);
        let pre = 1.0 / (rho - 1.0);
        let norm = exp((self.l3 + self.l4) * self.t0);
        let p = self.psi(t);
        let v0 = self.sys.state.velocities;
        let [i1, i2] = self.drive_integrals(t)?;
        Ok([
            pre * (p[0][0] * v0[0] + p[0][1] * v0[1]) / norm + i1 * p[0][0] + p[0][1] * i2,
            pre * (p[1][0] * v0[0] + p[1][1] * v0[1]) / norm + i1 * p[1][0] + p[1][1] * i2,
        ])
    }
}

/// `e^{M τ} = e^{sτ}[C(τ) I + S(τ)(M − sI)]` with `s` the mean eigenvalue,
/// which stays finite through repeated and complex eigenvalues.
struct Exponential<'a> {
    sys: &'a PlateSystem1D,
    t0: f64,
    mean: f64,
    q2: f64,
    quad: TimeQuadrature,
}

impl<'a> Exponential<'a> {
    fn new(sys: &'a PlateSystem1D, t0: f64) -> Self {
        let [e1, e2, e3, e4] = sys.eta;
        let half = 0.5 * (e1 - e3);
        Exponential { sys, t0, mean: 0.5 * (e1 + e3), q2: half * half + e2 * e4, quad: TimeQuadrature::new(sys) }
    }

    fn exp_m(&self, tau: f64) -> [[f64; 2]; 2] {
        let (c, s) = if self.q2 > 0.0 {
            let q = sqrt(self.q2);
            let (ep, em) = (exp(q * tau), exp(-q * tau));
            (0.5 * (ep + em), 0.5 * (ep - em) / q)
        } else if self.q2 < 0.0 {
            let w = sqrt(-self.q2);
            (cos(w * tau), sin(w * tau) / w)
        } else {
            (1.0, tau)
        };
        let m = self.sys.matrix();
        let g = exp(self.mean * tau);
        [[g * (c + s * (m[0][0] - self.mean)), g * s * m[0][1]], [g * s * m[1][0], g * (c + s * (m[1][1] - self.mean))]]
    }
}

impl Propagator for Exponential<'_> {
    fn sys(&self) -> &PlateSystem1D {
        self.sys
    }
    fn t0(&self) -> f64 {
        self.t0
    }
    fn quad(&self) -> &TimeQuadrature {
        &self.quad
    }
    fn velocity(&self, t: f64) -> Result<[f64; 2]> {
        let e = self.exp_m(t - self.t0);
        let v0 = self.sys.state.velocities;
        let mut v = [e[0][0] * v0[0] + e[0][1] * v0[1], e[1][0] * v0[0] + e[1][1] * v0[1]];
        if self.sys.drive.iter().any(|d| *d != Drive::Constant(0.0)) {
            for (i, slot) in v.iter_mut().enumerate() {
                let f = |tp: f64| {
                    let k = self.exp_m(t - tp);
                    let xi = self.sys.xi(tp);
                    k[i][0] * xi[0] + k[i][1] * xi[1]
                };
                *slot += self.quad.integrate(&f, self.t0, t)?;
            }
        }
        Ok(v)
    }
}

/// Classical fourth-order Runge–Kutta on the full state, used as the
/// reference solution.
pub fn integrate_reference(sys: &PlateSystem1D, t0: f64, t: f64, step: f64) -> Result<PlateState> {
    if !(step > 0.0) {
        return Err(Error::NonPositive { what: "step", value: step });
    }
    let f = |tt: f64, y: [f64; 4]| {
        let a = sys.acceleration(tt, [y[2], y[3]]);
        [y[2], y[3], a[0], a[1]]
    };
    let s = sys.state;
    let mut y = [s.positions[0], s.positions[1], s.velocities[0], s.velocities[1]];
    let span = t - t0;
    let steps = libm::ceil(abs(span) / step).max(1.0) as u64;
    let h = span / steps as f64;
    let mut tt = t0;
    let add = |a: [f64; 4], b: [f64; 4], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    for i in 0..steps {
        let k1 = f(tt, y);
        let k2 = f(tt + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = f(tt + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = f(tt + h, add(y, k3, h));
        for j in 0..4 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        tt = t0 + h * (i + 1) as f64;
    }
    Ok(PlateState { positions: [y[0], y[1]], velocities: [y[2], y[3]] })
}

/// Piecewise-constant coefficients: `coefficients` is re-evaluated from
/// the current state at the start of each of `steps` intervals of length
/// `dt`. Returns the state after every step.
pub fn evolve_stepped<F>(
    initial: &PlateSystem1D,
    t0: f64,
    dt: f64,
    steps: usize,
    mode: Propagation,
    mut coefficients: F,
) -> Result<Vec<PlateState>>
where
    F: FnMut(&PlateState, f64) -> Result<PlateSystem1D>,
{
    let mut out = Vec::with_capacity(steps);
    let mut state = initial.state;
    let mut t = t0;
    for _ in 0..steps {
        let mut sys = coefficients(&state, t)?;
        sys.state = state;
        state = evolve_plates(&sys, t, t + dt, mode)?.state;
        t += dt;
        out.push(state);
    }
    Ok(out)
}

/// Plate speeds right after the vacuum impact, from momentum conservation:
/// `2|H3 − H2|/(m_rp c)` and `2|H1 − H2|/(m_lp c)`.
pub fn initial_velocities(energies: [f64; 3], masses: [f64; 2], k: &PhysicalConstants) -> Result<[f64; 2]> {
    for &m in &masses {
        if !(m > 0.0) {
            return Err(Error::NonPositive { what: "mass", value: m });
        }
    }
    let [h1, h2, h3] = energies;
    Ok([2.0 * abs(h3 - h2) / (masses[0] * k.c), 2.0 * abs(h1 - h2) / (masses[1] * k.c)])
}

/// Unruh–Davies temperature `ħ|a|/(2πck)` of a plate accelerating at `a`.
pub fn unruh_temperature(acceleration: f64, wave_number: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(wave_number > 0.0) {
        return Err(Error::NonPositive { what: "wave_number", value: wave_number });
    }
    Ok(k.hbar * abs(acceleration) / (2.0 * PI * k.c * wave_number))
}
