//! Momentum transfer of zero-point radiation and the resulting forces.
//!
//! A ray bouncing between two wall points a distance `L` apart carries the
//! standing modes `k_n = nπ/L`. Each reflection at incidence angle θ transfers
//! momentum `2ħk cosθ` along the wall normal. The force per direction is the
//! bounded mode sum minus the free-space continuum. Both diverge, and their
//! difference is made finite with an exponential cutoff `e^{-εn}`
//! extrapolated to ε → 0.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::hemisphere::{plate_reflection_point, trace_hemisphere, CavityGeometry, CavityKind};
use crate::math::{abs, cos, exp, sin, sqrt};
use crate::quadrature::{pairwise_sum, radical_inverse, CompensatedSum, HALTON_BASES};
use crate::reflection::{first_intersection, incidence_angle, reflect, RayState, ReflectionTrace};

/// Cutoff regularization settings: ε runs over `eps0, eps0/2, eps0/4, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    pub eps0: f64,
    pub levels: usize,
    /// Relative change between the last two extrapolated values that counts
    /// as converged.
    pub tolerance: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization { eps0: 1e-2, levels: 6, tolerance: 1e-6 }
    }
}

impl Regularization {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return Err(Error::NonPositive { what: "eps0", value: self.eps0 });
        }
        if self.levels < 3 {
            return Err(Error::NonPositive { what: "levels - 2", value: self.levels as f64 - 2.0 });
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::NonPositive { what: "tolerance", value: self.tolerance });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularized {
    pub value: f64,
    /// Relative change between the last two diagonal Richardson entries.
    pub last_change: f64,
    pub levels_used: usize,
}

/// Finite part of `Σ_{n≥1} f(n) − ∫₀^∞ f(n) dn`.
///
/// `integral(ε)` must return `∫₀^∞ f(n) e^{-εn} dn`. The cut-off difference is
/// evaluated at each ε level and Richardson-extrapolated in powers of ε.
pub fn regularize_sum_minus_integral<F, I>(f: F, integral: I, reg: &Regularization) -> Result<Regularized>
where
    F: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
{
    reg.validate()?;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(reg.levels);
    let mut eps = reg.eps0;
    let mut prev_diag = f64::NAN;
    let mut change = f64::INFINITY;
    for level in 0..reg.levels {
        let n_max = (60.0 / eps) as u64 + 1;
        let mut s = CompensatedSum::default();
        for n in 1..=n_max {
            // A running product of e^{-ε} drifts enough to spoil the
            // cancellation against the integral, so each weight is fresh.
            s.add(f(n as f64) * exp(-eps * n as f64));
        }
        let d = s.value() - integral(eps);

        let mut row = Vec::with_capacity(level + 1);
        row.push(d);
        for m in 1..=level {
            let p = (1u64 << m) as f64;
            let v = (p * row[m - 1] - table[level - 1][m - 1]) / (p - 1.0);
            row.push(v);
        }
        let diag = row[level];
        table.push(row);
        if level >= 1 {
            change = abs(diag - prev_diag) / abs(diag).max(f64::MIN_POSITIVE);
            if level >= 2 && change <= reg.tolerance {
                return Ok(Regularized { value: diag, last_change: change, levels_used: level + 1 });
            }
        }
        prev_diag = diag;
        eps *= 0.5;
    }
    Err(Error::NoConvergence { what: "cutoff extrapolation", change })
}

/// Finite part of `Σ n − ∫ n dn`; close to −1/12.
pub fn linear_mode_balance(reg: &Regularization) -> Result<f64> {
    Ok(regularize_sum_minus_integral(|n| n, |e| 1.0 / (e * e), reg)?.value)
}

/// Regularized `Σ nπ/L − (L/π)∫ k dk` for quantization length `L`.
pub fn regularized_mode_balance(length: f64, reg: &Regularization) -> Result<f64> {
    check_length(length)?;
    Ok(PI / length * linear_mode_balance(reg)?)
}

fn check_length(length: f64) -> Result<()> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { what: "quantization length", value: length })
    }
}

/// Diverging pieces of the mode balance truncated at `cutoff` modes:
/// the bounded sum and the free-space integral up to the same wave number.
pub fn raw_mode_parts(length: f64, cutoff: u64) -> (f64, f64) {
    let n = cutoff as f64;
    let sum = PI / length * n * (n + 1.0) / 2.0;
    let k_max = n * PI / length;
    let integral = length / PI * k_max * k_max / 2.0;
    (sum, integral)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { hbar: 1.0, c: 1.0 }
    }
}

/// What "per unit time" divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeNormalization {
    /// Δt = 1.
    #[default]
    Unit,
    /// Δt = L/c, the light-crossing time of the chord.
    LightCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSettings {
    pub regularization: Regularization,
    pub constants: PhysicalConstants,
    pub time: TimeNormalization,
    /// Truncation for the displayed raw parts.
    pub raw_cutoff: u64,
}

impl Default for ForceSettings {
    fn default() -> Self {
        ForceSettings {
            regularization: Regularization::default(),
            constants: PhysicalConstants::default(),
            time: TimeNormalization::Unit,
            raw_cutoff: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    pub quantization_length: f64,
    pub incidence_angle: f64,
    pub mode_cutoff: u64,
}

/// Force carried by one quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeForce {
    pub entry: Vec3,
    pub direction: Vec3,
    /// First strike point on the inner wall.
    pub strike: Vec3,
    /// Matching point on the mid-surface of the shell.
    pub surface_point: Vec3,
    pub incidence_angle: f64,
    pub quantization_length: f64,
    /// Signed force along the outward wall normal at the strike.
    pub force: f64,
    /// `−πħ cosθ / (6L)` with the same time normalization.
    pub closed_form: f64,
    /// The plate, not the cavity chord, set the quantization length.
    pub plate_limited: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceResult {
    /// Force for a single direction, or the node mean for surface totals.
    pub per_direction_force: f64,
    pub raw_sum_part: f64,
    pub integral_part: f64,
    pub regularized: bool,
    /// Mean force vector over nodes. Zero for a single direction.
    pub net_vector: Vec3,
    /// Mean radial component over nodes.
    pub mean_radial_stress: f64,
    pub nodes: Vec<NodeForce>,
    /// Nodes dropped because their ray grazed the wall.
    pub skipped: usize,
}

/// Precomputed finite part shared by many force evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceContext {
    pub settings: ForceSettings,
    pub balance: f64,
}

impl ForceContext {
    pub fn new(settings: ForceSettings) -> Result<Self> {
        Ok(ForceContext { settings, balance: linear_mode_balance(&settings.regularization)? })
    }

    fn time_factor(&self, length: f64) -> f64 {
        match self.settings.time {
            TimeNormalization::Unit => 1.0,
            TimeNormalization::LightCrossing => self.settings.constants.c / length,
        }
    }

    /// `2ħ cosθ` times the regularized balance for chord `length`.
    pub fn force(&self, length: f64, theta: f64) -> f64 {
        2.0 * self.settings.constants.hbar * cos(theta) * (PI / length) * self.balance * self.time_factor(length)
    }

    pub fn closed_form(&self, length: f64, theta: f64) -> f64 {
        -PI * self.settings.constants.hbar * cos(theta) / (6.0 * length) * self.time_factor(length)
    }
}

/// Regularized force for one ray direction.
pub fn per_direction_force(mg: &ModeGeometry, settings: &ForceSettings) -> Result<ForceResult> {
    check_length(mg.quantization_length)?;
    if !(0.0..core::f64::consts::FRAC_PI_2).contains(&mg.incidence_angle) {
        return Err(Error::Grazing { incidence_angle: mg.incidence_angle });
    }
    let ctx = ForceContext::new(*settings)?;
    let f = ctx.force(mg.quantization_length, mg.incidence_angle);
    let (sum, integral) = raw_mode_parts(mg.quantization_length, mg.mode_cutoff);
    let pre = 2.0 * settings.constants.hbar * cos(mg.incidence_angle) * ctx.time_factor(mg.quantization_length);
    Ok(ForceResult {
        per_direction_force: f,
        raw_sum_part: pre * sum,
        integral_part: pre * integral,
        regularized: true,
        net_vector: Vec3::ZERO,
        mean_radial_stress: f,
        nodes: Vec::new(),
        skipped: 0,
    })
}

/// Force per unit area between two parallel mirrors a distance `gap` apart,
/// in one dimension. It is `−dE/dd` of the regularized zero-point energy
/// `E = ½ħc Σ nπ/d`.
pub fn parallel_plate_force_1d(gap: f64, settings: &ForceSettings) -> Result<f64> {
    check_length(gap)?;
    let PhysicalConstants { hbar, c } = settings.constants;
    let energy = 0.5 * hbar * c * PI / gap * linear_mode_balance(&settings.regularization)?;
    // Each k_n = nπ/d has dk_n/dd = −k_n/d, so −dE/dd = E/d.
    Ok(energy / gap)
}

/// Wave-vector change at an inner-wall reflection for mode `n`.
pub fn delta_k_inner(trace: &ReflectionTrace, mode: u32) -> Result<Vec3> {
    if trace.points.len() < 2 {
        return Err(Error::NonPositive { what: "trace length - 1", value: trace.points.len() as f64 - 1.0 });
    }
    let dir = trace.points[0].normalize()?;
    Ok(delta_k_inner_from(trace.incidence_angle, trace.chord_length, dir, mode))
}

/// [`delta_k_inner`] from its ingredients. Vanishes at grazing incidence.
pub fn delta_k_inner_from(theta: f64, chord: f64, surface_direction: Vec3, mode: u32) -> Vec3 {
    let c = cos(theta);
    if c <= 0.0 {
        return Vec3::ZERO;
    }
    surface_direction * (-4.0 * f64::from(mode) * PI * c / chord)
}

/// Wave-vector change at an outer-wall reflection with free wave number
/// `free_k`.
pub fn delta_k_outer(theta: f64, free_k: f64, surface_direction: Vec3) -> Vec3 {
    surface_direction * (4.0 * free_k * cos(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sequence {
    /// Halton points with a seeded random shift.
    #[default]
    Halton,
    /// Independent seeded uniform draws.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub seed: u64,
    pub sequence: Sequence,
}

/// An entry point and unit direction, local cavity frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNode {
    pub entry: Vec3,
    pub direction: Vec3,
}

/// Sample points uniform over (disk area × solid angle).
///
/// Hemispheres use the opening disk and directions into the dome. The sphere
/// uses the diametral disk `y = 0` with all directions, in inversion pairs
/// `(R0, k)`, `(−R0, −k)`; an odd count leaves the last node unpaired.
pub fn quadrature_nodes(geom: &CavityGeometry, spec: &QuadratureSpec) -> Result<Vec<QuadratureNode>> {
    if spec.nodes == 0 {
        return Err(Error::EmptyQuadrature);
    }
    let r = geom.inner_radius;
    let sphere = geom.kind == CavityKind::Sphere;
    let base_count = if sphere { spec.nodes.div_ceil(2) } else { spec.nodes };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shift: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
    let mut out = Vec::with_capacity(spec.nodes);
    for i in 0..base_count {
        let u: [f64; 4] = match spec.sequence {
            Sequence::Halton => {
                let mut u = [0.0; 4];
                for (d, slot) in u.iter_mut().enumerate() {
                    let v = radical_inverse(i as u64 + 1, HALTON_BASES[d]) + shift[d];
                    *slot = v - (v as u64) as f64;
                }
                u
            }
            Sequence::Random => [rng.gen(), rng.gen(), rng.gen(), rng.gen()],
        };
        let rho = r * sqrt(u[0]) * (1.0 - 1e-12);
        let (sa, ca) = (sin(TAU * u[1]), cos(TAU * u[1]));
        let entry = Vec3::new(rho * ca, 0.0, rho * sa);
        // Axis cosine: (0, 1] for hemispheres, (−1, 1] for the sphere.
        let mu = if sphere { 1.0 - 2.0 * u[2] } else { 1.0 - u[2] };
        let s = sqrt((1.0 - mu * mu).max(0.0));
        let (sb, cb) = (sin(TAU * u[3]), cos(TAU * u[3]));
        let direction = Vec3::new(s * cb, mu, s * sb);
        out.push(QuadratureNode { entry, direction });
        if sphere && out.len() < spec.nodes {
            out.push(QuadratureNode { entry: -entry, direction: -direction });
        }
    }
    Ok(out)
}

/// Force for one node. `Ok(None)` means the node grazes and is skipped.
pub fn evaluate_node(geom: &CavityGeometry, node: &QuadratureNode, ctx: &ForceContext) -> Result<Option<NodeForce>> {
    let r = geom.inner_radius;
    let ray = RayState::new(node.entry, node.direction)?;
    let (_, strike) = first_intersection(&ray, r)?;
    let theta = incidence_angle(ray.direction, strike)?;
    if theta >= core::f64::consts::FRAC_PI_2 - crate::reflection::GRAZING_MARGIN {
        return Ok(None);
    }
    let outward = strike.normalize()?;
    // Chord measured from the actual second strike, not assumed.
    let k2 = reflect(ray.direction, -outward, 1.0, 1.0);
    let chord = (k2 * (-2.0 * k2.dot(strike))).norm();

    let mut length = chord;
    let mut plate_limited = false;
    if geom.kind == CavityKind::PlateHemisphere {
        let gap = geom.plate_gap().ok_or(Error::MissingPlate)?;
        if gap <= r {
            let trace = trace_hemisphere(&ray, geom, 1_000_000)?;
            if let Ok(hit) = plate_reflection_point(&trace.exit_ray(), geom) {
                let to_plate = hit.plate_point.distance(geom.center.apply(trace.last_strike()));
                if to_plate < chord {
                    length = to_plate;
                    plate_limited = true;
                }
            }
        }
    }

    Ok(Some(NodeForce {
        entry: node.entry,
        direction: ray.direction,
        strike,
        surface_point: strike + outward * (0.5 * geom.shell_thickness),
        incidence_angle: theta,
        quantization_length: length,
        force: ctx.force(length, theta),
        closed_form: ctx.closed_form(length, theta),
        plate_limited,
    }))
}

/// Combine node forces in a fixed order.
pub fn reduce_nodes(nodes: Vec<NodeForce>, skipped: usize, ctx: &ForceContext) -> Result<ForceResult> {
    if nodes.is_empty() {
        return Err(Error::EmptyQuadrature);
    }
    let n = nodes.len() as f64;
    let comp = |f: &dyn Fn(&NodeForce) -> f64| {
        let v: Vec<f64> = nodes.iter().map(f).collect();
        pairwise_sum(&v) / n
    };
    let dir = |p: Vec3| p.normalize().unwrap_or(Vec3::ZERO);
    let net = Vec3::new(
        comp(&|nf| nf.force * dir(nf.strike).x),
        comp(&|nf| nf.force * dir(nf.strike).y),
        comp(&|nf| nf.force * dir(nf.strike).z),
    );
    let mean = comp(&|nf| nf.force);
    let cutoff = ctx.settings.raw_cutoff;
    let raw = |pick: fn((f64, f64)) -> f64| {
        comp(&|nf| {
            let pre =
                2.0 * ctx.settings.constants.hbar * cos(nf.incidence_angle) * ctx.time_factor(nf.quantization_length);
            pre * pick(raw_mode_parts(nf.quantization_length, cutoff))
        })
    };
    let raw_sum = raw(|p| p.0);
    let raw_int = raw(|p| p.1);
    Ok(ForceResult {
        per_direction_force: mean,
        raw_sum_part: raw_sum,
        integral_part: raw_int,
        regularized: true,
        net_vector: net,
        mean_radial_stress: mean,
        nodes,
        skipped,
    })
}

/// Surface-averaged force over the quadrature nodes, serially.
pub fn total_force(geom: &CavityGeometry, quad: &QuadratureSpec, settings: &ForceSettings) -> Result<ForceResult> {
    geom.validate()?;
    let ctx = ForceContext::new(*settings)?;
    let mut nodes = Vec::with_capacity(quad.nodes);
    let mut skipped = 0;
    for node in quadrature_nodes(geom, quad)? {
        match evaluate_node(geom, &node, &ctx)? {
            Some(nf) => nodes.push(nf),
            None => skipped += 1,
        }
    }
    reduce_nodes(nodes, skipped, &ctx)
}
