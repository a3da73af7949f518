//! Scenario configuration: one TOML document, every section optional.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Units {
    /// ħ = c = 1.
    #[default]
    Natural,
    /// SI values of ħ and c; lengths in metres.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GeometryKind {
    #[default]
    Sphere,
    Hemisphere,
    PlateHemisphere,
    /// Two infinite parallel mirrors; only `gap` matters.
    Plates1d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    pub radius: f64,
    pub thickness: f64,
    pub center: [f64; 3],
    /// Hemisphere-center to plate distance, or the mirror separation for
    /// `plates1d`.
    pub gap: Option<f64>,
    /// Plate normal angles; the default normal is the hemisphere axis.
    pub plate_theta: Option<f64>,
    pub plate_phi: Option<f64>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            kind: GeometryKind::Sphere,
            radius: 1.0,
            thickness: 0.0,
            center: [0.0; 3],
            gap: None,
            plate_theta: None,
            plate_phi: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RayConfig {
    pub origin: [f64; 3],
    pub direction: [f64; 3],
    pub max_reflections: u32,
}

impl Default for RayConfig {
    fn default() -> Self {
        RayConfig { origin: [0.3, 0.0, 0.1], direction: [0.2, 1.0, -0.1], max_reflections: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    #[default]
    Halton,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub seed: u64,
    pub sequence: SequenceKind,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes: 1024, seed: 0, sequence: SequenceKind::Halton }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    /// Momentum transfer per unit time.
    #[default]
    Unit,
    /// Momentum transfer per light-crossing time `L/c`.
    LightCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegularizationConfig {
    /// Largest cutoff ε; each further level halves it.
    pub eps0: f64,
    pub levels: usize,
    pub tolerance: f64,
    /// Mode count for the diagnostic raw sums.
    pub raw_cutoff: u64,
    pub time: TimeKind,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        RegularizationConfig { eps0: 1e-2, levels: 6, tolerance: 1e-6, raw_cutoff: 10_000, time: TimeKind::Unit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Plates1dConfig {
    pub gaps: Vec<f64>,
}

impl Default for Plates1dConfig {
    fn default() -> Self {
        Plates1dConfig { gaps: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveConfig {
    Constant { value: f64 },
    Sinusoid { amplitude: f64, omega: f64, phase: f64 },
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig::Constant { value: 0.0 }
    }
}

/// Field content of the three regions: left of the left plate, between
/// the plates, right of the right plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionsConfig {
    pub lengths: [f64; 3],
    pub modes: [u32; 3],
    pub occupation: u32,
    pub polarization_dof: u32,
}

impl Default for RegionsConfig {
    fn default() -> Self {
        RegionsConfig { lengths: [1.0, 1.0, 1.0], modes: [1, 1, 1], occupation: 0, polarization_dof: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PropagationKind {
    /// Principal-matrix solution only; degenerate spectra are errors.
    #[default]
    ClosedForm,
    /// Fall back to the matrix exponential when the closed form is singular.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub masses: [f64; 2],
    /// Coupling matrix entries. When absent they come from `regions`, or
    /// are drawn from the seed if that is absent too.
    pub eta: Option<[f64; 4]>,
    pub regions: Option<RegionsConfig>,
    pub signs_right: [f64; 3],
    pub signs_left: [f64; 3],
    /// Right-plate drive when `eta` is given; driver velocity with `regions`.
    pub drive: DriveConfig,
    /// Constant left-plate drive, used with explicit `eta`.
    pub xi_left: f64,
    pub initial_positions: [f64; 2],
    /// Defaults to zero, or to the momentum-balance values with `regions`.
    pub initial_velocities: Option<[f64; 2]>,
    pub t0: f64,
    pub t_end: f64,
    /// Sampling interval of the output series.
    pub dt: f64,
    pub propagation: PropagationKind,
    /// Re-evaluate the coefficients from the moved plates at every sample.
    pub stepped: bool,
    /// Step of the reference integrator used by `--verify`.
    pub verify_step: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            masses: [1.0, 1.0],
            eta: None,
            regions: None,
            signs_right: [1.0; 3],
            signs_left: [1.0; 3],
            drive: DriveConfig::default(),
            xi_left: 0.0,
            initial_positions: [0.0, 0.0],
            initial_velocities: None,
            t0: 0.0,
            t_end: 1.0,
            dt: 0.1,
            propagation: PropagationKind::ClosedForm,
            stepped: false,
            verify_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub units: Units,
    pub geometry: GeometryConfig,
    pub ray: RayConfig,
    pub quadrature: QuadratureConfig,
    pub regularization: RegularizationConfig,
    pub plates1d: Plates1dConfig,
    pub dynamics: DynamicsConfig,
}

/// One variant per violated invariant, each with its own message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("geometry.radius must be a positive finite number, got {0}")]
    Radius(f64),
    #[error("geometry.thickness must be zero or positive, got {0}")]
    Thickness(f64),
    #[error("geometry.center must have finite components")]
    Center,
    #[error("geometry.gap is required for {0:?} geometry")]
    MissingGap(GeometryKind),
    #[error("geometry.gap must be a positive finite number, got {0}")]
    Gap(f64),
    #[error("geometry.plate_theta/plate_phi must be finite")]
    PlateAngles,
    #[error("geometry.plate_theta/plate_phi only apply to plate_hemisphere")]
    StrayPlateAngles,
    #[error("ray.origin must have finite components")]
    RayOrigin,
    #[error("ray.direction must be a finite nonzero vector")]
    RayDirection,
    #[error("ray.max_reflections must be at least 1")]
    MaxReflections,
    #[error("quadrature.nodes must be at least 1")]
    Nodes,
    #[error("quadrature.seed must not exceed {max} so the config stays valid TOML, got {0}", max = i64::MAX)]
    Seed(u64),
    #[error("regularization.eps0 must lie in (0, 1), got {0}")]
    Eps0(f64),
    #[error("regularization.levels must be at least 3, got {0}")]
    Levels(usize),
    #[error("regularization.tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("regularization.raw_cutoff must be at least 1")]
    RawCutoff,
    #[error("plates1d.gaps must be a non-empty list of positive numbers")]
    Plates1dGaps,
    #[error("dynamics.masses must both be positive, got {0:?}")]
    Masses([f64; 2]),
    #[error("dynamics.eta must have finite entries")]
    Eta,
    #[error("dynamics.eta and dynamics.regions are mutually exclusive")]
    EtaAndRegions,
    #[error("dynamics.regions.lengths must be positive, got {0:?}")]
    RegionLengths([f64; 3]),
    #[error("dynamics.regions.polarization_dof must be at least 1")]
    PolarizationDof,
    #[error("dynamics signs must each be +1 or -1")]
    Signs,
    #[error("dynamics.drive parameters must be finite")]
    Drive,
    #[error("dynamics.xi_left must be finite")]
    XiLeft,
    #[error("dynamics.initial_positions and initial_velocities must be finite")]
    InitialState,
    #[error("dynamics.t_end ({t_end}) must not precede dynamics.t0 ({t0})")]
    TimeSpan { t0: f64, t_end: f64 },
    #[error("dynamics.dt must be positive, got {0}")]
    Dt(f64),
    #[error("dynamics.verify_step must be positive, got {0}")]
    VerifyStep(f64),
    #[error("dynamics.stepped needs dynamics.regions")]
    SteppedWithoutRegions,
}

fn finite3(a: &[f64; 3]) -> bool {
    a.iter().all(|x| x.is_finite())
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn load(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| crate::CliError::ReadConfig { path: path.display().to_string(), source })?;
        Ok(Self::from_toml(&text)?)
    }

    /// Checks everything that does not depend on which subcommand runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        if !positive(g.radius) {
            return Err(ConfigError::Radius(g.radius));
        }
        if !(g.thickness >= 0.0 && g.thickness.is_finite()) {
            return Err(ConfigError::Thickness(g.thickness));
        }
        if !finite3(&g.center) {
            return Err(ConfigError::Center);
        }
        match (g.kind, g.gap) {
            (GeometryKind::PlateHemisphere | GeometryKind::Plates1d, None) => {
                return Err(ConfigError::MissingGap(g.kind))
            }
            (_, Some(gap)) if !positive(gap) => return Err(ConfigError::Gap(gap)),
            _ => {}
        }
        let angles = [g.plate_theta, g.plate_phi];
        if angles.iter().flatten().any(|a| !a.is_finite()) {
            return Err(ConfigError::PlateAngles);
        }
        if g.kind != GeometryKind::PlateHemisphere && angles.iter().any(Option::is_some) {
            return Err(ConfigError::StrayPlateAngles);
        }

        let r = &self.ray;
        if !finite3(&r.origin) {
            return Err(ConfigError::RayOrigin);
        }
        if !finite3(&r.direction) || r.direction.iter().all(|&x| x == 0.0) {
            return Err(ConfigError::RayDirection);
        }
        if r.max_reflections == 0 {
            return Err(ConfigError::MaxReflections);
        }

        if self.quadrature.nodes == 0 {
            return Err(ConfigError::Nodes);
        }
        if i64::try_from(self.quadrature.seed).is_err() {
            return Err(ConfigError::Seed(self.quadrature.seed));
        }

        let reg = &self.regularization;
        if !(reg.eps0 > 0.0 && reg.eps0 < 1.0) {
            return Err(ConfigError::Eps0(reg.eps0));
        }
        if reg.levels < 3 {
            return Err(ConfigError::Levels(reg.levels));
        }
        if !positive(reg.tolerance) {
            return Err(ConfigError::Tolerance(reg.tolerance));
        }
        if reg.raw_cutoff == 0 {
            return Err(ConfigError::RawCutoff);
        }

        if self.plates1d.gaps.is_empty() || !self.plates1d.gaps.iter().all(|&d| positive(d)) {
            return Err(ConfigError::Plates1dGaps);
        }

        self.validate_dynamics()
    }

    fn validate_dynamics(&self) -> Result<(), ConfigError> {
        let d = &self.dynamics;
        if !d.masses.iter().all(|&m| positive(m)) {
            return Err(ConfigError::Masses(d.masses));
        }
        if let Some(eta) = d.eta {
            if !eta.iter().all(|x| x.is_finite()) {
                return Err(ConfigError::Eta);
            }
            if d.regions.is_some() {
                return Err(ConfigError::EtaAndRegions);
            }
        }
        if let Some(reg) = &d.regions {
            if !reg.lengths.iter().all(|&l| positive(l)) {
                return Err(ConfigError::RegionLengths(reg.lengths));
            }
            if reg.polarization_dof == 0 {
                return Err(ConfigError::PolarizationDof);
            }
        }
        if !d.signs_right.iter().chain(&d.signs_left).all(|&s| s == 1.0 || s == -1.0) {
            return Err(ConfigError::Signs);
        }
        let drive_ok = match d.drive {
            DriveConfig::Constant { value } => value.is_finite(),
            DriveConfig::Sinusoid { amplitude, omega, phase } => {
                amplitude.is_finite() && omega.is_finite() && phase.is_finite()
            }
        };
        if !drive_ok {
            return Err(ConfigError::Drive);
        }
        if !d.xi_left.is_finite() {
            return Err(ConfigError::XiLeft);
        }
        let v0 = d.initial_velocities.unwrap_or([0.0; 2]);
        if !d.initial_positions.iter().chain(&v0).all(|x| x.is_finite()) {
            return Err(ConfigError::InitialState);
        }
        if !(d.t0.is_finite() && d.t_end.is_finite() && d.t_end >= d.t0) {
            return Err(ConfigError::TimeSpan { t0: d.t0, t_end: d.t_end });
        }
        if !positive(d.dt) {
            return Err(ConfigError::Dt(d.dt));
        }
        if !positive(d.verify_step) {
            return Err(ConfigError::VerifyStep(d.verify_step));
        }
        if d.stepped && d.regions.is_none() {
            return Err(ConfigError::SteppedWithoutRegions);
        }
        Ok(())
    }
}
