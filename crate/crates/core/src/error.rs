use core::fmt;

/// Broad failure category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// An input violates a precondition.
    Domain,
    /// A numerical procedure did not converge or hit a singular system.
    Numerical,
    /// A degenerate configuration the closed forms do not cover.
    Degeneracy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    NonFinite,
    ZeroVector,
    NonPositive { what: &'static str, value: f64 },
    OriginOutsideSphere { origin_norm: f64, radius: f64 },
    DegeneratePlane,
    Grazing { incidence_angle: f64 },
    SingularSystem { what: &'static str },
    NotEntering,
    ParallelToPlate,
    PlateBehindExit,
    PlateCutsCavity,
    MissingPlate,
    NotCoplanar { residual: f64 },
    NoConvergence { what: &'static str, change: f64 },
    CoefficientDomain { axis: usize, radicand: f64 },
    DegenerateEigenvalues { lambda: f64 },
    ComplexEigenvalues { re: f64, im: f64 },
    FormulaSingularity { what: &'static str },
    EmptyQuadrature,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NonFinite
            | ZeroVector
            | NonPositive { .. }
            | OriginOutsideSphere { .. }
            | NotEntering
            | MissingPlate
            | EmptyQuadrature
            | NotCoplanar { .. } => ErrorKind::Domain,
            SingularSystem { .. } | NoConvergence { .. } | CoefficientDomain { .. } => ErrorKind::Numerical,
            DegeneratePlane
            | Grazing { .. }
            | ParallelToPlate
            | PlateBehindExit
            | PlateCutsCavity
            | DegenerateEigenvalues { .. }
            | ComplexEigenvalues { .. }
            | FormulaSingularity { .. } => ErrorKind::Degeneracy,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            NonFinite => write!(f, "non-finite component"),
            ZeroVector => write!(f, "zero vector has no direction"),
            NonPositive { what, value } => write!(f, "{what} must be positive, got {value}"),
            OriginOutsideSphere { origin_norm, radius } => {
                write!(f, "ray origin at distance {origin_norm} is not strictly inside radius {radius}")
            }
            DegeneratePlane => write!(f, "ray passes through the center; incidence plane undefined"),
            Grazing { incidence_angle } => {
                write!(f, "grazing incidence (angle {incidence_angle} rad)")
            }
            SingularSystem { what } => write!(f, "singular linear system in {what}"),
            NotEntering => write!(f, "ray does not enter through the hemisphere opening"),
            ParallelToPlate => write!(f, "exit ray is parallel to the plate"),
            PlateBehindExit => write!(f, "plate lies behind the exit ray"),
            PlateCutsCavity => write!(f, "plate intersects the exit ray inside the cavity"),
            MissingPlate => write!(f, "geometry has no plate"),
            NotCoplanar { residual } => write!(f, "plate center is off the incidence plane (residual {residual})"),
            NoConvergence { what, change } => {
                write!(f, "{what} did not converge (last relative change {change})")
            }
            CoefficientDomain { axis, radicand } => {
                write!(f, "coefficient radicand for axis {axis} is {radicand}; it must be positive")
            }
            DegenerateEigenvalues { lambda } => {
                write!(f, "repeated eigenvalue {lambda} is not supported")
            }
            ComplexEigenvalues { re, im } => {
                write!(f, "eigenvalues {re} ± {im}i are complex; the closed form needs a real pair")
            }
            FormulaSingularity { what } => write!(f, "closed form is singular: {what}"),
            EmptyQuadrature => write!(f, "quadrature has no nodes"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
