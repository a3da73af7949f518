//! Specular ray dynamics inside spherical and hemispherical cavities, the
//! regularized zero-point radiation force those rays carry, and the driven
//! two-plate dynamical system.
//!
//! The crate is `no_std` with `alloc`. Natural units (ħ = c = 1) are used
//! unless a function takes the constants explicitly.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN lands in the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod dynamics;
pub mod error;
pub mod force;
pub mod geometry;
pub mod hemisphere;
pub mod quadrature;
pub mod reflection;

pub use error::{Error, ErrorKind};
pub use geometry::{FrameTranslation, SphericalPoint, Vec3};
