//! Equivariant and self-similar standing-wave profiles for a hyperbolic
//! spin-field system with values in a surface of revolution.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the working precision to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod field;
pub mod io;
pub mod odeint;
pub mod profile;
pub mod quad;
pub mod regimes;
pub mod scalar;
pub mod seed;
pub mod selfsimilar;
mod series;
pub mod surface;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SurfaceProfile64 = surface::SurfaceProfile<f64>;
pub type WaveParameters64 = regimes::WaveParameters<f64>;
pub type RegimeReport64 = regimes::RegimeReport<f64>;
pub type IntegrationConfig64 = odeint::IntegrationConfig<f64>;
