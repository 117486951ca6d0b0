//! Classical dynamics, reduced spectra and semiclassical counting asymptotics
//! for a planar magnetic Schrödinger operator whose field vanishes like
//! `|x₁|^(ν−1)` along the line `x₁ = 0`.
//!
//! * [`dynamics`]: pilot-model orbits, periods, drift and the critical momentum.
//! * [`spectrum1d`]: the reduced one-dimensional operator, its exact and
//!   Bohr–Sommerfeld spectra and counting functions.
//! * [`asymptotics`]: Magnetic Weyl expressions, the correction term and the
//!   sawtooth functions describing it.

pub mod asymptotics;
pub mod dynamics;
pub mod error;
pub mod numeric;
pub mod spectrum1d;

pub use error::{Error, Result};
