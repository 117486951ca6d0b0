//! Magnetic Weyl expressions and correction terms.

pub mod correction;
pub mod counting;
pub mod field;
pub mod sawtooth;

pub use counting::{counting_density, gauss_legendre, level_intervals, n0_measure, n0_xi2_integral, psi_mass, LevelIntervals};
pub use field::{emw0_strip_integral, emw_density, landau_measure, odd_power_sum, FieldParams, PotentialProfile, ProfileFn};
pub use sawtooth::{g1_offset, sawtooth_g, sawtooth_g1, sawtooth_g_cesaro};
pub use correction::{calibrate_kappa1, corr_exact, corr_exact_with, corr_leading, corr_leading_shifted, scaling_experiment, CorrectionReport, ScalingRow, KAPPA1_CALIBRATION_HBAR};
