//! Classical dynamics of the pilot models and of general symbols.

mod orbit;
mod symbol;
mod trajectory;

pub use orbit::{
    action, drift_integral, drift_velocity, find_kstar, find_kstar_with, loop_at_level, orbit,
    orbit_start, period, turning_points, unit_loop, CriticalData, LoopIntegrals, OrbitData, Wells,
    FD_STEP, QUAD_TOL, ROOT_TOL, TOUCH_BAND,
};
pub use symbol::{
    eval_hamiltonian, Coefficient, GeneralSymbol, ModelSymbol, Parity, PhasePoint, Symbol,
};
pub use trajectory::{
    decompose_drift, integrate_trajectory, poincare_shift, xi2_slope, DriftDecomposition,
    Trajectory, MAX_ENERGY_DRIFT, SHIFT_STEPS,
};
