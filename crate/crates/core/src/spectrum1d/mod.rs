//! The reduced one-dimensional operator `a₀(ξ₂, ħ)`: finite-difference and
//! Bohr–Sommerfeld spectra, counting functions and spectral-structure reports.

mod curves;
mod eigen;
mod operator;
mod semiclassical;
pub mod shooting;

pub use curves::{
    gap_stats, kstar_hbar, lambda_curve, large_z_scaling, GapReport, GapRow, LambdaCurve,
    ScalingSample,
};
pub use eigen::{
    bisection_tol, eigenfunction, eigenfunction_in_class, eigenvalues_in, projector_diag,
    projector_diag_on, refined_eigenvalues, residual, Block, EigenResult, Method, ProjectorDiag,
};
pub use operator::{
    build_operator, build_operator_with, family_grid, Grid, GridConfig, ReducedOperator,
    ReducedSymbol, SymClass,
};
pub use semiclassical::{
    bohr_sommerfeld, n0, reduced_action, weyl_area, well_count, CountingResult,
};

/// Number of eigenvalues strictly below `tau`.
pub fn count_below(op: &ReducedOperator, tau: f64) -> usize {
    op.count_below(tau)
}
