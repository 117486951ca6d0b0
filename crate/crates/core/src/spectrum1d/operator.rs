use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelSymbol, Parity};
use crate::error::{Error, Result};

/// `a₀ = ½(ħ²D₁² + (ξ₂ − ϱ_ν(x₁)/ν)² − W)` at fixed `ξ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedSymbol {
    pub model: ModelSymbol,
    pub xi2: f64,
    pub hbar: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

impl ReducedSymbol {
    pub fn new(model: ModelSymbol, xi2: f64, hbar: f64, w: f64) -> Result<Self> {
        if model.mu != 1.0 {
            return Err(Error::InvalidParameter("reduced operator uses mu = 1".into()));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be > 0, got {hbar}")));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!("W must be > 0, got {w}")));
        }
        if !xi2.is_finite() {
            return Err(Error::InvalidParameter(format!("xi2 must be finite, got {xi2}")));
        }
        Ok(Self { model, xi2, hbar, w })
    }

    pub fn with_xi2(&self, xi2: f64) -> Self {
        Self { xi2, ..*self }
    }

    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self { hbar, ..*self }
    }

    /// Potential `U(x) = ½((ξ₂ − ϱ_ν/ν)² − W)`.
    pub fn potential(&self, x: f64) -> f64 {
        let p = self.model.p2(x, self.xi2);
        0.5 * (p * p - self.w)
    }

    /// The operator commutes with `x ↦ −x`.
    pub fn is_symmetric(&self) -> bool {
        self.model.parity == Parity::Even
    }
}

/// Construction parameters of the finite-difference box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Required clearance of the potential above the window top outside the box.
    pub margin: f64,
    /// Relative padding added beyond the clearance radius.
    pub pad: f64,
    /// Points per local wavelength at the window top.
    pub resolution: f64,
    pub max_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { margin: 2.0, pad: 0.25, resolution: 10.0, max_points: 2_000_000 }
    }
}

/// Uniform interior grid `x_i = x_min + iΔ`, `i = 1..=n`, Dirichlet at `x_min`, `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Same box with the spacing halved.
    pub fn refined(&self) -> Grid {
        Grid { n: 2 * self.n + 1, ..*self }
    }

    /// Symmetric about 0 with the centre on a grid point.
    pub fn is_centred(&self) -> bool {
        self.x_min == -self.x_max && self.n % 2 == 1
    }
}

/// Symmetric tridiagonal discretisation of [`ReducedSymbol`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedOperator {
    pub sym: ReducedSymbol,
    pub grid: Grid,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

/// Symmetry class of an eigenvector of a symmetric operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymClass {
    Even,
    Odd,
}

impl SymClass {
    pub fn of_index(j: usize) -> Self {
        if j % 2 == 0 {
            SymClass::Even
        } else {
            SymClass::Odd
        }
    }
}

/// Interval `[left, right]` outside which `U ≥ top + margin`.
fn clearance(sym: &ReducedSymbol, level: f64) -> (f64, f64) {
    let nu = sym.model.nu;
    let c = (2.0 * level + sym.w).max(0.0).sqrt();
    let root = |w: f64| if w > 0.0 { (nu * w).powf(1.0 / nu) } else { 0.0 };
    let right = root(sym.xi2 + c);
    let left = match sym.model.parity {
        Parity::Even => right,
        Parity::Odd => root(c - sym.xi2),
    };
    (left, right)
}

/// Box covering the symbols `sym.with_xi2(ξ)` for every `ξ` in `[xi_lo, xi_hi]`.
pub fn family_grid(
    sym: &ReducedSymbol,
    xi_lo: f64,
    xi_hi: f64,
    window_top: f64,
    cfg: &GridConfig,
) -> Result<Grid> {
    let level = window_top + cfg.margin;
    let (l1, r1) = clearance(&sym.with_xi2(xi_lo), level);
    let (l2, r2) = clearance(&sym.with_xi2(xi_hi), level);
    let decay = 12.0 * sym.hbar;
    let pad = |r: f64| (r * (1.0 + cfg.pad)).max(r + decay).max(1.0);
    let mut right = pad(r1.max(r2));
    let mut left = pad(l1.max(l2));
    if sym.is_symmetric() {
        right = right.max(left);
        left = right;
    }
    let kmax = (2.0 * (window_top + sym.w)).max(1e-300).sqrt();
    let dx_max = sym.hbar / (cfg.resolution * kmax);
    let width = left + right;
    let mut n = ((width / dx_max).ceil() as usize).max(3) - 1;
    if sym.is_symmetric() && n % 2 == 0 {
        n += 1;
    }
    if n > cfg.max_points {
        return Err(Error::ResourceLimit { requested: n, limit: cfg.max_points });
    }
    Ok(Grid { x_min: -left, x_max: right, n })
}

/// Builds the operator for spectral window tops up to `window_top`.
pub fn build_operator(sym: &ReducedSymbol, window_top: f64) -> Result<ReducedOperator> {
    build_operator_with(sym, window_top, &GridConfig::default())
}

pub fn build_operator_with(
    sym: &ReducedSymbol,
    window_top: f64,
    cfg: &GridConfig,
) -> Result<ReducedOperator> {
    let grid = family_grid(sym, sym.xi2, sym.xi2, window_top, cfg)?;
    Ok(ReducedOperator::on_grid(sym, grid))
}

impl ReducedOperator {
    pub fn on_grid(sym: &ReducedSymbol, grid: Grid) -> Self {
        let dx = grid.spacing();
        let kin = sym.hbar * sym.hbar / (dx * dx);
        let diag: Vec<f64> =
            (0..grid.n).into_par_iter().map(|i| kin + sym.potential(grid.point(i))).collect();
        let offdiag = vec![-0.5 * kin; grid.n.saturating_sub(1)];
        Self { sym: *sym, grid, diag, offdiag }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    /// The grid is centred and the operator commutes with reflection.
    pub fn splits_by_parity(&self) -> bool {
        self.sym.is_symmetric() && self.grid.is_centred()
    }

    /// Number of eigenvalues strictly below `tau`.
    pub fn count_below(&self, tau: f64) -> usize {
        sturm_count(&self.diag, |_| self.offdiag[0], tau)
    }

    /// Count restricted to one reflection class (requires [`Self::splits_by_parity`]).
    pub fn count_below_class(&self, tau: f64, class: SymClass) -> usize {
        assert!(self.splits_by_parity(), "operator does not split by parity");
        let m = self.len() / 2;
        let e = self.offdiag[0];
        match class {
            // unknowns u_0..u_m; the first coupling is doubled, which after
            // symmetrisation gives an off-diagonal √2·e
            SymClass::Even => {
                let d = &self.diag[m..];
                let s2 = std::f64::consts::SQRT_2 * e;
                sturm_count(d, |i| if i == 0 { s2 } else { e }, tau)
            }
            // u_0 = 0, unknowns u_1..u_m
            SymClass::Odd => sturm_count(&self.diag[m + 1..], |_| e, tau),
        }
    }

    /// Gershgorin lower bound of the spectrum.
    pub fn lower_bound(&self) -> f64 {
        let e = self.offdiag.first().map_or(0.0, |v| v.abs());
        self.diag.iter().fold(f64::INFINITY, |a, &d| a.min(d)) - 2.0 * e
    }

    pub fn upper_bound(&self) -> f64 {
        let e = self.offdiag.first().map_or(0.0, |v| v.abs());
        self.diag.iter().fold(f64::NEG_INFINITY, |a, &d| a.max(d)) + 2.0 * e
    }
}

/// Inertia count of `T − τ` via the `LDLᵀ` pivot recurrence.
fn sturm_count<E: Fn(usize) -> f64>(diag: &[f64], off: E, tau: f64) -> usize {
    let mut count = 0usize;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 {
            0.0
        } else {
            let e = off(i - 1);
            e * e / q
        };
        q = d - tau - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + tau.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
