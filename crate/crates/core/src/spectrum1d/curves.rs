use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{bisection_tol, eigenvalues_in, refined_eigenvalues, Block};
use super::operator::{family_grid, Grid, GridConfig, ReducedOperator, ReducedSymbol, SymClass};
use crate::dynamics::{ModelSymbol, Parity};
use crate::error::{Error, Result};
use crate::numeric::fit::power_law_exponent;
use crate::numeric::roots::golden_max;

/// `λ_n` along a `ξ₂`-grid with divided differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCurve {
    pub index: usize,
    pub class: Option<SymClass>,
    pub xi2: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Central first differences (one-sided at the ends).
    pub d1: Vec<f64>,
    /// Second divided differences at interior nodes (`NaN` at the ends).
    pub d2: Vec<f64>,
}

fn block_of(sym: &ReducedSymbol, class: Option<SymClass>) -> Result<Block> {
    match (sym.is_symmetric(), class) {
        (true, Some(c)) => Ok(Block::Class(c)),
        (_, None) => Ok(Block::All),
        (false, Some(_)) => Err(Error::InvalidParameter("reflection classes exist only for even nu".into())),
    }
}

/// Operators on a common grid and its refinement for each `ξ₂`.
struct Family {
    sym: ReducedSymbol,
    grid: Grid,
    fine: Grid,
}

impl Family {
    fn new(sym: &ReducedSymbol, xi_lo: f64, xi_hi: f64, top: f64, cfg: &GridConfig) -> Result<Self> {
        let grid = family_grid(sym, xi_lo, xi_hi, top, cfg)?;
        let fine = grid.refined();
        if fine.n > cfg.max_points {
            return Err(Error::ResourceLimit { requested: fine.n, limit: cfg.max_points });
        }
        Ok(Self { sym: *sym, grid, fine })
    }

    /// Extrapolated `λ_j` and the smaller gap to its block neighbours.
    fn eigen(&self, xi2: f64, j: usize, block: Block) -> (f64, f64) {
        let s = self.sym.with_xi2(xi2);
        let c = ReducedOperator::on_grid(&s, self.grid);
        let f = ReducedOperator::on_grid(&s, self.fine);
        let lam = |op: &ReducedOperator, i: usize| op.eigenvalue_by_index(i, block);
        let value = (4.0 * lam(&f, j) - lam(&c, j)) / 3.0;
        let fj = lam(&f, j);
        let mut gap = lam(&f, j + 1) - fj;
        if j > 0 {
            gap = gap.min(fj - lam(&f, j - 1));
        }
        (value, gap)
    }
}

/// `λ_index(ξ₂)` of one block over `xi2_grid` (increasing), tracked by index.
///
/// `top` bounds the eigenvalues of interest and fixes the common box.
pub fn lambda_curve(
    sym: &ReducedSymbol,
    xi2_grid: &[f64],
    index: usize,
    class: Option<SymClass>,
    top: f64,
    cfg: &GridConfig,
) -> Result<LambdaCurve> {
    if xi2_grid.len() < 3 || xi2_grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidParameter("xi2 grid must be increasing with >= 3 nodes".into()));
    }
    let block = block_of(sym, class)?;
    let fam = Family::new(sym, xi2_grid[0], xi2_grid[xi2_grid.len() - 1], top, cfg)?;
    let samples: Vec<(f64, f64)> = xi2_grid.par_iter().map(|&x| fam.eigen(x, index, block)).collect();
    for (&x, &(v, gap)) in xi2_grid.iter().zip(&samples) {
        if gap < 10.0 * bisection_tol(v) {
            return Err(Error::CrossingDetected { index, xi2: x, gap });
        }
    }
    let lambda: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let n = lambda.len();
    let xs = xi2_grid;
    let d1 = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (lambda[b] - lambda[a]) / (xs[b] - xs[a])
        })
        .collect();
    let d2 = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                return f64::NAN;
            }
            let l = (lambda[i] - lambda[i - 1]) / (xs[i] - xs[i - 1]);
            let r = (lambda[i + 1] - lambda[i]) / (xs[i + 1] - xs[i]);
            2.0 * (r - l) / (xs[i + 1] - xs[i - 1])
        })
        .collect();
    Ok(LambdaCurve { index, class, xi2: xs.to_vec(), lambda, d1, d2 })
}

/// `k*_ħ`: the minimiser over `ξ₂ ∈ [xi_lo, xi_hi]` of `λ_index`, where `∂_{ξ₂}λ_index = 0`.
pub fn kstar_hbar(
    sym: &ReducedSymbol,
    index: usize,
    class: Option<SymClass>,
    xi_lo: f64,
    xi_hi: f64,
    cfg: &GridConfig,
) -> Result<f64> {
    let block = block_of(sym, class)?;
    let fam = Family::new(sym, xi_lo, xi_hi, 0.5, cfg)?;
    let (x, _) = golden_max(|x| -fam.eigen(x, index, block).0, xi_lo, xi_hi, 1e-7);
    Ok(x)
}

/// Minimal spacing of the spectrum of one block at one `(ξ₂, ħ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub xi2: f64,
    pub hbar: f64,
    pub class: Option<SymClass>,
    /// Eigenvalues found in the window.
    pub count: usize,
    /// `NaN` when fewer than two eigenvalues lie in the window.
    pub min_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lo: f64,
    pub hi: f64,
    pub rows: Vec<GapRow>,
    /// Fitted exponent of min-spacing against `ħ`, per `ξ₂` (all-class spacing).
    pub exponents: Vec<(f64, f64)>,
}

fn min_spacing(values: &[f64]) -> f64 {
    values.windows(2).map(|p| p[1] - p[0]).fold(f64::NAN, f64::min)
}

/// Spacing statistics over `xi2_list × hbar_list` in the spectral window `[lo, hi)`.
///
/// One row covers the whole spectrum; for even `ν`, when the window reaches
/// the two-well regime (`ξ₂² > W + 2·lo`), rows per reflection class follow.
pub fn gap_stats(sym: &ReducedSymbol, xi2_list: &[f64], hbar_list: &[f64], lo: f64, hi: f64) -> Result<GapReport> {
    let cfg = GridConfig::default();
    let jobs: Vec<(f64, f64)> =
        xi2_list.iter().flat_map(|&x| hbar_list.iter().map(move |&h| (x, h))).collect();
    let per_job = jobs
        .par_iter()
        .map(|&(xi2, hbar)| {
            let s = sym.with_xi2(xi2).with_hbar(hbar);
            let res = refined_eigenvalues(&s, lo, hi, &cfg)?;
            let mut rows = vec![GapRow {
                xi2,
                hbar,
                class: None,
                count: res.values.len(),
                min_spacing: min_spacing(&res.values),
            }];
            if s.is_symmetric() && xi2 > 0.0 && xi2 * xi2 > s.w + 2.0 * lo {
                for c in [SymClass::Even, SymClass::Odd] {
                    let v = res.class_values(c);
                    rows.push(GapRow { xi2, hbar, class: Some(c), count: v.len(), min_spacing: min_spacing(&v) });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<GapRow> = per_job.into_iter().flatten().collect();
    let exponents = xi2_list
        .iter()
        .filter_map(|&x| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.xi2 == x && r.class.is_none() && r.min_spacing.is_finite() && r.min_spacing > 0.0)
                .map(|r| (r.hbar, r.min_spacing))
                .collect();
            if pts.len() < 2 {
                return None;
            }
            let (hs, gs): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            Some((x, power_law_exponent(&hs, &gs)))
        })
        .collect();
    Ok(GapReport { lo, hi, rows, exponents })
}

/// One sample of `λ_n(z)` for `ħ²D² + (z − ϱ_ν/ν)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub z: f64,
    /// 1-based index.
    pub n: usize,
    pub lambda: f64,
    /// `λ_n / (z^{(ν−1)/ν} n)`
    pub ratio: f64,
}

/// Eigenvalues of `D² + (z − ϱ_ν/ν)²` (`ħ = 1`) for `n ≤ frac·z^{(ν+1)/ν}`,
/// from `λ_n = 2·eig_n(a₀)` with `ħ = 1` and `W → 0`.
pub fn large_z_scaling(nu: u32, parity: Parity, z_list: &[f64], frac: f64) -> Result<Vec<ScalingSample>> {
    let model = ModelSymbol::new(nu as f64, parity)?;
    let n_f = nu as f64;
    let cfg = GridConfig::default();
    let per_z = z_list
        .par_iter()
        .map(|&z| {
            let n_max = (frac * z.powf((n_f + 1.0) / n_f)).floor() as usize;
            if n_max == 0 {
                return Ok(vec![]);
            }
            // W is required positive; a tiny W shifts eig by W/2, removed below
            let w = 1e-12;
            let sym = ReducedSymbol::new(model, z, 1.0, w)?;
            // bracket the n_max-th eigenvalue by doubling the window top
            let mut top = z.powf((n_f - 1.0) / n_f) * n_max as f64;
            let values = loop {
                let op = super::operator::build_operator_with(&sym, top, &cfg)?;
                if op.count_below(top) >= n_max {
                    break eigenvalues_in(&op, op.lower_bound(), top)?.values;
                }
                top *= 2.0;
            };
            Ok(values
                .iter()
                .take(n_max)
                .enumerate()
                .map(|(i, &e)| {
                    let lambda = 2.0 * (e + 0.5 * w);
                    let n = i + 1;
                    ScalingSample { z, n, lambda, ratio: lambda / (z.powf((n_f - 1.0) / n_f) * n as f64) }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_z.into_iter().flatten().collect())
}
