use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::{build_operator, build_operator_with, GridConfig, ReducedOperator, ReducedSymbol, SymClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FiniteDifference,
    BohrSommerfeld,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub parities: Option<Vec<SymClass>>,
    pub method: Method,
}

impl EigenResult {
    /// Values belonging to one reflection class, in increasing order.
    pub fn class_values(&self, class: SymClass) -> Vec<f64> {
        match &self.parities {
            Some(p) => self.values.iter().zip(p).filter(|(_, c)| **c == class).map(|(v, _)| *v).collect(),
            None => self.values.clone(),
        }
    }
}

/// Which counting function to bisect on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    All,
    Class(SymClass),
}

impl ReducedOperator {
    pub fn count_block(&self, tau: f64, block: Block) -> usize {
        match block {
            Block::All => self.count_below(tau),
            Block::Class(c) => self.count_below_class(tau, c),
        }
    }

    fn blocks(&self) -> Vec<Block> {
        if self.splits_by_parity() {
            vec![Block::Class(SymClass::Even), Block::Class(SymClass::Odd)]
        } else {
            vec![Block::All]
        }
    }

    /// The `j`-th (0-based) eigenvalue of a block, bisected to round-off.
    pub fn eigenvalue_by_index(&self, j: usize, block: Block) -> f64 {
        let mut a = self.lower_bound();
        let mut b = self.upper_bound();
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return mid;
            }
            if self.count_block(mid, block) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
    }
}

/// Bisection tolerance used by [`eigenvalues_in`].
pub fn bisection_tol(hi: f64) -> f64 {
    1e-10 * hi.abs().max(1.0)
}

/// All discrete eigenvalues in `[lo, hi)`.
pub fn eigenvalues_in(op: &ReducedOperator, lo: f64, hi: f64) -> Result<EigenResult> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("need lo < hi, got [{lo}, {hi})")));
    }
    let tol = 0.25 * bisection_tol(hi);
    let mut tagged: Vec<(f64, Option<SymClass>)> = Vec::new();
    for block in op.blocks() {
        let c_lo = op.count_block(lo, block);
        let c_hi = op.count_block(hi, block);
        let vals: Vec<f64> = (c_lo..c_hi)
            .into_par_iter()
            .map(|j| {
                let (mut a, mut b) = (lo, hi);
                while b - a > tol {
                    let mid = 0.5 * (a + b);
                    if op.count_block(mid, block) > j {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect();
        let tag = match block {
            Block::All => None,
            Block::Class(c) => Some(c),
        };
        tagged.extend(vals.into_iter().map(|v| (v, tag)));
    }
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let parities = if op.splits_by_parity() {
        Some(tagged.iter().map(|t| t.1.expect("tagged")).collect())
    } else {
        None
    };
    Ok(EigenResult { values: tagged.iter().map(|t| t.0).collect(), parities, method: Method::FiniteDifference })
}

/// Grid-converged eigenvalues in `[lo, hi)`: Richardson extrapolation of the
/// discrete eigenvalues on the box grid and on its refinement, paired by index.
pub fn refined_eigenvalues(sym: &ReducedSymbol, lo: f64, hi: f64, cfg: &GridConfig) -> Result<EigenResult> {
    let coarse = build_operator_with(sym, hi.max(lo + 1e-12), cfg)?;
    let fine = ReducedOperator::on_grid(sym, coarse.grid.refined());
    let mut tagged: Vec<(f64, Option<SymClass>)> = Vec::new();
    for block in fine.blocks() {
        // take indices from a slightly widened window, keep extrapolated values inside
        let margin = 1e-3 * (hi - lo).max(1.0);
        let j0 = fine.count_block(lo - margin, block);
        let j1 = fine.count_block(hi + margin, block);
        let vals: Vec<f64> = (j0..j1)
            .into_par_iter()
            .map(|j| {
                let f = fine.eigenvalue_by_index(j, block);
                let c = coarse.eigenvalue_by_index(j, block);
                (4.0 * f - c) / 3.0
            })
            .collect();
        let tag = match block {
            Block::All => None,
            Block::Class(c) => Some(c),
        };
        tagged.extend(vals.into_iter().filter(|v| *v >= lo && *v < hi).map(|v| (v, tag)));
    }
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let parities = if fine.splits_by_parity() { Some(tagged.iter().map(|t| t.1.expect("tagged")).collect()) } else { None };
    Ok(EigenResult { values: tagged.iter().map(|t| t.0).collect(), parities, method: Method::FiniteDifference })
}

/// Solves `(T − s)x = b` for tridiagonal `T` with constant off-diagonal
/// (first coupling `e0`), by Gaussian elimination with partial pivoting.
fn tridiag_solve(diag: &[f64], e0: f64, e: f64, s: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // rows stored as (a_i, b_i, c_i) for columns i, i+1, i+2 after pivoting
    let off = |i: usize| if i == 0 { e0 } else { e };
    let mut a: Vec<f64> = diag.iter().map(|d| d - s).collect();
    let mut b: Vec<f64> = (0..n).map(|i| if i + 1 < n { off(i) } else { 0.0 }).collect();
    let mut c = vec![0.0; n];
    let mut x = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(e.abs());
    for i in 0..n.saturating_sub(1) {
        let sub = off(i);
        if sub.abs() > a[i].abs() {
            // swap rows i and i+1
            let (ai, bi, ci, xi) = (a[i], b[i], c[i], x[i]);
            a[i] = sub;
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            x[i] = x[i + 1];
            let m = ai / sub;
            a[i + 1] = bi - m * b[i];
            b[i + 1] = ci - m * c[i];
            x[i + 1] = xi - m * x[i];
        } else {
            let piv = if a[i] == 0.0 { tiny } else { a[i] };
            a[i] = piv;
            let m = sub / piv;
            a[i + 1] -= m * b[i];
            b[i + 1] -= m * c[i];
            x[i + 1] -= m * x[i];
        }
    }
    if n > 0 && a[n - 1] == 0.0 {
        a[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut v = x[i];
        if i + 1 < n {
            v -= b[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= c[i] * x[i + 2];
        }
        x[i] = v / a[i];
    }
    x
}

fn inverse_iteration(diag: &[f64], e0: f64, e: f64, lambda: f64) -> Vec<f64> {
    let n = diag.len();
    // deterministic, non-symmetric start vector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662466927).fract()).collect();
    for _ in 0..4 {
        let mut y = tridiag_solve(diag, e0, e, lambda, &v);
        let norm = y.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        y.iter_mut().for_each(|t| *t /= norm);
        v = y;
    }
    v
}

const ISOLATION: f64 = 1e-6;

fn check_isolated(op: &ReducedOperator, lambda: f64, block: Block) -> Result<()> {
    let k = op.count_block(lambda + ISOLATION, block) - op.count_block(lambda - ISOLATION, block);
    if k != 1 {
        return Err(Error::NotIsolated { lambda, tol: ISOLATION });
    }
    Ok(())
}

/// Grid-normalised eigenvector (`Σ u_i² Δ = 1`) for the eigenvalue near `lambda`.
pub fn eigenfunction(op: &ReducedOperator, lambda: f64) -> Result<Vec<f64>> {
    check_isolated(op, lambda, Block::All)?;
    let j = op.count_below(lambda - ISOLATION);
    let exact = op.eigenvalue_by_index(j, Block::All);
    let e = op.offdiag.first().copied().unwrap_or(0.0);
    let u = inverse_iteration(&op.diag, e, e, exact);
    finish(op, u, exact)
}

/// Eigenvector within one reflection class of a symmetric operator.
pub fn eigenfunction_in_class(op: &ReducedOperator, lambda: f64, class: SymClass) -> Result<Vec<f64>> {
    if !op.splits_by_parity() {
        return Err(Error::InvalidParameter("operator does not split by parity".into()));
    }
    let block = Block::Class(class);
    check_isolated(op, lambda, block)?;
    let j = op.count_block(lambda - ISOLATION, block);
    let exact = op.eigenvalue_by_index(j, block);
    Ok(class_vector(op, j, class, exact)?)
}

fn class_vector(op: &ReducedOperator, _j: usize, class: SymClass, exact: f64) -> Result<Vec<f64>> {
    let n = op.len();
    let m = n / 2;
    let e = op.offdiag[0];
    let mut u = vec![0.0; n];
    match class {
        SymClass::Even => {
            let y = inverse_iteration(&op.diag[m..], std::f64::consts::SQRT_2 * e, e, exact);
            u[m] = std::f64::consts::SQRT_2 * y[0];
            for i in 1..=m {
                u[m + i] = y[i];
                u[m - i] = y[i];
            }
        }
        SymClass::Odd => {
            let y = inverse_iteration(&op.diag[m + 1..], e, e, exact);
            for i in 1..=m {
                u[m + i] = y[i - 1];
                u[m - i] = -y[i - 1];
            }
        }
    }
    finish(op, u, exact)
}

fn finish(op: &ReducedOperator, mut u: Vec<f64>, lambda: f64) -> Result<Vec<f64>> {
    let dx = op.spacing();
    let norm = (u.iter().map(|t| t * t).sum::<f64>() * dx).sqrt();
    let imax = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map_or(0, |(i, _)| i);
    let sign = if u[imax] < 0.0 { -1.0 } else { 1.0 };
    u.iter_mut().for_each(|t| *t *= sign / norm);
    let r = residual(op, &u, lambda);
    if !(r <= 1e-8) {
        return Err(Error::NoConvergence(format!("eigenvector residual {r:e}")));
    }
    Ok(u)
}

/// `‖(M − λ)u‖` in the grid-weighted norm.
pub fn residual(op: &ReducedOperator, u: &[f64], lambda: f64) -> f64 {
    let n = u.len();
    let e = op.offdiag.first().copied().unwrap_or(0.0);
    let mut s = 0.0;
    for i in 0..n {
        let mut r = (op.diag[i] - lambda) * u[i];
        if i > 0 {
            r += e * u[i - 1];
        }
        if i + 1 < n {
            r += e * u[i + 1];
        }
        s += r * r;
    }
    (s * op.spacing()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDiag {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub spacing: f64,
    pub count: usize,
}

impl ProjectorDiag {
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.spacing
    }
}

/// `Σ_{λₙ<τ} |Υₙ(x_i)|²` on the grid of `build_operator(sym, τ)`.
pub fn projector_diag(sym: &ReducedSymbol, tau: f64) -> Result<ProjectorDiag> {
    let op = build_operator(sym, tau)?;
    projector_diag_on(&op, tau)
}

pub fn projector_diag_on(op: &ReducedOperator, tau: f64) -> Result<ProjectorDiag> {
    let n = op.len();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for block in op.blocks() {
        let count = op.count_block(tau, block);
        let vs: Vec<Result<(f64, Vec<f64>)>> = (0..count)
            .into_par_iter()
            .map(|j| {
                let lam = op.eigenvalue_by_index(j, block);
                let u = match block {
                    Block::Class(c) => class_vector(op, j, c, lam)?,
                    Block::All => {
                        let e = op.offdiag.first().copied().unwrap_or(0.0);
                        finish(op, inverse_iteration(&op.diag, e, e, lam), lam)?
                    }
                };
                Ok((lam, u))
            })
            .collect();
        let mut vs = vs.into_iter().collect::<Result<Vec<_>>>()?;
        // orthogonalise within clusters the block cannot separate
        for i in 1..vs.len() {
            for k in 0..i {
                if (vs[i].0 - vs[k].0).abs() < ISOLATION {
                    let dot: f64 = vs[i].1.iter().zip(&vs[k].1).map(|(a, b)| a * b).sum::<f64>() * op.spacing();
                    let prev = vs[k].1.clone();
                    vs[i].1.iter_mut().zip(&prev).for_each(|(a, b)| *a -= dot * b);
                    let nrm = (vs[i].1.iter().map(|t| t * t).sum::<f64>() * op.spacing()).sqrt();
                    vs[i].1.iter_mut().for_each(|a| *a /= nrm);
                }
            }
        }
        vectors.extend(vs.into_iter().map(|v| v.1));
    }
    let mut density = vec![0.0; n];
    for u in &vectors {
        for (d, x) in density.iter_mut().zip(u) {
            *d += x * x;
        }
    }
    Ok(ProjectorDiag { x: op.grid.points(), density, spacing: op.spacing(), count: vectors.len() })
}
