use std::f64::consts::PI;

use rayon::prelude::*;

use super::field::{FieldParams, PotentialProfile};
use crate::dynamics::{find_kstar, ModelSymbol, Parity};
use crate::error::{Error, Result};
use crate::numeric::quad::gauss_kronrod;
use crate::numeric::roots::{brent, golden_max};
use crate::spectrum1d::shooting::{classes, mismatch};
use crate::spectrum1d::{ReducedSymbol, SymClass};

const ROOT_XTOL: f64 = 1e-11;

/// Sub-level sets `{ξ₂ : λ_j(ξ₂) < 0}` of one reflection class.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelIntervals {
    pub class: Option<SymClass>,
    /// `(left, right)` for `j = 0, 1, …`
    pub intervals: Vec<(f64, f64)>,
}

impl LevelIntervals {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Number of eigenvalues below 0 at `xi2` (this class only).
    pub fn count_at(&self, xi2: f64) -> usize {
        self.intervals.iter().filter(|(a, b)| *a < xi2 && xi2 < *b).count()
    }
}

fn reduced(nu: u32, parity: Parity, hbar: f64, w: f64) -> Result<ReducedSymbol> {
    let model = ModelSymbol::new(nu as f64, parity)?;
    ReducedSymbol::new(model, 0.0, hbar, w)
}

/// Exact level-crossing decomposition of `ξ₂ ↦ n₀(ξ₂, ħ; W)`.
pub fn level_intervals(nu: u32, parity: Parity, hbar: f64, w: f64) -> Result<Vec<LevelIntervals>> {
    let base = reduced(nu, parity, hbar, w)?;
    let rw = w.sqrt();
    let n = nu as f64;
    let cap = 10.0 * hbar.powf(-n / (n - 1.0)) * w.max(1.0).powf(n / (n - 1.0));
    let kstar = find_kstar(&base.model)?.kstar;
    classes(&base)
        .into_par_iter()
        .map(|class| {
            let phi = |xi: f64| mismatch(&base.with_xi2(xi), 0.0, class);
            let phi_nan = |xi: f64| phi(xi).unwrap_or(f64::NAN);
            // maximiser of Φ: coarse scan then golden section
            let (xi_star, phi_max) = match parity {
                Parity::Odd => (0.0, phi(0.0)?),
                Parity::Even => {
                    let lo = -rw;
                    let hi = (kstar + 1.5) * rw;
                    let m = 48;
                    let grid: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
                    let vals = grid.iter().map(|&x| phi(x)).collect::<Result<Vec<_>>>()?;
                    let (imax, _) = vals
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(b.1))
                        .expect("non-empty grid");
                    let a = grid[imax.saturating_sub(1)];
                    let b = grid[(imax + 1).min(m)];
                    let (x, fx) = golden_max(phi_nan, a, b, 1e-9 * rw.max(1.0));
                    if fx >= vals[imax] {
                        (x, fx)
                    } else {
                        (grid[imax], vals[imax])
                    }
                }
            };
            let levels = if phi_max > 0.0 { (phi_max / PI).ceil() as usize } else { 0 };
            // right end where this class has no negative eigenvalue
            let mut xi_hi = xi_star + rw.max(1.0);
            while phi(xi_hi)? >= 0.0 {
                let next = xi_star + 2.0 * (xi_hi - xi_star);
                if next > cap {
                    return Err(Error::DomainNotClosed { cap });
                }
                xi_hi = next;
            }
            let xi_lo = match parity {
                Parity::Even => -rw,
                Parity::Odd => -xi_hi,
            };
            let intervals = (0..levels)
                .into_par_iter()
                .map(|j| {
                    let target = j as f64 * PI;
                    let g = |xi: f64| phi_nan(xi) - target;
                    let right = brent(g, xi_star, xi_hi, ROOT_XTOL)?;
                    let left = match parity {
                        Parity::Odd => -right,
                        Parity::Even => brent(g, xi_lo, xi_star, ROOT_XTOL)?,
                    };
                    Ok((left, right))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LevelIntervals { class, intervals })
        })
        .collect()
}

/// `∫ n₀(ξ₂, ħ; W) dξ₂`.
pub fn n0_measure(nu: u32, parity: Parity, hbar: f64, w: f64) -> Result<f64> {
    let parts = level_intervals(nu, parity, hbar, w)?;
    Ok(parts.iter().map(LevelIntervals::measure).sum())
}

/// `(2πh)^{−1} ∫ n₀(ξ₂, ħ; W) dξ₂`.
pub fn n0_xi2_integral(fp: &FieldParams, w: f64) -> Result<f64> {
    Ok(n0_measure(fp.nu, fp.parity, fp.hbar, w)? / (2.0 * PI * fp.h))
}

/// `(2πh)^{−1} ∫∫ n₀(ξ₂, ħ; W(x₂)) ψ(x₂) dξ₂ dx₂`.
pub fn counting_density(fp: &FieldParams, prof: &PotentialProfile) -> Result<f64> {
    let (a, b) = prof.support;
    // Gauss–Legendre on the support; W and ψ are smooth there
    let nodes = gauss_legendre(48);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let terms = nodes
        .par_iter()
        .map(|&(x, wt)| {
            let x2 = mid + half * x;
            let psi = (prof.psi)(x2);
            if psi == 0.0 {
                return Ok(0.0);
            }
            let wv = (prof.w)(x2);
            Ok(wt * psi * n0_measure(fp.nu, fp.parity, fp.hbar, wv)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(half * terms.iter().sum::<f64>() / (2.0 * PI * fp.h))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// `∫ ψ(x₂) dx₂` over the profile support.
pub fn psi_mass(prof: &PotentialProfile) -> f64 {
    gauss_kronrod(|x| (prof.psi)(x), prof.support.0, prof.support.1, 1e-13, 0.0).value
}
