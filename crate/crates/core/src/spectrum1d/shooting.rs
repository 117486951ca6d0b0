//! Prüfer-angle shooting for the continuum operator.
//!
//! With `u = r sin θ`, `ħu' = r cos θ` the equation `ħ²u'' = q u`,
//! `q = (ξ₂ − ϱ_ν/ν)² − W − 2τ`, becomes `ħθ' = cos²θ − q sin²θ`.
//! Shooting from both sides to a matching point gives a mismatch `Φ(τ)`,
//! increasing in `τ`, with `Φ = jπ` exactly at the `j`-th eigenvalue.

use std::f64::consts::{FRAC_PI_2, PI};

use super::operator::{ReducedSymbol, SymClass};
use crate::dynamics::Parity;
use crate::error::{Error, Result};
use crate::numeric::ode::dopri5;
use crate::numeric::quad::gauss_kronrod;

/// WKB decay (in units of `ħ`) required between a turning point and a start point.
pub const DECAY: f64 = 20.0;
pub const ODE_TOL: f64 = 1e-12;

fn q_of(sym: &ReducedSymbol, tau: f64, x: f64) -> f64 {
    let p = sym.model.p2(x, sym.xi2);
    p * p - sym.w - 2.0 * tau
}

fn x_of(nu: f64, w: f64) -> f64 {
    (nu * w.abs()).powf(1.0 / nu).copysign(w)
}

/// Point beyond `tp` (in direction `dir`) where the WKB decay reaches [`DECAY`].
fn start_point(sym: &ReducedSymbol, tau: f64, tp: f64, dir: f64) -> Result<f64> {
    let h = sym.hbar;
    let mut acc = 0.0;
    let mut a = tp;
    let mut step = h.max(1e-3);
    for _ in 0..200 {
        let b = a + dir * step;
        let seg = gauss_kronrod(|x| q_of(sym, tau, x).max(0.0).sqrt(), a.min(b), a.max(b), 1e-8, 0.0);
        acc += seg.value / h;
        a = b;
        if acc >= DECAY {
            return Ok(a);
        }
        step *= 1.5;
    }
    Err(Error::NoConvergence("forbidden region too shallow for shooting".into()))
}

/// `∫₀^{tp} √q⁺ dx / ħ` through the central barrier.
fn barrier(sym: &ReducedSymbol, tau: f64, tp: f64) -> f64 {
    gauss_kronrod(|x| q_of(sym, tau, x).max(0.0).sqrt(), 0.0, tp, 1e-6, 0.0).value / sym.hbar
}

fn shoot(sym: &ReducedSymbol, tau: f64, x0: f64, theta0: f64, x1: f64) -> Result<f64> {
    let h = sym.hbar;
    let f = |x: f64, th: f64| {
        let (s, c) = th.sin_cos();
        (c * c - q_of(sym, tau, x) * s * s) / h
    };
    let qmax = q_of(sym, tau, x0).abs().max(1.0);
    dopri5(f, x0, theta0, x1, ODE_TOL, 0.1 * h / qmax.sqrt(), (x1 - x0).abs())
}

/// Mismatch `Φ` at spectral level `tau`.
///
/// For even `ν` the problem is posed on the half-line with the boundary
/// condition of `class`; for odd `ν` pass `None` and the full line is used.
pub fn mismatch(sym: &ReducedSymbol, tau: f64, class: Option<SymClass>) -> Result<f64> {
    let nu = sym.model.nu;
    let level = sym.w + 2.0 * tau;
    let c = level.max(0.0).sqrt();
    let xi2 = sym.xi2;
    match (sym.model.parity, class) {
        (Parity::Even, Some(class)) => {
            let xm = x_of(nu, xi2.max(0.0));
            let tp = if xi2 + c > 0.0 { x_of(nu, xi2 + c) } else { xm };
            let xr = start_point(sym, tau, tp.max(xm), 1.0)?;
            let qr = q_of(sym, tau, xr).max(0.0);
            let th_r = shoot(sym, tau, xr, PI - (1.0 / qr.sqrt()).atan(), xm)?;
            let th0 = match class {
                SymClass::Even => FRAC_PI_2,
                SymClass::Odd => 0.0,
            };
            let th_l = if xm <= 0.0 {
                th0
            } else if xi2 > c && barrier(sym, tau, x_of(nu, xi2 - c)) > 2.0 * DECAY {
                // the wells decouple: both classes see the same one-well problem
                let xl = start_point(sym, tau, x_of(nu, xi2 - c), -1.0)?.max(0.0);
                let ql = q_of(sym, tau, xl).max(0.0);
                shoot(sym, tau, xl, (1.0 / ql.sqrt()).atan(), xm)?
            } else {
                shoot(sym, tau, 0.0, th0, xm)?
            };
            Ok(th_l - th_r)
        }
        (Parity::Odd, None) => {
            let xm = x_of(nu, xi2);
            let tp_r = x_of(nu, xi2 + c);
            let tp_l = x_of(nu, xi2 - c);
            let xr = start_point(sym, tau, tp_r, 1.0)?;
            let xl = start_point(sym, tau, tp_l, -1.0)?;
            let qr = q_of(sym, tau, xr).max(0.0);
            let ql = q_of(sym, tau, xl).max(0.0);
            let th_r = shoot(sym, tau, xr, PI - (1.0 / qr.sqrt()).atan(), xm)?;
            let th_l = shoot(sym, tau, xl, (1.0 / ql.sqrt()).atan(), xm)?;
            Ok(th_l - th_r)
        }
        _ => Err(Error::InvalidParameter(
            "reflection class is required for even nu and not allowed for odd nu".into(),
        )),
    }
}

/// Reflection classes to shoot over for this symbol.
pub fn classes(sym: &ReducedSymbol) -> Vec<Option<SymClass>> {
    match sym.model.parity {
        Parity::Even => vec![Some(SymClass::Even), Some(SymClass::Odd)],
        Parity::Odd => vec![None],
    }
}

/// Number of eigenvalues `< tau` encoded by a mismatch value.
pub fn count_from_mismatch(phi: f64) -> usize {
    (phi / PI).ceil().max(0.0) as usize
}

/// Number of eigenvalues of the continuum operator strictly below `tau`.
pub fn count_below_shooting(sym: &ReducedSymbol, tau: f64) -> Result<usize> {
    let mut n = 0;
    for class in classes(sym) {
        n += count_from_mismatch(mismatch(sym, tau, class)?);
    }
    Ok(n)
}
