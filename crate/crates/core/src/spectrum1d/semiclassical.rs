use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::eigen::{EigenResult, Method};
use super::operator::{build_operator, ReducedSymbol, SymClass};
use crate::dynamics::{loop_at_level, Parity, Wells, TOUCH_BAND};
use crate::error::{Error, Result};
use crate::numeric::quad::tanh_sinh;
use crate::numeric::roots::brent;

/// Regime of the level set `(ξ₂ − ϱ_ν/ν)² + ξ₁² = E`.
fn level_regime(sym: &ReducedSymbol, energy: f64) -> Wells {
    if !(energy > 0.0) {
        return Wells::Empty;
    }
    let k = sym.xi2 / energy.sqrt();
    match sym.model.parity {
        Parity::Even => {
            if k > 1.0 + TOUCH_BAND {
                Wells::TwoWells
            } else if k > -1.0 + TOUCH_BAND && k < 1.0 - TOUCH_BAND {
                Wells::OneWell
            } else if k < -1.0 - TOUCH_BAND {
                Wells::Empty
            } else {
                Wells::Touching
            }
        }
        Parity::Odd => {
            if ((k.abs()) - 1.0).abs() <= TOUCH_BAND {
                Wells::Touching
            } else {
                Wells::OneWell
            }
        }
    }
}

/// Action of one connected well at spectral level `τ`: `S(ξ₂, τ)` on `W + 2τ`.
pub fn reduced_action(sym: &ReducedSymbol, tau: f64) -> Result<f64> {
    Ok(loop_at_level(&sym.model, sym.xi2, sym.w + 2.0 * tau)?.action)
}

/// Number of connected wells of `{a₀ ≤ τ}`.
pub fn well_count(sym: &ReducedSymbol, tau: f64) -> usize {
    match level_regime(sym, sym.w + 2.0 * tau) {
        Wells::TwoWells => 2,
        Wells::Empty => 0,
        _ => 1,
    }
}

/// Solutions of `S(ξ₂, τ)/(2πħ) + ½ ∈ ℤ` with `τ ∈ [lo, hi)`.
pub fn bohr_sommerfeld(sym: &ReducedSymbol, lo: f64, hi: f64) -> Result<EigenResult> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("need lo < hi, got [{lo}, {hi})")));
    }
    let e_lo = sym.w + 2.0 * lo;
    let e_hi = sym.w + 2.0 * hi;
    if e_hi <= 0.0 {
        return Ok(EigenResult { values: vec![], parities: None, method: Method::BohrSommerfeld });
    }
    // k = ξ₂/√E must not pass through ±1, except where an even level set is born at k = −1
    let k2 = sym.xi2 * sym.xi2;
    let born = sym.model.parity == Parity::Even && sym.xi2 < 0.0;
    if !born && k2 * (1.0 + TOUCH_BAND) >= e_lo.max(0.0) && k2 * (1.0 - TOUCH_BAND) <= e_hi {
        return Err(Error::WindowInvalid { lo, hi });
    }
    let r_hi = level_regime(sym, e_hi);
    if r_hi == Wells::Empty {
        return Ok(EigenResult { values: vec![], parities: None, method: Method::BohrSommerfeld });
    }
    // lowest τ with a non-empty level
    let tau_floor = if born { 0.5 * (k2 - sym.w) } else { -0.5 * sym.w };
    let tau_min = tau_floor.max(lo);
    let start = tau_min;
    let action = |t: f64| -> f64 {
        if t <= tau_floor {
            0.0
        } else {
            reduced_action(sym, t).unwrap_or(f64::NAN)
        }
    };
    let two_pi_hbar = 2.0 * PI * sym.hbar;
    let s_lo = action(start);
    let s_hi = action(hi);
    if !s_hi.is_finite() || !s_lo.is_finite() {
        return Err(Error::WindowInvalid { lo, hi });
    }
    // S = 2πħ(m − ½), m ≥ 1
    let m_first = ((s_lo / two_pi_hbar + 0.5).ceil() as i64).max(1);
    let mut values = Vec::new();
    let mut parities = Vec::new();
    let doubled = r_hi == Wells::TwoWells;
    let mut m = m_first;
    loop {
        let target = two_pi_hbar * (m as f64 - 0.5);
        if target >= s_hi {
            break;
        }
        let tau = if target <= s_lo {
            lo
        } else {
            brent(|t| action(t) - target, start, hi, 1e-14)?
        };
        if tau >= lo && tau < hi {
            if doubled {
                values.push(tau);
                values.push(tau);
                parities.push(SymClass::Even);
                parities.push(SymClass::Odd);
            } else {
                values.push(tau);
                parities.push(SymClass::of_index((m - 1) as usize));
            }
        }
        m += 1;
    }
    let parities = if sym.model.parity == Parity::Even { Some(parities) } else { None };
    Ok(EigenResult { values, parities, method: Method::BohrSommerfeld })
}

/// Number of negative eigenvalues with its Weyl approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingResult {
    pub n0: usize,
    pub n0_weyl: f64,
    /// Total phase-space area of `{a₀ < 0}` (all wells).
    #[serde(rename = "S")]
    pub s: f64,
}

/// Phase-space area of `{ξ₁² + (ξ₂ − ϱ_ν/ν)² < W}` by quadrature in `x₁`.
pub fn weyl_area(sym: &ReducedSymbol) -> f64 {
    let nu = sym.model.nu;
    let rw = sym.w.sqrt();
    let xi2 = sym.xi2;
    let x_of = |w: f64| -> f64 { (nu * w.abs()).powf(1.0 / nu).copysign(w) };
    // integrand 2√((√W − p)(√W + p)), p = ξ₂ − ϱ/ν
    let f = |x: f64| {
        let r = sym.model.rho_over_nu(x);
        let a = (rw - xi2) + r;
        let b = (rw + xi2) - r;
        2.0 * (a * b).max(0.0).sqrt()
    };
    let quad = |a: f64, b: f64| tanh_sinh(|x, _, _| f(x), a, b, 1e-13, 0.0).value;
    match sym.model.parity {
        Parity::Even => {
            let top = xi2 + rw;
            if top <= 0.0 {
                return 0.0;
            }
            let b2 = x_of(top);
            let bot = xi2 - rw;
            if bot <= 0.0 {
                2.0 * quad(0.0, b2)
            } else {
                2.0 * quad(x_of(bot), b2)
            }
        }
        Parity::Odd => quad(x_of(xi2 - rw), x_of(xi2 + rw)),
    }
}

/// `n₀` at `τ = 0` from the finite-difference operator and its Weyl approximation.
pub fn n0(sym: &ReducedSymbol) -> Result<CountingResult> {
    let op = build_operator(sym, 0.5)?;
    let n0 = op.count_below(0.0);
    let s = weyl_area(sym);
    Ok(CountingResult { n0, n0_weyl: s / (2.0 * PI * sym.hbar), s })
}
