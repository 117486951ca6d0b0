use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::symbol::{ModelSymbol, Parity, PhasePoint};
use crate::error::{Error, Result};
use crate::numeric::quad::tanh_sinh;
use crate::numeric::roots::brent;

pub const QUAD_TOL: f64 = 1e-10;
pub const ROOT_TOL: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-4;
/// Half-width of the excluded band around `|k| = 1`.
pub const TOUCH_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wells {
    TwoWells,
    OneWell,
    Touching,
    Degenerate,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitData {
    pub k: f64,
    pub b1: f64,
    pub b2: f64,
    pub wells: Wells,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    pub kstar: f64,
    pub kappa: f64,
    pub omega_star: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
}

/// Loop integrals over one connected component of the level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopIntegrals {
    pub period: f64,
    pub drift: f64,
    pub action: f64,
}

fn classify(parity: Parity, k: f64) -> Wells {
    if (k - 1.0).abs() < TOUCH_BAND {
        return Wells::Touching;
    }
    match parity {
        Parity::Even => {
            if (k + 1.0).abs() < TOUCH_BAND {
                Wells::Degenerate
            } else if k > 1.0 {
                Wells::TwoWells
            } else if k > -1.0 {
                Wells::OneWell
            } else {
                Wells::Empty
            }
        }
        Parity::Odd => {
            if (k + 1.0).abs() < TOUCH_BAND {
                Wells::Touching
            } else {
                Wells::OneWell
            }
        }
    }
}

fn root_nu(w: f64, nu: f64) -> f64 {
    (w * nu).powf(1.0 / nu)
}

/// Turning points of the orbit with `ξ₂ = k` on the zero level (`V = 1`).
pub fn turning_points(sym: &ModelSymbol, k: f64) -> (f64, f64, Wells) {
    let nu = sym.nu;
    let scale = sym.mu.powf(-1.0 / nu);
    let wells = classify(sym.parity, k);
    let (b1, b2) = match (sym.parity, wells) {
        (_, Wells::Empty) => (f64::NAN, f64::NAN),
        (Parity::Even, Wells::Degenerate) => (0.0, 0.0),
        (Parity::Even, Wells::TwoWells) => (root_nu(k - 1.0, nu), root_nu(k + 1.0, nu)),
        (Parity::Even, _) => {
            let b = root_nu((k + 1.0).max(0.0), nu);
            (-b, b)
        }
        (Parity::Odd, _) => {
            let b1 = -root_nu((1.0 - k).max(0.0), nu);
            let b2 = root_nu((1.0 + k).abs(), nu).copysign(1.0 + k);
            (b1, b2)
        }
    };
    (scale * b1, scale * b2, wells)
}

/// `|k + cos θ|` evaluated on one θ-piece without cancellation.
type WFn = fn(k: f64, theta: f64, da: f64, db: f64, theta0: f64) -> f64;

// k > 1: k + cos θ = (k − 1) + 2 sin²((π − θ)/2)
fn w_above(k: f64, _theta: f64, _da: f64, db: f64, _t0: f64) -> f64 {
    let s = (0.5 * db).sin();
    (k - 1.0) + 2.0 * s * s
}

// k < −1: |k + cos θ| = (−k − 1) + 2 sin²(θ/2)
fn w_below(k: f64, _theta: f64, da: f64, _db: f64, _t0: f64) -> f64 {
    let s = (0.5 * da).sin();
    (-k - 1.0) + 2.0 * s * s
}

// θ ∈ [0, θ₀]: k + cos θ = 2 sin(θ₀ − d/2) sin(d/2), d = θ₀ − θ
fn w_left_of_zero(_k: f64, _theta: f64, _da: f64, db: f64, t0: f64) -> f64 {
    2.0 * (t0 - 0.5 * db).sin() * (0.5 * db).sin()
}

// θ ∈ [θ₀, π]: |k + cos θ| = 2 sin(θ₀ + d/2) sin(d/2), d = θ − θ₀
fn w_right_of_zero(_k: f64, _theta: f64, da: f64, _db: f64, t0: f64) -> f64 {
    2.0 * (t0 + 0.5 * da).sin() * (0.5 * da).sin()
}

/// Integrals at unit level and `μ = 1` for `ξ₂ = k`.
///
/// With `w = k + cos θ` the orbit is `ϱ_ν(x₁)/ν = w`, `ξ₁ = ± sin θ` and
/// `dx₁/dw = |νw|^{1/ν−1}`.
pub fn unit_loop(nu: f64, parity: Parity, k: f64) -> Result<LoopIntegrals> {
    if !k.is_finite() {
        return Err(Error::InvalidParameter(format!("k must be finite, got {k}")));
    }
    match classify(parity, k) {
        Wells::Touching | Wells::Degenerate => return Err(Error::DegenerateLevel { k }),
        Wells::Empty => return Err(Error::EmptyLevel { k }),
        _ => {}
    }
    let expo = 1.0 / nu - 1.0;
    let mut pieces: Vec<(f64, f64, WFn, f64)> = Vec::with_capacity(2);
    let factor;
    if k > 1.0 {
        pieces.push((0.0, PI, w_above, 2.0));
        factor = 1.0;
    } else if k < -1.0 {
        pieces.push((0.0, PI, w_below, 2.0));
        factor = 1.0;
    } else {
        let t0 = (-k).acos();
        match parity {
            Parity::Even => {
                pieces.push((0.0, t0, w_left_of_zero, t0));
                factor = 2.0;
            }
            Parity::Odd => {
                pieces.push((0.0, t0, w_left_of_zero, t0));
                pieces.push((t0, PI, w_right_of_zero, t0));
                factor = 1.0;
            }
        }
    }
    let mut out = [0.0; 3];
    for (which, slot) in out.iter_mut().enumerate() {
        let mut total = 0.0;
        for &(a, b, wf, t0) in &pieces {
            let g = |theta: f64, da: f64, db: f64| {
                let w = wf(k, theta, da, db, t0);
                let base = (nu * w).powf(expo);
                match which {
                    0 => base,
                    1 => -theta.cos() * base,
                    _ => {
                        let s = theta.sin();
                        s * s * base
                    }
                }
            };
            total += tanh_sinh(g, a, b, 0.1 * QUAD_TOL, 1e-15).value;
        }
        *slot = 2.0 * factor * total;
    }
    Ok(LoopIntegrals { period: out[0], drift: out[1], action: out[2] })
}

fn scaled(sym: &ModelSymbol, k: f64) -> Result<LoopIntegrals> {
    let l = unit_loop(sym.nu, sym.parity, k)?;
    let s = sym.mu.powf(-1.0 / sym.nu);
    Ok(LoopIntegrals { period: s * l.period, drift: s * l.drift, action: s * l.action })
}

/// Period `T(k)` of the orbit with `ξ₂ = k` (per well in the two-well case).
pub fn period(sym: &ModelSymbol, k: f64) -> Result<f64> {
    Ok(scaled(sym, k)?.period)
}

/// Drift integral `I(k)`: the `x₂` displacement over one period.
pub fn drift_integral(sym: &ModelSymbol, k: f64) -> Result<f64> {
    Ok(scaled(sym, k)?.drift)
}

/// Mean drift velocity `v = I/T`.
pub fn drift_velocity(sym: &ModelSymbol, k: f64) -> Result<f64> {
    let l = scaled(sym, k)?;
    Ok(l.drift / l.period)
}

/// All per-orbit invariants at once.
pub fn orbit(sym: &ModelSymbol, k: f64) -> Result<OrbitData> {
    let l = scaled(sym, k)?;
    let (b1, b2, wells) = turning_points(sym, k);
    Ok(OrbitData { k, b1, b2, wells, t: l.period, i: l.drift, v: l.drift / l.period })
}

/// Loop integrals on the level `ξ₁² + (ξ₂ − μϱ_ν/ν)² = energy`.
pub fn loop_at_level(sym: &ModelSymbol, xi2: f64, energy: f64) -> Result<LoopIntegrals> {
    if !(energy > 0.0) {
        return Err(Error::EmptyLevel { k: xi2 });
    }
    let r = energy.sqrt();
    let l = scaled(sym, xi2 / r)?;
    let nu = sym.nu;
    let sx = energy.powf(1.0 / (2.0 * nu));
    Ok(LoopIntegrals {
        period: sx / r * l.period,
        drift: sx * l.drift,
        action: r * sx * l.action,
    })
}

/// Action `S(ξ₂, τ) = ∮ ξ₁ dx₁` over one connected well of the level `1 + 2τ`.
pub fn action(sym: &ModelSymbol, xi2: f64, tau: f64) -> Result<f64> {
    Ok(loop_at_level(sym, xi2, 1.0 + 2.0 * tau)?.action)
}

/// Phase point at the outer turning point `x₁ = b₂`, `ξ₁ = 0`, `x₂ = 0`.
pub fn orbit_start(sym: &ModelSymbol, k: f64) -> Result<PhasePoint> {
    let (_, b2, wells) = turning_points(sym, k);
    match wells {
        Wells::Empty => Err(Error::EmptyLevel { k }),
        Wells::Degenerate | Wells::Touching => Err(Error::DegenerateLevel { k }),
        _ => Ok(PhasePoint::new(b2, 0.0, 0.0, k)),
    }
}

fn richardson_derivative<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let d1 = d(h)?;
    let d2 = d(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Critical momentum `k*` with `I(k*) = 0` and its derived constants.
pub fn find_kstar(sym: &ModelSymbol) -> Result<CriticalData> {
    find_kstar_with(sym, |k| drift_integral(sym, k))
}

/// As [`find_kstar`] with a caller-supplied drift integral.
pub fn find_kstar_with<F>(sym: &ModelSymbol, drift: F) -> Result<CriticalData>
where
    F: Fn(f64) -> Result<f64>,
{
    let kstar = match sym.parity {
        Parity::Odd => 0.0,
        Parity::Even => {
            let lo = 0.0;
            let hi = 1.0 - 1e-6;
            let flo = drift(lo)?;
            let fhi = drift(hi)?;
            if !(flo < 0.0 && fhi > 0.0) {
                return Err(Error::NoBracket { lo, hi });
            }
            let mut failure = None;
            let root = brent(
                |k| match drift(k) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                lo,
                hi,
                1e-13,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            if drift(root)?.abs() > ROOT_TOL {
                return Err(Error::NoConvergence(format!("|I(k*)| above {ROOT_TOL}")));
            }
            root
        }
    };
    let kappa = richardson_derivative(&drift, kstar, FD_STEP)?;
    let s0 = action(sym, kstar, 0.0)?;
    Ok(CriticalData { kstar, kappa, omega_star: 0.5 * kappa, s0 })
}
