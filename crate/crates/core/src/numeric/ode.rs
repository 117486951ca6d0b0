//! Adaptive Dormand–Prince 5(4) for a scalar ODE `y' = f(x, y)`.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `x0` to `x1` (either direction) and returns `y(x1)`.
///
/// `h0` is the initial step magnitude; `max_step` bounds every step.
pub fn dopri5<F: Fn(f64, f64) -> f64>(
    f: F,
    x0: f64,
    y0: f64,
    x1: f64,
    tol: f64,
    h0: f64,
    max_step: f64,
) -> Result<f64> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok(y0);
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = h0.min(max_step).min(span).max(1e-14 * span);
    let mut k1 = f(x, y);
    let mut steps = 0usize;
    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 1e-15 * span {
            return Ok(y);
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        let hd = hs * dir;
        let k2 = f(x + C2 * hd, y + hd * A21 * k1);
        let k3 = f(x + C3 * hd, y + hd * (A31 * k1 + A32 * k2));
        let k4 = f(x + C4 * hd, y + hd * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(x + C5 * hd, y + hd * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(x + hd, y + hd * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let ynew = y + hd * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(x + hd, ynew);
        let err = (hd * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let scale = tol * (1.0 + y.abs().max(ynew.abs()));
        let ratio = err / scale;
        if ratio <= 1.0 {
            x = if last { x1 } else { x + hd };
            y = ynew;
            k1 = k7;
        }
        let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (hs * fac).min(max_step);
        steps += 1;
        if steps > 5_000_000 {
            return Err(Error::NoConvergence("dopri5 step limit".into()));
        }
        if !y.is_finite() {
            return Err(Error::NoConvergence("dopri5 produced a non-finite value".into()));
        }
    }
}
