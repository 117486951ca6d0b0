use serde::{Deserialize, Serialize};

use super::orbit::{find_kstar, orbit_start, period};
use super::symbol::{ModelSymbol, PhasePoint, Symbol};
use crate::error::{Error, Result};
use crate::numeric::fit::linear_fit;

/// Energy drift beyond which a run is rejected.
pub const MAX_ENERGY_DRIFT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, PhasePoint)>,
    pub dt: f64,
    pub energy0: f64,
    /// `max |a(z(t)) − a(z(0))|` over all samples.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn span(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0) - self.samples.first().map_or(0.0, |s| s.0)
    }

    pub fn last(&self) -> PhasePoint {
        self.samples.last().expect("trajectory has at least one sample").1
    }

    /// Cubic Lagrange interpolation of `x₂` at time `t`.
    pub fn x2_at(&self, t: f64) -> f64 {
        self.interp(t, |p| p.x2)
    }

    fn interp<F: Fn(&PhasePoint) -> f64>(&self, t: f64, f: F) -> f64 {
        let n = self.samples.len();
        let t0 = self.samples[0].0;
        let u = (t - t0) / self.dt;
        let i = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = 0.0;
        for j in i..i + 4 {
            let mut w = 1.0;
            for m in i..i + 4 {
                if m != j {
                    w *= (u - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += w * f(&self.samples[j].1);
        }
        acc
    }
}

/// Integrates the Hamiltonian flow of `sym` from `start` over `[0, t_max]`.
///
/// The pilot model uses a fourth-order composition of Störmer–Verlet steps;
/// a [`GeneralSymbol`](super::GeneralSymbol) uses the implicit midpoint rule.
pub fn integrate_trajectory<S: Symbol + ?Sized>(
    sym: &S,
    start: PhasePoint,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_max > 0.0) || !dt.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_max > 0, got {dt}, {t_max}")));
    }
    if !start.is_finite() {
        return Err(Error::InvalidParameter("start point is not finite".into()));
    }
    let ratio = t_max / dt;
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio { ratio.round() } else { ratio.ceil() };
    let steps = steps as usize;
    let energy0 = sym.energy(&start, 1.0);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, start));
    let mut p = start;
    let mut drift: f64 = 0.0;
    for i in 1..=steps {
        sym.advance(&mut p, dt)?;
        let e = (sym.energy(&p, 1.0) - energy0).abs();
        drift = drift.max(e);
        if !(drift <= MAX_ENERGY_DRIFT) {
            return Err(Error::StepTooLarge { dt, drift });
        }
        samples.push((i as f64 * dt, p));
    }
    Ok(Trajectory { samples, dt, energy0, energy_drift: drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftDecomposition {
    pub v_est: f64,
    /// Sup over the first period of `|x₂(t) − v_est·t − x₂(0)|`.
    pub residual_sup: f64,
    /// Sup of `|x̃₂(t + T) − x̃₂(t)|`; zero for an exactly periodic remainder.
    pub periodicity_defect: f64,
}

/// Splits `x₂(t)` into `v t` plus a `T`-periodic remainder.
pub fn decompose_drift(traj: &Trajectory, t: f64) -> Result<DriftDecomposition> {
    let span = traj.span();
    if !(t > 0.0) || span < 3.0 * t * (1.0 - 1e-9) {
        return Err(Error::SpanTooShort { span, required: 3.0 * t });
    }
    let t0 = traj.samples[0].0;
    let n = ((span / t) * (1.0 + 1e-12)).floor();
    let x20 = traj.samples[0].1.x2;
    let v_est = (traj.x2_at(t0 + n * t) - x20) / (n * t);
    let resid = |s: f64| traj.x2_at(s) - v_est * (s - t0) - x20;
    let mut residual_sup: f64 = 0.0;
    let mut periodicity_defect: f64 = 0.0;
    for &(s, _) in &traj.samples {
        if s - t0 <= t {
            residual_sup = residual_sup.max(resid(s).abs());
        }
        if s - t0 + t <= span {
            periodicity_defect = periodicity_defect.max((resid(s + t) - resid(s)).abs());
        }
    }
    Ok(DriftDecomposition { v_est, residual_sup, periodicity_defect })
}

/// Steps per period used by [`poincare_shift`].
pub const SHIFT_STEPS: usize = 4000;

/// The `x₂` displacement accumulated over one period of the orbit with `ξ₂ = xi2`.
pub fn poincare_shift(sym: &ModelSymbol, xi2: f64) -> Result<f64> {
    let crit = find_kstar(sym)?;
    if (xi2 - crit.kstar).abs() > 0.1 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "poincare_shift needs |xi2 - k*| <= 0.1 (k* = {})",
            crit.kstar
        )));
    }
    let t = period(sym, xi2)?;
    let start = orbit_start(sym, xi2)?;
    let traj = integrate_trajectory(sym, start, t, t / SHIFT_STEPS as f64)?;
    Ok(traj.last().x2 - start.x2)
}

/// Least-squares slope of `ξ₂(t)`.
pub fn xi2_slope(traj: &Trajectory) -> f64 {
    let ts: Vec<f64> = traj.samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = traj.samples.iter().map(|s| s.1.xi2).collect();
    linear_fit(&ts, &ys).1
}
