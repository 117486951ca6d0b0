use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::counting::{n0_measure, n0_xi2_integral};
use super::field::{emw0_strip_integral, landau_measure, FieldParams, PotentialProfile};
use super::sawtooth::sawtooth_g;
use crate::dynamics::{find_kstar, CriticalData, ModelSymbol, Parity};
use crate::error::{Error, Result};

/// `ħ` of the one-off run that fixes the phase constant `κ₁`.
pub const KAPPA1_CALIBRATION_HBAR: f64 = 0.2;
const KAPPA1_RANGE: f64 = 0.5;
const KAPPA1_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub emw0_integral: f64,
    pub n0_integral: f64,
    pub corr_exact: f64,
    pub corr_leading: f64,
    pub corr_leading_refined: f64,
    pub kappa1: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    pub kappa: f64,
    pub kstar: f64,
}

fn critical(fp: &FieldParams) -> Result<CriticalData> {
    find_kstar(&ModelSymbol::new(fp.nu_f64(), fp.parity)?)
}

/// `(2π)^{−½} h^{−1} ħ^{½} κ^{−½} W^{(ν−1)/(4ν)} · G(t)` at
/// `t = −S₀ W^{(ν+1)/(2ν)}/(2πħ) + κ₁ħ`.
pub fn corr_leading_shifted(fp: &FieldParams, w: f64, crit: &CriticalData, kappa1: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::InvalidParameter(format!("W must be positive, got {w}")));
    }
    let n = fp.nu_f64();
    let pref = (2.0 * PI).powf(-0.5) / fp.h * fp.hbar.sqrt() / crit.kappa.sqrt() * w.powf((n - 1.0) / (4.0 * n));
    let t = -crit.s0 * w.powf((n + 1.0) / (2.0 * n)) / (2.0 * PI * fp.hbar) + kappa1 * fp.hbar;
    Ok(pref * sawtooth_g(t))
}

/// Leading oscillatory part of the correction term.
pub fn corr_leading(fp: &FieldParams, w: f64, crit: &CriticalData) -> Result<f64> {
    corr_leading_shifted(fp, w, crit, 0.0)
}

/// Phase constant `κ₁` of the refined leading term from one calibration run
/// at `hbar`: the shift in `[−½, ½]` that best matches the exact correction.
pub fn calibrate_kappa1(fp: &FieldParams, w: f64, hbar: f64) -> Result<f64> {
    let crit = critical(fp)?;
    let cal = FieldParams::from_hbar(fp.nu, fp.parity, hbar, fp.gamma_bar)?;
    let target = (n0_measure(cal.nu, cal.parity, hbar, w)? - landau_measure(cal.nu, hbar, w)) / (2.0 * PI * cal.h);
    let steps = (KAPPA1_RANGE / KAPPA1_STEP).round() as i64;
    let mut best = (0.0f64, f64::INFINITY);
    for i in -steps..=steps {
        let k1 = i as f64 * KAPPA1_STEP;
        let r = (target - corr_leading_shifted(&cal, w, &crit, k1)?).abs();
        if r < best.1 || (r == best.1 && k1.abs() < best.0.abs()) {
            best = (k1, r);
        }
    }
    Ok(best.0)
}

/// Exact correction term with a given `κ₁` for the refined leading term.
pub fn corr_exact_with(fp: &FieldParams, w: f64, kappa1: f64) -> Result<CorrectionReport> {
    let crit = critical(fp)?;
    let prof = PotentialProfile::constant(w);
    let emw0_integral = emw0_strip_integral(fp, &prof, 0.0, 0.0);
    let n0_integral = n0_xi2_integral(fp, w)?;
    Ok(CorrectionReport {
        emw0_integral,
        n0_integral,
        corr_exact: n0_integral - emw0_integral,
        corr_leading: corr_leading(fp, w, &crit)?,
        corr_leading_refined: corr_leading_shifted(fp, w, &crit, kappa1)?,
        kappa1,
        s0: crit.s0,
        kappa: crit.kappa,
        kstar: crit.kstar,
    })
}

/// `(2πh)^{−1}∫n₀dξ₂ − ∫ℰ₀^MW dx₁` with its leading approximations.
pub fn corr_exact(fp: &FieldParams, w: f64) -> Result<CorrectionReport> {
    let kappa1 = calibrate_kappa1(fp, w, KAPPA1_CALIBRATION_HBAR)?;
    corr_exact_with(fp, w, kappa1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub hbar: f64,
    pub mu: f64,
    pub h: f64,
    pub n0_integral: f64,
    pub emw0_integral: f64,
    pub corr_exact: f64,
    pub corr_leading: f64,
    pub corr_leading_refined: f64,
    pub residual: f64,
    /// `h·|corr_exact|·ħ^{−1/2}`
    pub corr_norm: f64,
    /// `h·|residual|·ħ^{−1}`
    pub residual_norm: f64,
}

/// Correction term over a list of `ħ` at fixed `γ̄`, `W = 1`.
pub fn scaling_experiment(
    nu: u32,
    parity: Parity,
    hbar_list: &[f64],
    gamma_bar: f64,
) -> Result<Vec<ScalingRow>> {
    if let Some(bad) = hbar_list.iter().find(|&&hb| !(hb > 0.0 && hb <= 0.3)) {
        return Err(Error::InvalidParameter(format!("hbar must lie in (0, 0.3], got {bad}")));
    }
    let first = FieldParams::from_hbar(nu, parity, KAPPA1_CALIBRATION_HBAR, gamma_bar)?;
    let kappa1 = calibrate_kappa1(&first, 1.0, KAPPA1_CALIBRATION_HBAR)?;
    hbar_list
        .iter()
        .map(|&hbar| {
            let fp = FieldParams::from_hbar(nu, parity, hbar, gamma_bar)?;
            let rep = corr_exact_with(&fp, 1.0, kappa1)?;
            let residual = rep.corr_exact - rep.corr_leading;
            Ok(ScalingRow {
                hbar,
                mu: fp.mu,
                h: fp.h,
                n0_integral: rep.n0_integral,
                emw0_integral: rep.emw0_integral,
                corr_exact: rep.corr_exact,
                corr_leading: rep.corr_leading,
                corr_leading_refined: rep.corr_leading_refined,
                residual,
                corr_norm: fp.h * rep.corr_exact.abs() / hbar.sqrt(),
                residual_norm: fp.h * residual.abs() / hbar,
            })
        })
        .collect()
}
