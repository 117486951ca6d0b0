use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::Parity;
use crate::error::{Error, Result};
use crate::numeric::special::hurwitz_zeta;

/// Field strength and semiclassical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub nu: u32,
    pub parity: Parity,
    pub mu: f64,
    pub h: f64,
    pub hbar: f64,
    pub gamma_bar: f64,
    pub gamma_bar_1: f64,
}

impl FieldParams {
    /// From the physical pair `(μ, h)`.
    pub fn new(nu: u32, parity: Parity, mu: f64, h: f64) -> Result<Self> {
        check_nu(nu)?;
        if !(mu > 0.0 && h > 0.0) || !mu.is_finite() || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("need mu > 0 and h > 0, got {mu}, {h}")));
        }
        let n = nu as f64;
        Ok(Self {
            nu,
            parity,
            mu,
            h,
            hbar: mu.powf(1.0 / n) * h,
            gamma_bar: mu.powf(-1.0 / n),
            gamma_bar_1: (mu * h).powf(-1.0 / (n - 1.0)),
        })
    }

    /// From the rescaled pair `(ħ, γ̄)`: `μ = γ̄^{−ν}`, `h = ħγ̄`.
    pub fn from_hbar(nu: u32, parity: Parity, hbar: f64, gamma_bar: f64) -> Result<Self> {
        check_nu(nu)?;
        if !(hbar > 0.0 && gamma_bar > 0.0) || !hbar.is_finite() || !gamma_bar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need hbar > 0 and gamma_bar > 0, got {hbar}, {gamma_bar}"
            )));
        }
        let n = nu as f64;
        let mu = gamma_bar.powf(-n);
        let h = hbar * gamma_bar;
        Ok(Self {
            nu,
            parity,
            mu,
            h,
            hbar,
            gamma_bar,
            gamma_bar_1: (mu * h).powf(-1.0 / (n - 1.0)),
        })
    }

    pub fn nu_f64(&self) -> f64 {
        self.nu as f64
    }

    /// `1 ≤ μ` and `μ h^ν ≤ 1`.
    pub fn in_working_regime(&self) -> bool {
        self.mu >= 1.0 && self.mu * self.h.powi(self.nu as i32) <= 1.0
    }
}

fn check_nu(nu: u32) -> Result<()> {
    if nu < 2 {
        return Err(Error::InvalidParameter(format!("nu must be an integer >= 2, got {nu}")));
    }
    Ok(())
}

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Potential `W(x₂)` on the degeneration line and a cut-off `ψ(x₂)`.
#[derive(Clone)]
pub struct PotentialProfile {
    pub w: ProfileFn,
    pub psi: ProfileFn,
    /// Interval containing the support of `ψ`.
    pub support: (f64, f64),
}

impl fmt::Debug for PotentialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialProfile").field("support", &self.support).finish_non_exhaustive()
    }
}

impl PotentialProfile {
    pub fn constant(w: f64) -> Self {
        Self { w: Arc::new(move |_| w), psi: Arc::new(|_| 1.0), support: (0.0, 1.0) }
    }

    /// Smooth bump `exp(−1/(1 − s²))`, `s = (x − c)/r`, supported on `[c − r, c + r]`.
    pub fn bump(w: ProfileFn, centre: f64, radius: f64) -> Self {
        let psi: ProfileFn = Arc::new(move |x: f64| {
            let s = (x - centre) / radius;
            if s.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - s * s)).exp()
            }
        });
        Self { w, psi, support: (centre - radius, centre + radius) }
    }

    /// Tabulated `W` with linear interpolation (clamped outside the table).
    pub fn tabulated(xs: Vec<f64>, ws: Vec<f64>, psi: ProfileFn, support: (f64, f64)) -> Result<Self> {
        if xs.len() != ws.len() || xs.len() < 2 || xs.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidParameter("table must be strictly increasing with >= 2 rows".into()));
        }
        let w: ProfileFn = Arc::new(move |x: f64| {
            let i = xs.partition_point(|&v| v <= x);
            if i == 0 {
                return ws[0];
            }
            if i >= xs.len() {
                return ws[ws.len() - 1];
            }
            let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ws[i - 1] + t * (ws[i] - ws[i - 1])
        });
        Ok(Self { w, psi, support })
    }
}

/// Magnetic Weyl density of the pilot model at `(x₁, x₂)` and spectral level `τ`.
pub fn emw_density(x1: f64, x2: f64, tau: f64, fp: &FieldParams, prof: &PotentialProfile) -> f64 {
    let w = (prof.w)(x2);
    let f = x1.abs().powi(fp.nu as i32 - 1);
    let b = fp.mu * fp.h * f;
    let top = 2.0 * tau + w;
    if !(b > 0.0) || top <= b {
        return 0.0;
    }
    // levels n with (2n + 1) b < top
    let levels = ((top / b - 1.0) / 2.0).ceil().max(0.0);
    levels * fp.mu * f / (2.0 * PI * fp.h)
}

/// `∫ ℰ₀^MW dx₁` in closed form, one Landau level at a time.
///
/// Level `n` occupies `|x₁| < (W/((2n+1)μh))^{1/(ν−1)}`, which gives
/// `(πν)^{−1} μ^{−1/(ν−1)} h^{−1−p} Σ (W/(2n+1))^p` with `p = ν/(ν−1)`.
pub fn emw0_strip_integral(fp: &FieldParams, prof: &PotentialProfile, x2: f64, tau: f64) -> f64 {
    let w = 2.0 * tau + (prof.w)(x2);
    if !(w > 0.0) {
        return 0.0;
    }
    let n = fp.nu_f64();
    let p = n / (n - 1.0);
    let sum = odd_power_sum(p) * w.powf(p);
    (fp.mu).powf(-1.0 / (n - 1.0)) * fp.h.powf(-1.0 - p) * sum / (PI * n)
}

/// `Σ_{n≥0} (2n+1)^{−p} = 2^{−p} ζ(p, ½)`.
pub fn odd_power_sum(p: f64) -> f64 {
    2f64.powf(-p) * hurwitz_zeta(p, 0.5)
}

/// Landau-level counting term `(2/ν) ħ^{−p} Σ (W/(2n+1))^p` of `∫ n₀ dξ₂`.
pub fn landau_measure(nu: u32, hbar: f64, w: f64) -> f64 {
    let n = nu as f64;
    let p = n / (n - 1.0);
    (2.0 / n) * hbar.powf(-p) * w.powf(p) * odd_power_sum(p)
}
