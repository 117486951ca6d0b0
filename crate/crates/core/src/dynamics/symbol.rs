use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry class of the degeneration profile `ϱ_ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `ϱ_ν(x) = |x|^ν`
    Even,
    /// `ϱ_ν(x) = |x|^ν sign x`
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// Pilot-model Hamiltonian `½(ξ₁² + (ξ₂ − μϱ_ν(x₁)/ν)² − V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSymbol {
    pub nu: f64,
    pub parity: Parity,
    pub mu: f64,
}

impl ModelSymbol {
    pub fn new(nu: f64, parity: Parity) -> Result<Self> {
        Self::with_mu(nu, parity, 1.0)
    }

    pub fn with_mu(nu: f64, parity: Parity, mu: f64) -> Result<Self> {
        if !(nu >= 2.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be >= 2, got {nu}")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be > 0, got {mu}")));
        }
        Ok(Self { nu, parity, mu })
    }

    /// `ϱ_ν(x) / ν`
    pub fn rho_over_nu(&self, x: f64) -> f64 {
        let r = x.abs().powf(self.nu) / self.nu;
        match self.parity {
            Parity::Even => r,
            Parity::Odd => r.copysign(x),
        }
    }

    /// `ϱ_ν'(x) / ν`
    pub fn drho_over_nu(&self, x: f64) -> f64 {
        let r = x.abs().powf(self.nu - 1.0);
        match self.parity {
            Parity::Even => r.copysign(x),
            Parity::Odd => r,
        }
    }

    /// `ξ₂ − μϱ_ν(x₁)/ν`, the kinetic momentum `p₂`.
    pub fn p2(&self, x1: f64, xi2: f64) -> f64 {
        xi2 - self.mu * self.rho_over_nu(x1)
    }

    pub fn is_integer_nu(&self) -> bool {
        self.nu.fract() == 0.0
    }
}

/// A point `(x₁, x₂, ξ₁, ξ₂)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x1: f64,
    pub x2: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl PhasePoint {
    pub fn new(x1: f64, x2: f64, xi1: f64, xi2: f64) -> Self {
        Self { x1, x2, xi1, xi2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.xi1.is_finite() && self.xi2.is_finite()
    }
}

pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `½(ξ₁² + σ²(ξ₂ − μφϱ_ν/ν)² − V)` with coefficients depending on `(x₁, x₂)`.
#[derive(Clone)]
pub struct GeneralSymbol {
    pub base: ModelSymbol,
    pub sigma: Coefficient,
    pub phi: Coefficient,
    pub v: Coefficient,
}

impl fmt::Debug for GeneralSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralSymbol").field("base", &self.base).finish_non_exhaustive()
    }
}

impl GeneralSymbol {
    /// The pilot model itself with `σ = φ = 1` and the given potential.
    pub fn pilot_with_potential(base: ModelSymbol, v: Coefficient) -> Self {
        Self { base, sigma: Arc::new(|_, _| 1.0), phi: Arc::new(|_, _| 1.0), v }
    }

    /// Checks `σ, φ ≥ eps0` on a sample grid of the box `[-r1, r1] × [-r2, r2]`.
    pub fn check_positive(&self, r1: f64, r2: f64, eps0: f64) -> Result<()> {
        let n = 21;
        for i in 0..n {
            for j in 0..n {
                let x1 = -r1 + 2.0 * r1 * i as f64 / (n - 1) as f64;
                let x2 = -r2 + 2.0 * r2 * j as f64 / (n - 1) as f64;
                let s = (self.sigma)(x1, x2);
                let p = (self.phi)(x1, x2);
                if !(s >= eps0 && p >= eps0) {
                    return Err(Error::InvalidParameter(format!(
                        "sigma/phi below {eps0} at ({x1}, {x2})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Anything with a Hamiltonian flow that the trajectory integrator can advance.
pub trait Symbol: Sync {
    /// Hamiltonian value; `v_const` is the potential used by constant-coefficient models.
    fn energy(&self, p: &PhasePoint, v_const: f64) -> f64;

    /// One step of length `dt` of the integrator for this symbol.
    fn advance(&self, p: &mut PhasePoint, dt: f64) -> Result<()>;

    fn model(&self) -> &ModelSymbol;
}

/// Evaluates `a = ½(ξ₁² + σ²(ξ₂ − μφϱ_ν/ν)² − V)` at `p`.
pub fn eval_hamiltonian<S: Symbol + ?Sized>(sym: &S, p: &PhasePoint, v_const: f64) -> f64 {
    sym.energy(p, v_const)
}

impl Symbol for ModelSymbol {
    fn energy(&self, p: &PhasePoint, v_const: f64) -> f64 {
        let p2 = self.p2(p.x1, p.xi2);
        0.5 * (p.xi1 * p.xi1 + p2 * p2 - v_const)
    }

    fn advance(&self, p: &mut PhasePoint, dt: f64) -> Result<()> {
        // Yoshida triple jump of the position-Verlet step.
        let c = 2f64.cbrt();
        let w1 = 1.0 / (2.0 - c);
        let w0 = -c * w1;
        self.verlet(p, w1 * dt);
        self.verlet(p, w0 * dt);
        self.verlet(p, w1 * dt);
        Ok(())
    }

    fn model(&self) -> &ModelSymbol {
        self
    }
}

impl ModelSymbol {
    /// Drift–kick–drift. The kick is the exact flow of `½p₂²` at fixed `x₁`,
    /// which moves `ξ₁` and transports `x₂`; `ξ₂` is never touched.
    fn verlet(&self, p: &mut PhasePoint, h: f64) {
        p.x1 += 0.5 * h * p.xi1;
        let p2 = self.p2(p.x1, p.xi2);
        p.xi1 += h * p2 * self.mu * self.drho_over_nu(p.x1);
        p.x2 += h * p2;
        p.x1 += 0.5 * h * p.xi1;
    }
}

impl GeneralSymbol {
    fn gradient(&self, p: &PhasePoint) -> [f64; 4] {
        let m = &self.base;
        let d = |f: &Coefficient, x1: f64, x2: f64| -> (f64, f64, f64) {
            let h1 = 1e-6 * x1.abs().max(1.0);
            let h2 = 1e-6 * x2.abs().max(1.0);
            (
                f(x1, x2),
                (f(x1 + h1, x2) - f(x1 - h1, x2)) / (2.0 * h1),
                (f(x1, x2 + h2) - f(x1, x2 - h2)) / (2.0 * h2),
            )
        };
        let (s, s1, s2) = d(&self.sigma, p.x1, p.x2);
        let (f, f1, f2) = d(&self.phi, p.x1, p.x2);
        let (_, v1, v2) = d(&self.v, p.x1, p.x2);
        let r = m.rho_over_nu(p.x1);
        let dr = m.drho_over_nu(p.x1);
        let p2 = p.xi2 - m.mu * f * r;
        // ∂a/∂x₁, ∂a/∂x₂, ∂a/∂ξ₁, ∂a/∂ξ₂
        [
            s * s1 * p2 * p2 - s * s * p2 * m.mu * (f1 * r + f * dr) - 0.5 * v1,
            s * s2 * p2 * p2 - s * s * p2 * m.mu * f2 * r - 0.5 * v2,
            p.xi1,
            s * s * p2,
        ]
    }
}

impl Symbol for GeneralSymbol {
    fn energy(&self, p: &PhasePoint, _v_const: f64) -> f64 {
        let s = (self.sigma)(p.x1, p.x2);
        let f = (self.phi)(p.x1, p.x2);
        let p2 = p.xi2 - self.base.mu * f * self.base.rho_over_nu(p.x1);
        0.5 * (p.xi1 * p.xi1 + s * s * p2 * p2 - (self.v)(p.x1, p.x2))
    }

    /// Implicit midpoint rule solved by fixed-point iteration.
    fn advance(&self, p: &mut PhasePoint, dt: f64) -> Result<()> {
        let z0 = *p;
        let mut z = z0;
        for _ in 0..100 {
            let mid = PhasePoint::new(
                0.5 * (z0.x1 + z.x1),
                0.5 * (z0.x2 + z.x2),
                0.5 * (z0.xi1 + z.xi1),
                0.5 * (z0.xi2 + z.xi2),
            );
            let g = self.gradient(&mid);
            let next = PhasePoint::new(
                z0.x1 + dt * g[2],
                z0.x2 + dt * g[3],
                z0.xi1 - dt * g[0],
                z0.xi2 - dt * g[1],
            );
            let diff = (next.x1 - z.x1)
                .abs()
                .max((next.x2 - z.x2).abs())
                .max((next.xi1 - z.xi1).abs())
                .max((next.xi2 - z.xi2).abs());
            z = next;
            if diff <= 1e-15 * (1.0 + z.x1.abs().max(z.x2.abs()).max(z.xi1.abs()).max(z.xi2.abs())) {
                *p = z;
                return Ok(());
            }
        }
        if z.is_finite() {
            *p = z;
            Ok(())
        } else {
            Err(Error::NoConvergence("implicit midpoint iteration diverged".into()))
        }
    }

    fn model(&self) -> &ModelSymbol {
        &self.base
    }
}
