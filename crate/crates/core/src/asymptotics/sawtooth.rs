//! The sawtooth functions `G` and `G₁`.
//!
//! `G(t) = ∫_ℝ s(t + ½η²) dη` with `s(u) = u − ⌊u + ½⌋`. Between consecutive
//! jumps `η_m = √(2(m + ½ − t))` the integrand is a polynomial in `η`, so each
//! segment integrates exactly; the segment terms decay like `m^{−3/2}` and the
//! tail is summed through Hurwitz zeta values.

use std::f64::consts::SQRT_2;

use crate::numeric::quad::tanh_sinh;
use crate::numeric::special::hurwitz_zeta;

/// Segments summed directly before switching to the tail expansion.
const DIRECT_TERMS: i64 = 64;
const TAIL_ORDERS: usize = 12;

fn segment(t: f64, m: f64, a: f64, b: f64) -> f64 {
    (t - m) * (b - a) + (b * b * b - a * a * a) / 6.0
}

fn jump(t: f64, m: f64) -> f64 {
    (2.0 * (m + 0.5 - t)).max(0.0).sqrt()
}

/// `Σ_{m ≥ m0} term_m` through `term_m = 2^{−½} Σ_{j odd} C(−½, j) 2^{−j−1} (m − t)^{−½−j} / (j + 2)`.
fn tail(t: f64, m0: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 1..=2 * TAIL_ORDERS {
        binom *= (-0.5 - (j as f64 - 1.0)) / j as f64;
        if j % 2 == 1 {
            let s = 0.5 + j as f64;
            sum += binom * 0.5f64.powi(j as i32 + 1) / (j as f64 + 2.0) * hurwitz_zeta(s, m0 - t);
        }
    }
    sum / SQRT_2
}

/// `G(t)`, 1-periodic with zero mean.
pub fn sawtooth_g(t: f64) -> f64 {
    let m0 = (t + 0.5).floor();
    let mut acc = segment(t, m0, 0.0, jump(t, m0));
    let mut a = jump(t, m0);
    for i in 1..=DIRECT_TERMS {
        let m = m0 + i as f64;
        let b = jump(t, m);
        acc += segment(t, m, a, b);
        a = b;
    }
    acc += tail(t, m0 + DIRECT_TERMS as f64 + 1.0);
    2.0 * acc
}

fn integral_g(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    tanh_sinh(|x, _, _| sawtooth_g(x), a, b, 1e-12, 1e-14).value
}

/// `∫₀^f G` for `f ∈ [0, 1]`, split where `G` loses smoothness.
fn primitive_frac(f: f64) -> f64 {
    if f <= 0.5 {
        integral_g(0.0, f)
    } else {
        integral_g(0.0, 0.5) + integral_g(0.5, f)
    }
}

/// `∫₀¹ (1 − t) G(t) dt`.
pub fn g1_offset() -> f64 {
    let f = |x: f64, _: f64, _: f64| (1.0 - x) * sawtooth_g(x);
    tanh_sinh(f, 0.0, 0.5, 1e-12, 1e-14).value + tanh_sinh(f, 0.5, 1.0, 1e-12, 1e-14).value
}

/// `G₁(t) = ∫₀ᵗ G − ∫₀¹ (1 − t′) G(t′) dt′`, 1-periodic with zero mean.
pub fn sawtooth_g1(t: f64) -> f64 {
    let f = t - t.floor();
    primitive_frac(f) - g1_offset()
}

/// Brute-force `G(t)`: midpoint rule in `u = t + ½η²` with Cesàro averaging
/// of the partial integrals over `u ∈ [u_a, u_b]`, extrapolated in the cell size.
pub fn sawtooth_g_cesaro(t: f64, u_a: f64, u_b: f64, cells_per_unit: usize) -> f64 {
    let coarse = cesaro_midpoint(t, u_a, u_b, cells_per_unit);
    let fine = cesaro_midpoint(t, u_a, u_b, 2 * cells_per_unit);
    fine + (fine - coarse) / 3.0
}

fn cesaro_midpoint(t: f64, u_a: f64, u_b: f64, cells_per_unit: usize) -> f64 {
    let m0 = (t + 0.5).floor();
    // first smooth piece in η, then aligned cells in u from the first jump
    let eta0 = jump(t, m0);
    let n_eta = 4 * cells_per_unit;
    let d_eta = eta0 / n_eta as f64;
    let mut partial = 0.0;
    for i in 0..n_eta {
        let eta = (i as f64 + 0.5) * d_eta;
        let u = t + 0.5 * eta * eta;
        partial += (u - m0) * d_eta;
    }
    let du = 1.0 / cells_per_unit as f64;
    let start = m0 + 0.5;
    let f = |u: f64| {
        let s = u - (u + 0.5).floor();
        s / (2.0 * (u - t)).sqrt()
    };
    let cells_a = ((u_a - start) / du).round().max(0.0) as usize;
    let cells_b = ((u_b - start) / du).round().max(cells_a as f64 + 1.0) as usize;
    for i in 0..cells_a {
        partial += f(start + (i as f64 + 0.5) * du) * du;
    }
    // mean of F(U) over [A, B] = F(A) + ∫_A^B (B − u)/(B − A) f(u) du
    let a = start + cells_a as f64 * du;
    let b = start + cells_b as f64 * du;
    let mut weighted = 0.0;
    for i in cells_a..cells_b {
        let u = start + (i as f64 + 0.5) * du;
        weighted += (b - u) * f(u) * du;
    }
    2.0 * (partial + weighted / (b - a))
}
