//! Special functions needed for closed-form series.

// B_{2j} / (2j)! for j = 1..=10
const B2J_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// Hurwitz zeta function `ζ(s, a) = Σ_{k≥0} (a + k)^{-s}` for `s > 1`, `a > 0`.
///
/// Direct summation up to a shift `A ≥ 25`, then Euler–Maclaurin for the tail.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta requires s > 1, a > 0");
    let mut sum = 0.0;
    let mut x = a;
    while x < 25.0 {
        sum += x.powf(-s);
        x += 1.0;
    }
    sum + zeta_tail(s, x)
}

/// `Σ_{k≥0} (a + k)^{-s}` for large `a` by Euler–Maclaurin.
fn zeta_tail(s: f64, a: f64) -> f64 {
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times a^{-s-2j+1}
    let mut poch = s;
    let mut pw = a.powf(-s - 1.0);
    let a2 = a * a;
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        let term = c * poch * pw;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        poch *= (s + k + 1.0) * (s + k + 2.0);
        pw /= a2;
    }
    tail
}
