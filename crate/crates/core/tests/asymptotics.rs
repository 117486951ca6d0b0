use std::f64::consts::PI;
use std::sync::Arc;

use degmag_core::asymptotics::*;
use degmag_core::dynamics::{find_kstar, ModelSymbol, Parity};
use degmag_core::spectrum1d::{build_operator_with, n0, GridConfig, ReducedSymbol};
use degmag_core::Error;

fn strip(nu: u32, mu: f64, h: f64, w: f64) -> f64 {
    let fp = FieldParams::new(nu, Parity::Even, mu, h).unwrap();
    emw0_strip_integral(&fp, &PotentialProfile::constant(w), 0.0, 0.0)
}

#[test]
fn density_vanishes_on_the_line_and_below_threshold() {
    let fp = FieldParams::new(2, Parity::Even, 100.0, 0.01).unwrap();
    let prof = PotentialProfile::constant(1.0);
    assert_eq!(emw_density(0.0, 0.0, 0.0, &fp, &prof), 0.0);
    assert_eq!(emw_density(0.05, 0.0, -0.6, &fp, &prof), 0.0);
}

#[test]
fn density_counts_active_levels() {
    let fp = FieldParams::new(2, Parity::Even, 100.0, 0.01).unwrap();
    let d = emw_density(0.05, 0.0, 0.0, &fp, &PotentialProfile::constant(1.0));
    let per_level = 100.0 * 0.05 / (2.0 * PI * 0.01);
    assert!((d / per_level - 10.0).abs() < 1e-12);
}

#[test]
fn density_reduces_to_lowest_level_in_strong_field() {
    let fp = FieldParams::new(3, Parity::Odd, 1e4, 0.01).unwrap();
    let prof = PotentialProfile::constant(1.0);
    for x1 in [0.5, -0.8, 1.3] {
        let b = 1e4 * 0.01 * x1 * x1;
        let single = 1e4 * x1 * x1 / (2.0 * PI * 0.01);
        let above = 0.5 * (1.5 * b - 1.0);
        assert!((emw_density(x1, 0.0, above, &fp, &prof) - single).abs() <= 1e-12 * single);
        let below = 0.5 * (0.9 * b - 1.0);
        assert_eq!(emw_density(x1, 0.0, below, &fp, &prof), 0.0);
    }
}

#[test]
fn strip_integral_matches_direct_quadrature() {
    // piecewise quadrature in x₁ between level thresholds, partial sums
    // over levels extrapolated in the level cut-off
    let a = strip(2, 1e4, 1e-3, 1.0);
    assert!((a / 19634.954084936207740 - 1.0).abs() < 1e-8, "{a}");
    let b = strip(3, 100.0, 0.01, 1.5);
    assert!((b / 3291.8042387076821 - 1.0).abs() < 1e-8, "{b}");
}

#[test]
fn strip_integral_is_homogeneous_in_w() {
    for nu in [2u32, 3, 4] {
        let p = nu as f64 / (nu as f64 - 1.0);
        let r = strip(nu, 50.0, 0.02, 2.6) / strip(nu, 50.0, 0.02, 1.3);
        assert!((r / 2f64.powf(p) - 1.0).abs() < 1e-13);
    }
    assert!(strip(2, 50.0, 0.02, 1e-300) < 1e-290);
}

#[test]
fn field_params_round_trip() {
    let a = FieldParams::from_hbar(2, Parity::Even, 0.05, 0.1).unwrap();
    let b = FieldParams::new(2, Parity::Even, a.mu, a.h).unwrap();
    assert!((b.hbar / 0.05 - 1.0).abs() < 1e-14);
    assert!((b.gamma_bar / 0.1 - 1.0).abs() < 1e-14);
    assert!((a.gamma_bar * a.mu.powf(0.5) - 1.0).abs() < 1e-14);
    assert!((a.gamma_bar_1 - 1.0 / (a.mu * a.h)).abs() < 1e-12 * a.gamma_bar_1);
    assert!(a.in_working_regime());
    assert!(FieldParams::new(1, Parity::Even, 1.0, 1.0).is_err());
    assert!(FieldParams::from_hbar(2, Parity::Even, -1.0, 0.1).is_err());
}

#[test]
fn g_is_periodic() {
    for t in [0.1, 0.37, 0.9] {
        assert!((sawtooth_g(t + 1.0) - sawtooth_g(t)).abs() < 1e-8);
        assert!((sawtooth_g(t - 3.0) - sawtooth_g(t)).abs() < 1e-8);
    }
}

fn gk_period(f: impl Fn(f64) -> f64 + Copy) -> f64 {
    use degmag_core::numeric::quad::gauss_kronrod;
    gauss_kronrod(f, 0.0, 0.5, 1e-12, 1e-14).value + gauss_kronrod(f, 0.5, 1.0, 1e-12, 1e-14).value
}

#[test]
fn g_has_zero_mean() {
    assert!(gk_period(sawtooth_g).abs() < 1e-6);
}

#[test]
fn g_at_zero_matches_closed_form_and_cesaro_oracle() {
    // (√2/2π)(1 − 2^{−½})ζ(3/2)
    let closed = 0.17221858762920535;
    assert!((sawtooth_g(0.0) - closed).abs() < 1e-10);
    let brute = sawtooth_g_cesaro(0.0, 2000.0, 4000.0, 200);
    assert!((sawtooth_g(0.0) - brute).abs() < 1e-6, "{brute}");
}

#[test]
fn g_cesaro_oracle_away_from_zero() {
    for t in [0.23, 0.61] {
        let brute = sawtooth_g_cesaro(t, 2000.0, 4000.0, 200);
        assert!((sawtooth_g(t) - brute).abs() < 1e-6, "t {t}");
    }
}

#[test]
fn g_is_not_identically_zero() {
    let max = (0..=200).map(|i| sawtooth_g(i as f64 / 200.0).abs()).fold(0.0, f64::max);
    assert!(max >= 0.01);
}

#[test]
fn g1_is_periodic_with_zero_mean() {
    for t in [0.1, 0.37, 0.9] {
        assert!((sawtooth_g1(t + 1.0) - sawtooth_g1(t)).abs() < 1e-6);
    }
    assert!(gk_period(sawtooth_g1).abs() < 1e-6);
}

#[test]
fn g1_at_zero() {
    assert!((sawtooth_g1(0.0) + 0.0310652229).abs() < 1e-9);
}

#[test]
fn n0_integral_matches_grid_sum() {
    let hbar = 0.3;
    let measure = n0_measure(2, Parity::Even, hbar, 1.0).unwrap();
    let model = ModelSymbol::new(2.0, Parity::Even).unwrap();
    let cfg = GridConfig { resolution: 40.0, ..GridConfig::default() };
    let d = 2e-4;
    let (lo, hi) = (-1.2, 8.0);
    let steps = ((hi - lo) / d) as usize;
    let mut sum = 0usize;
    for i in 0..steps {
        let xi2 = lo + (i as f64 + 0.5) * d;
        let op = build_operator_with(&ReducedSymbol::new(model, xi2, hbar, 1.0).unwrap(), 0.5, &cfg).unwrap();
        sum += op.count_below(0.0);
    }
    let riemann = sum as f64 * d;
    assert!((riemann / measure - 1.0).abs() < 1e-4, "{riemann} vs {measure}");
}

#[test]
fn level_intervals_reproduce_pointwise_counts() {
    let hbar = 0.2;
    let parts = level_intervals(2, Parity::Even, hbar, 1.0).unwrap();
    let model = ModelSymbol::new(2.0, Parity::Even).unwrap();
    for i in 0..60 {
        let xi2 = -1.1 + 0.1237 * i as f64;
        let c: usize = parts.iter().map(|p| p.count_at(xi2)).sum();
        let fd = n0(&ReducedSymbol::new(model, xi2, hbar, 1.0).unwrap()).unwrap().n0;
        assert_eq!(c, fd, "xi2 {xi2}");
    }
}

#[test]
fn periodic_strip_count_matches_integral() {
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.1, 0.1).unwrap();
    let model = ModelSymbol::new(2.0, Parity::Even).unwrap();
    // momenta 2πh m/L on a strip of length L
    let d = 0.02;
    let mut total = 0usize;
    let mut zero_run = 0.0;
    let mut m = (-1.2 / d) as i64;
    loop {
        let xi2 = m as f64 * d;
        let c = n0(&ReducedSymbol::new(model, xi2, fp.hbar, 1.0).unwrap()).unwrap().n0;
        total += c;
        zero_run = if c == 0 { zero_run + d } else { 0.0 };
        if xi2 > 5.0 && zero_run > 1.0 {
            break;
        }
        m += 1;
    }
    let strip = total as f64 * d / (2.0 * PI * fp.h);
    let exact = n0_xi2_integral(&fp, 1.0).unwrap();
    assert!((strip / exact - 1.0).abs() < 0.02, "{strip} vs {exact}");
}

#[test]
fn n0_integral_vanishes_for_large_hbar() {
    assert_eq!(n0_measure(2, Parity::Even, 5.0, 1.0).unwrap(), 0.0);
    let fp = FieldParams::from_hbar(2, Parity::Even, 5.0, 0.1).unwrap();
    let rep = corr_exact(&fp, 1.0).unwrap();
    assert_eq!(rep.n0_integral, 0.0);
    assert_eq!(rep.corr_exact, -rep.emw0_integral);
}

#[test]
fn correction_report_identity() {
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.05, 0.1).unwrap();
    let rep = corr_exact(&fp, 1.0).unwrap();
    assert_eq!(rep.corr_exact, rep.n0_integral - rep.emw0_integral);
    assert!((rep.kstar - 0.6522295).abs() < 1e-6);
    assert!(rep.kappa1.abs() <= 0.5);
}

#[test]
fn leading_term_tracks_exact_correction() {
    for hbar in [0.1, 0.05] {
        let fp = FieldParams::from_hbar(2, Parity::Even, hbar, 0.1).unwrap();
        let rep = corr_exact(&fp, 1.0).unwrap();
        let r = fp.h * (rep.corr_exact - rep.corr_leading).abs();
        assert!(r < 1e-4, "hbar {hbar}: {r}");
    }
}

#[test]
fn leading_term_is_periodic_in_action() {
    let fp = FieldParams::from_hbar(3, Parity::Odd, 0.07, 0.1).unwrap();
    let crit = find_kstar(&ModelSymbol::new(3.0, Parity::Odd).unwrap()).unwrap();
    let mut shifted = crit;
    shifted.s0 += 2.0 * PI * fp.hbar;
    let a = corr_leading(&fp, 1.0, &crit).unwrap();
    let b = corr_leading(&fp, 1.0, &shifted).unwrap();
    assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
    assert!(matches!(corr_leading(&fp, 0.0, &crit), Err(Error::InvalidParameter(_))));
}

#[test]
fn leading_term_w_scaling() {
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.1, 0.1).unwrap();
    let crit = find_kstar(&ModelSymbol::new(2.0, Parity::Even).unwrap()).unwrap();
    let w: f64 = 1.4;
    let t = -crit.s0 * w.powf(0.75) / (2.0 * PI * fp.hbar);
    let expect = (2.0 * PI).powf(-0.5) / fp.h * fp.hbar.sqrt() / crit.kappa.sqrt() * w.powf(0.125) * sawtooth_g(t);
    assert!((corr_leading(&fp, w, &crit).unwrap() - expect).abs() < 1e-12 * expect.abs());
}

fn sin_profile() -> PotentialProfile {
    PotentialProfile::bump(Arc::new(|x: f64| 1.0 + 0.3 * x.sin()), 0.0, 1.0)
}

#[test]
fn counting_density_separates_for_constant_w() {
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.3, 0.1).unwrap();
    let prof = PotentialProfile::bump(Arc::new(|_| 1.0), 0.0, 1.0);
    let a = counting_density(&fp, &prof).unwrap();
    let b = psi_mass(&prof) * n0_xi2_integral(&fp, 1.0).unwrap();
    assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn counting_density_is_monotone_in_w() {
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.3, 0.1).unwrap();
    let base = counting_density(&fp, &sin_profile()).unwrap();
    for d in [0.01, 0.1] {
        let up = PotentialProfile::bump(Arc::new(move |x: f64| 1.0 + d + 0.3 * x.sin()), 0.0, 1.0);
        assert!(counting_density(&fp, &up).unwrap() >= base);
    }
}

#[test]
fn counting_density_matches_double_riemann_sum() {
    // 200 x₂ cells times δξ₂ = 0.005 finite-difference counts
    let fp = FieldParams::from_hbar(2, Parity::Even, 0.3, 0.1).unwrap();
    let v = counting_density(&fp, &sin_profile()).unwrap();
    assert!((v / 32.68733 - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn scaling_table_columns() {
    let rows = scaling_experiment(2, Parity::Even, &[0.1, 0.05, 0.025], 0.1).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r.corr_exact, r.n0_integral - r.emw0_integral);
        assert_eq!(r.residual, r.corr_exact - r.corr_leading);
        assert!((r.h - 0.1 * r.hbar).abs() < 1e-15);
    }
    let norms: Vec<f64> = rows.iter().map(|r| r.corr_norm).collect();
    let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo <= 2.0, "{norms:?}");
}

#[test]
fn scaling_rejects_large_hbar() {
    assert!(matches!(
        scaling_experiment(2, Parity::Even, &[0.1, 0.5], 0.1),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn landau_measure_matches_strip_integral() {
    let fp = FieldParams::from_hbar(3, Parity::Odd, 0.07, 0.2).unwrap();
    let via = landau_measure(3, fp.hbar, 1.3) / (2.0 * PI * fp.h);
    let direct = emw0_strip_integral(&fp, &PotentialProfile::constant(1.3), 0.0, 0.0);
    assert!((via / direct - 1.0).abs() < 1e-12);
}
