use std::f64::consts::PI;

use degmag_core::dynamics::{action, find_kstar, loop_at_level, ModelSymbol, Parity};
use degmag_core::spectrum1d::shooting::count_below_shooting;
use degmag_core::spectrum1d::{
    bohr_sommerfeld, build_operator, build_operator_with, count_below, eigenfunction, eigenfunction_in_class,
    eigenvalues_in, gap_stats, kstar_hbar, lambda_curve, large_z_scaling, n0, projector_diag, refined_eigenvalues,
    residual, well_count, Block, GridConfig, ReducedSymbol, SymClass,
};
use degmag_core::Error;
use nalgebra::DMatrix;

fn sym(nu: f64, parity: Parity, xi2: f64, hbar: f64, w: f64) -> ReducedSymbol {
    ReducedSymbol::new(ModelSymbol::new(nu, parity).unwrap(), xi2, hbar, w).unwrap()
}

fn even2(xi2: f64, hbar: f64) -> ReducedSymbol {
    sym(2.0, Parity::Even, xi2, hbar, 1.0)
}

#[test]
fn box_covers_turning_points_with_clearance() {
    let s = even2(0.0, 0.1);
    let op = build_operator(&s, 0.5).unwrap();
    assert!(op.grid.x_max > 2f64.sqrt());
    assert!(s.potential(op.grid.x_max) >= 2.5);
    assert!(s.potential(op.grid.x_min) >= 2.5);
    let kmax = (2.0f64 * 1.5).sqrt();
    assert!(op.spacing() <= 0.1 / (10.0 * kmax));
    assert!(op.offdiag.iter().all(|&e| (e + 0.5 * 0.01 / (op.spacing() * op.spacing())).abs() < 1e-9 * e.abs()));
}

#[test]
fn refined_grid_halves_spacing() {
    let op = build_operator(&even2(0.0, 0.1), 0.5).unwrap();
    let fine = op.grid.refined();
    assert!((fine.spacing() - 0.5 * op.spacing()).abs() < 1e-15);
    assert_eq!((fine.x_min, fine.x_max), (op.grid.x_min, op.grid.x_max));
    assert!(fine.is_centred());
}

#[test]
fn grid_limit_is_reported() {
    let cfg = GridConfig { max_points: 100, ..GridConfig::default() };
    let err = build_operator_with(&even2(0.65, 0.05), 0.5, &cfg).unwrap_err();
    assert!(matches!(err, Error::ResourceLimit { limit: 100, .. }));
}

#[test]
fn nothing_below_gershgorin_bound() {
    let op = build_operator(&even2(0.65, 0.05), 0.5).unwrap();
    assert_eq!(count_below(&op, op.lower_bound()), 0);
    assert!(eigenvalues_in(&op, op.lower_bound() - 1.0, op.lower_bound()).unwrap().values.is_empty());
}

#[test]
fn sturm_count_matches_dense_diagonalisation() {
    let s = even2(0.65, 0.05);
    let cfg = GridConfig { resolution: 9.0, ..GridConfig::default() };
    let op = build_operator_with(&s, 0.5, &cfg).unwrap();
    let n = op.len();
    assert!(n <= 2000, "n = {n}");
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = op.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = op.offdiag[i];
            m[(i + 1, i)] = op.offdiag[i];
        }
    }
    let eig = m.symmetric_eigen().eigenvalues;
    let dense = eig.iter().filter(|&&l| l < 0.0).count();
    assert_eq!(count_below(&op, 0.0), dense);
    for tau in [-0.3, -0.1, 0.2, 0.45] {
        assert_eq!(count_below(&op, tau), eig.iter().filter(|&&l| l < tau).count());
    }
}

#[test]
fn counts_agree_with_listed_eigenvalues() {
    let op = build_operator(&even2(0.65, 0.05), 0.5).unwrap();
    let (a, b) = (-0.37, 0.21);
    let res = eigenvalues_in(&op, a, b).unwrap();
    assert_eq!(res.values.len(), count_below(&op, b) - count_below(&op, a));
    assert!(res.values.windows(2).all(|p| p[0] <= p[1]));
    assert!(res.values.iter().all(|&v| v >= a && v < b));
}

#[test]
fn refinement_error_is_second_order() {
    let s = even2(0.65, 0.05);
    let op = build_operator(&s, 0.2).unwrap();
    let fine = degmag_core::spectrum1d::ReducedOperator::on_grid(&s, op.grid.refined());
    let c = eigenvalues_in(&op, -0.2, 0.2).unwrap().values;
    let f = eigenvalues_in(&fine, -0.2, 0.2).unwrap().values;
    assert_eq!(c.len(), f.len());
    let dx2 = op.spacing() * op.spacing();
    let consts: Vec<f64> = c.iter().zip(&f).map(|(a, b)| (a - b).abs() / dx2).collect();
    let cmax = consts.iter().cloned().fold(0.0, f64::max);
    assert!(cmax < 20.0, "C = {cmax}");
}

#[test]
fn n0_vanishes_below_threshold() {
    let r = n0(&even2(-2.0, 0.3)).unwrap();
    assert_eq!(r.n0, 0);
    assert_eq!(r.n0_weyl, 0.0);
}

#[test]
fn n0_close_to_weyl_count() {
    let r = n0(&even2(0.65, 0.05)).unwrap();
    assert!((r.n0 as f64 - r.n0_weyl).abs() <= 2.0, "{r:?}");
}

#[test]
fn n0_nonincreasing_in_hbar() {
    let mut prev = usize::MAX;
    for i in 0..10 {
        let hbar = 0.03 + 0.03 * i as f64;
        let c = n0(&even2(0.65, hbar)).unwrap().n0;
        assert!(c <= prev, "hbar {hbar}: {c} > {prev}");
        prev = c;
    }
}

#[test]
fn weyl_area_matches_action() {
    let m = ModelSymbol::new(2.0, Parity::Even).unwrap();
    for xi2 in [-0.7, 0.0, 0.65, 1.5, 3.0] {
        let r = n0(&even2(xi2, 0.1)).unwrap();
        let s = well_count(&even2(xi2, 0.1), 0.0) as f64 * action(&m, xi2, 0.0).unwrap();
        assert!((r.n0_weyl * 2.0 * PI * 0.1 - s).abs() <= 1e-8 * s, "xi2 {xi2}");
    }
}

#[test]
fn weyl_area_scales_with_potential() {
    let m = ModelSymbol::new(3.0, Parity::Odd).unwrap();
    let (w, xi2) = (2.3, 0.4);
    let r = n0(&sym(3.0, Parity::Odd, xi2, 0.1, w)).unwrap();
    let s = w.powf(4.0 / 6.0) * action(&m, xi2 / w.sqrt(), 0.0).unwrap();
    assert!((r.s - s).abs() <= 1e-8 * s);
}

#[test]
fn spectrum_scales_with_potential() {
    let nu = 2.0;
    let (w, xi2, hbar) = (1.7, 0.5, 0.08);
    let cfg = GridConfig::default();
    let a = refined_eigenvalues(&sym(nu, Parity::Even, xi2, hbar, w), -0.3 * w, 0.2 * w, &cfg).unwrap();
    let scaled = sym(nu, Parity::Even, xi2 / w.sqrt(), hbar * w.powf(-(nu + 1.0) / (2.0 * nu)), 1.0);
    let b = refined_eigenvalues(&scaled, -0.3, 0.2, &cfg).unwrap();
    assert_eq!(a.values.len(), b.values.len());
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - w * y).abs() < 1e-6, "{x} vs {}", w * y);
    }
}

fn bs_fd_deviation(hbar: f64) -> f64 {
    let s = even2(0.65, hbar);
    let bs = bohr_sommerfeld(&s, -0.2, 0.2).unwrap().values;
    let fd = refined_eigenvalues(&s, -0.3, 0.3, &GridConfig::default()).unwrap().values;
    assert!(!bs.is_empty());
    bs.iter()
        .map(|b| fd.iter().map(|f| (f - b).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[test]
fn bohr_sommerfeld_converges_at_second_order() {
    let d1 = bs_fd_deviation(0.05);
    let d2 = bs_fd_deviation(0.025);
    assert!(d1 <= 0.01, "{d1}");
    let ratio = d1 / d2;
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bohr_sommerfeld_count_and_order() {
    let s = even2(0.65, 0.05);
    // two-well levels below the touching level, one-well levels above it
    let touch = 0.5 * (0.65f64 * 0.65 - 1.0);
    let low = bohr_sommerfeld(&s, -0.5, touch - 1e-6).unwrap().values;
    let high = bohr_sommerfeld(&s, touch + 1e-6, 0.0).unwrap().values;
    let c = n0(&s).unwrap().n0;
    assert!(((low.len() + high.len()) as i64 - c as i64).abs() <= 1);
    assert!(high.windows(2).all(|p| p[0] < p[1]));
    let m = bohr_sommerfeld(&even2(-0.3, 0.05), -1.0, 0.0).unwrap().values;
    assert!(m.windows(2).all(|p| p[0] < p[1]));
    assert!((m.len() as i64 - n0(&even2(-0.3, 0.05)).unwrap().n0 as i64).abs() <= 1);
}

#[test]
fn bohr_sommerfeld_rejects_window_through_touching_level() {
    let s = even2(0.65, 0.05);
    // ξ₂² = W + 2τ at τ = (0.4225 − 1)/2
    let err = bohr_sommerfeld(&s, -0.35, -0.25).unwrap_err();
    assert!(matches!(err, Error::WindowInvalid { .. }));
}

#[test]
fn bohr_sommerfeld_doubles_two_well_levels() {
    let bs = bohr_sommerfeld(&even2(3.0, 0.1), -0.5, 0.0).unwrap();
    assert_eq!(bs.values.len() % 2, 0);
    assert!(bs.values.chunks(2).all(|p| p[0] == p[1]));
}

#[test]
fn eigenfunctions_are_normalised_symmetric_and_decaying() {
    let s = even2(0.0, 0.1);
    let op = build_operator(&s, 0.5).unwrap();
    let vals = eigenvalues_in(&op, -1.0, 0.3).unwrap().values;
    assert!(vals.len() >= 4);
    let n = op.len();
    for &lam in &vals {
        let u = eigenfunction(&op, lam).unwrap();
        let norm: f64 = u.iter().map(|t| t * t).sum::<f64>() * op.spacing();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!(residual(&op, &u, lam) <= 1e-8);
        let max = u.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        assert!(u[0].abs() <= 1e-6 * max && u[n - 1].abs() <= 1e-6 * max);
        let even = (0..n).all(|i| (u[i] - u[n - 1 - i]).abs() <= 1e-6 * max);
        let odd = (0..n).all(|i| (u[i] + u[n - 1 - i]).abs() <= 1e-6 * max);
        assert!(even ^ odd, "lambda {lam}");
    }
}

#[test]
fn class_eigenfunction_in_two_well_regime() {
    let s = even2(3.0, 0.1);
    let op = build_operator(&s, 0.5).unwrap();
    let lam = op.eigenvalue_by_index(0, Block::Class(SymClass::Odd));
    assert!(matches!(eigenfunction(&op, lam), Err(Error::NotIsolated { .. })));
    let u = eigenfunction_in_class(&op, lam, SymClass::Odd).unwrap();
    let n = op.len();
    assert!((0..n).all(|i| (u[i] + u[n - 1 - i]).abs() < 1e-12));
}

#[test]
fn projector_diagonal_integrates_to_count() {
    let s = even2(0.65, 0.1);
    let p = projector_diag(&s, 0.0).unwrap();
    let op = build_operator(&s, 0.0).unwrap();
    assert_eq!(p.count, count_below(&op, 0.0));
    assert!((p.integral() - p.count as f64).abs() <= 1e-8);
    assert!(p.density.iter().all(|&d| d >= 0.0));
    let empty = projector_diag(&s, -0.6).unwrap();
    assert_eq!(empty.count, 0);
    assert!(empty.density.iter().all(|&d| d == 0.0));
}

#[test]
fn shooting_counts_match_finite_differences() {
    for (nu, parity) in [(2.0, Parity::Even), (3.0, Parity::Odd)] {
        for xi2 in [-0.5, 0.3, 0.65, 1.4, 2.5] {
            for hbar in [0.2, 0.07] {
                let s = sym(nu, parity, xi2, hbar, 1.0);
                let op = build_operator(&s, 0.5).unwrap();
                for tau in [-0.2, 0.0, 0.1] {
                    let fd = count_below(&op, tau);
                    let sh = count_below_shooting(&s, tau).unwrap();
                    assert_eq!(fd, sh, "nu {nu} xi2 {xi2} hbar {hbar} tau {tau}");
                }
            }
        }
    }
}

#[test]
fn odd_spectrum_is_reflection_invariant() {
    let cfg = GridConfig::default();
    let a = refined_eigenvalues(&sym(3.0, Parity::Odd, 0.4, 0.1, 1.0), -0.5, 0.3, &cfg).unwrap().values;
    let b = refined_eigenvalues(&sym(3.0, Parity::Odd, -0.4, 0.1, 1.0), -0.5, 0.3, &cfg).unwrap().values;
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-8));
}

#[test]
fn same_class_spacing_follows_period() {
    let m = ModelSymbol::new(2.0, Parity::Even).unwrap();
    let hbar = 0.1;
    let s = even2(5.0, hbar);
    let res = refined_eigenvalues(&s, -0.45, 0.45, &GridConfig::default()).unwrap();
    for c in [SymClass::Even, SymClass::Odd] {
        let v = res.class_values(c);
        assert!(v.len() >= 3);
        for p in v.windows(2) {
            let tau = 0.5 * (p[0] + p[1]);
            let t = loop_at_level(&m, 5.0, 1.0 + 2.0 * tau).unwrap().period;
            let expect = 2.0 * PI * hbar / t;
            assert!(((p[1] - p[0]) / expect - 1.0).abs() < 0.05);
        }
    }
}

#[test]
fn curves_are_convex_near_kstar() {
    let k = find_kstar(&ModelSymbol::new(2.0, Parity::Even).unwrap()).unwrap().kstar;
    let s = even2(k, 0.2);
    let grid: Vec<f64> = (0..=40).map(|i| k - 0.4 + 0.02 * i as f64).collect();
    let cfg = GridConfig::default();
    let mut checked = 0;
    for class in [SymClass::Even, SymClass::Odd] {
        for j in 0..4 {
            let c = lambda_curve(&s, &grid, j, Some(class), 0.5, &cfg).unwrap();
            for i in 1..grid.len() - 1 {
                let d = (grid[i] - k).abs();
                if c.lambda[i].abs() < 0.1 && d < 0.3 {
                    assert!(c.d2[i] >= 0.1, "{class:?} {j} xi2 {}: {}", grid[i], c.d2[i]);
                    checked += 1;
                }
                if c.lambda[i].abs() <= 0.1 && d >= 0.2 {
                    assert_eq!(c.d1[i].signum(), (grid[i] - k).signum());
                }
            }
        }
    }
    assert!(checked > 10);
}

#[test]
fn outer_curves_grow_with_xi2() {
    let s = even2(2.0, 0.1);
    let cfg = GridConfig::default();
    let mut vals = Vec::new();
    for xi2 in [2.0, 3.0, 4.0, 5.0, 6.0] {
        let op = build_operator(&s.with_xi2(xi2), 0.5).unwrap();
        for class in [SymClass::Even, SymClass::Odd] {
            let b = Block::Class(class);
            for j in op.count_block(-0.3, b)..op.count_block(0.3, b) {
                let c = lambda_curve(&s, &[xi2 - 1e-3, xi2, xi2 + 1e-3], j, Some(class), 0.5, &cfg).unwrap();
                vals.push(xi2 * c.d1[1]);
            }
        }
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.1 && hi < 10.0, "[{lo}, {hi}]");
}

#[test]
fn crossing_between_parity_partners_is_detected() {
    let s = even2(4.0, 0.05);
    let err = lambda_curve(&s, &[4.0, 4.1, 4.2], 0, None, 0.5, &GridConfig::default()).unwrap_err();
    assert!(matches!(err, Error::CrossingDetected { index: 0, .. }));
}

#[test]
fn curve_rejects_bad_grids() {
    let s = sym(3.0, Parity::Odd, 0.0, 0.2, 1.0);
    let cfg = GridConfig::default();
    assert!(lambda_curve(&s, &[0.0, 0.1], 0, None, 0.5, &cfg).is_err());
    assert!(lambda_curve(&s, &[0.0, 0.2, 0.1], 0, None, 0.5, &cfg).is_err());
    assert!(lambda_curve(&s, &[0.0, 0.1, 0.2], 0, Some(SymClass::Even), 0.5, &cfg).is_err());
}

#[test]
fn quantum_critical_momentum_is_near_classical() {
    let k = find_kstar(&ModelSymbol::new(2.0, Parity::Even).unwrap()).unwrap().kstar;
    let s = even2(k, 0.1);
    let b = Block::Class(SymClass::Even);
    let j = build_operator(&s, 0.5).unwrap().count_block(0.0, b);
    let kh = kstar_hbar(&s, j, Some(SymClass::Even), 0.2, 1.0, &GridConfig::default()).unwrap();
    // the minimum of λ_j sits where ξ₂/√(W + 2λ_j) = k*
    let lam = build_operator(&s.with_xi2(kh), 0.5).unwrap().eigenvalue_by_index(j, b);
    assert!((kh - k * (1.0 + 2.0 * lam).sqrt()).abs() < 0.02, "{kh} {lam}");
}

#[test]
fn min_spacing_exponent_at_centre() {
    let rep = gap_stats(&even2(0.0, 0.1), &[0.0], &[0.2, 0.1, 0.05, 0.025], -0.5, 0.0).unwrap();
    let (_, e) = rep.exponents[0];
    assert!((e - 4.0 / 3.0).abs() <= 0.15, "{e}");
}

#[test]
fn min_spacing_is_of_order_hbar_in_one_well_zone() {
    let hs = [0.1, 0.05, 0.025];
    let rep = gap_stats(&even2(0.2, 0.1), &[0.2, 0.5, 0.8], &hs, -0.15, 0.15).unwrap();
    assert_eq!(rep.rows.len(), 9);
    for xi2 in [0.2, 0.5, 0.8] {
        let eps: Vec<f64> = rep.rows.iter().filter(|r| r.xi2 == xi2).map(|r| r.min_spacing / r.hbar).collect();
        let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eps.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.3 && hi / lo < 1.5, "xi2 {xi2}: {eps:?}");
    }
}

#[test]
fn two_well_rows_split_by_class() {
    let rep = gap_stats(&even2(3.0, 0.1), &[3.0], &[0.1], -0.5, 0.2).unwrap();
    assert_eq!(rep.rows.len(), 3);
    assert!(rep.rows[0].min_spacing < 1e-6);
    assert!(rep.rows[1].count >= 3 && rep.rows[2].count >= 3);
    assert!(rep.rows[1].min_spacing > 0.15 && rep.rows[2].min_spacing > 0.15);
}

#[test]
fn large_z_eigenvalues_stay_in_band() {
    let zs: Vec<f64> = (0..10).map(|i| 5.0 * 10f64.powf(i as f64 / 9.0)).collect();
    let samples = large_z_scaling(2, Parity::Even, &zs, 0.1).unwrap();
    assert!(samples.len() > 50);
    assert!(samples.iter().all(|s| s.lambda > 0.0));
    let lo = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    assert!(hi / lo <= 10.0, "[{lo}, {hi}]");
}
