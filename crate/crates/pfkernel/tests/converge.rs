mod common;

use common::c;
use num_complex::Complex64;
use pfkernel::converge::{
    deviation, fit_exponent, fit_rate, profile, write_profile_csv, Family, GridLine, DEFAULT_LADDER, NOISE_FLOOR,
};
use pfkernel::limit_kernel::UniversalityClass;
use proptest::prelude::*;

/// Fig. 5 probe points in library orientation (x measured along the outward normal).
fn ah_edge_point() -> Complex64 {
    c(-2.0, 0.7)
}

fn wall_point() -> Complex64 {
    c(-1.0, 1.0)
}

#[test]
fn families_map_to_classes_and_specs() {
    let f = Family::AHEdge { c: 1.0 };
    assert_eq!(f.class().unwrap(), UniversalityClass::AHEdge { c: 1.0 });
    let s = f.spec(54).unwrap();
    assert!((s.tau().unwrap() - (1.0 - 1.0 / 108f64.cbrt())).abs() < 1e-15);
    assert!((s.p - 2f64.sqrt() * (1.0 + s.tau().unwrap())).abs() < 1e-15);
    let s = Family::AHBulk { c: 2.0, p: 0.5 }.spec(100).unwrap();
    assert!((s.tau().unwrap() - 0.98).abs() < 1e-15 && s.p == 0.5);
    assert!((Family::Hard { rho: 0.5 }.spec(10).unwrap().p - 0.5 * 2f64.sqrt()).abs() < 1e-15);
    assert!(Family::AHEdge { c: 3.0 }.spec(10).is_err());
    assert!(Family::Hard { rho: 1.5 }.spec(10).is_err());
}

#[test]
fn deviation_vanishes_on_the_real_line() {
    for fam in [Family::SoftHard, Family::Hard { rho: 0.5 }, Family::AHEdge { c: 1.0 }] {
        assert_eq!(deviation(&fam, c(-1.0, 0.0), 50).unwrap(), 0.0);
    }
}

#[test]
fn soft_hard_deviation_decreases() {
    let a = deviation(&Family::SoftHard, wall_point(), 50).unwrap();
    let b = deviation(&Family::SoftHard, wall_point(), 200).unwrap();
    assert!(b.abs() < a.abs(), "{a} {b}");
}

#[test]
fn ah_bulk_two_point_rate() {
    // even N at p = 0; the deviation is O(N^{-1/2}) so a 4× step shrinks it by ≈ 2
    let fam = Family::AHBulk { c: 1.0, p: 0.0 };
    let a = deviation(&fam, c(0.0, 0.5), 100).unwrap();
    let b = deviation(&fam, c(0.0, 0.5), 400).unwrap();
    let ratio = a / b;
    assert!((1.0..=4.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rate_soft_hard() {
    let fit = fit_rate(&Family::SoftHard, wall_point(), &DEFAULT_LADDER).unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.15, "{fit:?}");
    assert!(fit.excluded.is_empty() && fit.warnings.is_empty());
}

#[test]
fn rate_hard() {
    let fit = fit_rate(&Family::Hard { rho: 0.5 }, wall_point(), &DEFAULT_LADDER).unwrap();
    assert!((fit.exponent - 0.75).abs() < 0.15, "{fit:?}");
}

#[test]
fn rate_ah_edge() {
    let fit = fit_rate(&Family::AHEdge { c: 1.0 }, ah_edge_point(), &DEFAULT_LADDER).unwrap();
    assert!((fit.exponent - 1.0 / 3.0).abs() < 0.15, "{fit:?}");
}

#[test]
fn rates_are_stable_when_dropping_the_smallest_n() {
    for (fam, z) in [
        (Family::SoftHard, wall_point()),
        (Family::Hard { rho: 0.5 }, wall_point()),
        (Family::AHEdge { c: 1.0 }, ah_edge_point()),
    ] {
        let full = fit_rate(&fam, z, &[50, 100, 200, 400, 800]).unwrap();
        let tail = fit_exponent(&full.n_values[1..], &full.deviations[1..]).unwrap();
        assert!((full.exponent - tail.exponent).abs() < 0.1, "{} {} {}", fam.name(), full.exponent, tail.exponent);
    }
}

#[test]
fn fit_recovers_exact_power_laws() {
    let ns = [10usize, 20, 40, 80];
    let devs: Vec<f64> = ns.iter().map(|&n| -3.0 * (n as f64).powf(-0.6)).collect();
    let fit = fit_exponent(&ns, &devs).unwrap();
    assert!((fit.exponent - 0.6).abs() < 1e-12);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    assert!(fit.residual_rms < 1e-12);
}

#[test]
fn fit_excludes_noise_and_needs_three_points() {
    let ns = [10usize, 20, 40, 80];
    let fit = fit_exponent(&ns, &[1e-2, 5e-3, 2.5e-3, 0.1 * NOISE_FLOOR]).unwrap();
    assert_eq!(fit.excluded, vec![80]);
    assert_eq!(fit.n_values, vec![10, 20, 40]);
    assert!((fit.exponent - 1.0).abs() < 1e-12);
    assert!(!fit.warnings.is_empty());
    assert!(fit_exponent(&ns, &[1e-2, 0.0, 1e-13, 2.5e-3]).is_err());
    assert!(fit_rate(&Family::SoftHard, wall_point(), &[50, 100, 200]).is_err());
}

proptest! {
    #[test]
    fn fit_is_invariant_under_scaling(scale in 1e-6f64..1e6, devs in proptest::collection::vec(1e-6f64..1.0, 4)) {
        let ns = [50usize, 100, 200, 400];
        let a = fit_exponent(&ns, &devs).unwrap();
        let scaled: Vec<f64> = devs.iter().map(|d| d * scale).collect();
        let b = fit_exponent(&ns, &scaled).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
    }
}

#[test]
fn profile_on_the_real_axis_is_zero() {
    let line = GridLine::Horizontal { y: 0.0, x0: -3.0, x1: 0.0, count: 7 };
    for p in profile(&Family::SoftHard, 0.5, 100, &line).unwrap() {
        assert_eq!(p.scaled, 0.0);
    }
}

#[test]
fn soft_hard_profile_stays_bounded() {
    let line = GridLine::Horizontal { y: 1.0, x0: -4.0, x1: 0.0, count: 21 };
    let max = |n| profile(&Family::SoftHard, 0.5, n, &line).unwrap().iter().map(|p| p.scaled.abs()).fold(0.0, f64::max);
    let (a, b) = (max(100), max(200));
    assert!(a.is_finite() && a > 0.0);
    assert!(b < 1.5 * a, "{a} {b}");
}

#[test]
fn ah_edge_vertical_profile_shape() {
    let line = GridLine::Vertical { x: -2.0, y0: 0.0, y1: 2.0, count: 33 };
    let prof = profile(&Family::AHEdge { c: 1.0 }, 1.0 / 3.0, 64, &line).unwrap();
    assert_eq!(prof.len(), 33);
    assert!(prof.iter().all(|p| p.scaled.is_finite()));
    let mut out = Vec::new();
    write_profile_csv(&mut out, &prof).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 34);
    assert!(text.starts_with("x,y,finite,limit,scaled\n"));
}

#[test]
fn rate_fit_csv_and_json() {
    let fit = fit_exponent(&[10, 20, 40, 80], &[0.1, 0.05, 0.025, 0.0125]).unwrap();
    let mut out = Vec::new();
    fit.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 80.0);
    assert!((last[2] - 1.0).abs() < 1e-12);
    let json = serde_json::to_string(&fit).unwrap();
    let back: pfkernel::converge::RateFit = serde_json::from_str(&json).unwrap();
    assert_eq!(back.n_values, fit.n_values);
}
