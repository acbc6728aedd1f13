mod common;

use common::c;
use num_complex::Complex64;
use pfkernel::identities::{
    cauchy_derivative, check_cd_orthogonal, check_cd_skew, check_cdi_limit, check_limit_ode, check_rn12_derivatives,
    exact_identity_sweep, inhomogeneous_terms, limiting_inhomogeneous, rn12_log_prefactor, upsilon, IdentityReport,
};
use pfkernel::limit_kernel::UniversalityClass;
use pfkernel::specfun::ScaledValue;
use proptest::prelude::*;

#[test]
fn cauchy_derivative_of_entire_functions() {
    let z = c(0.3, -0.7);
    let d = cauchy_derivative(|t| Ok(ScaledValue::from_complex((t * t).exp() * t)), z).unwrap().reconstruct();
    let want = (z * z).exp() * (c(1.0, 0.0) + z * z * 2.0);
    assert!((d - want).norm() < 1e-12 * want.norm());
    // scaled values far beyond f64 range
    let big = cauchy_derivative(|t| Ok(ScaledValue::from_exp(t * t * 40.0 + 900.0)), z).unwrap();
    let want = ScaledValue::from_exp(z * z * 40.0 + 900.0).mul_complex(z * 80.0);
    assert!((big.log_magnitude - want.log_magnitude).abs() < 1e-10);
}

#[test]
fn cd_skew_examples() {
    let r = check_cd_skew(5, 0.3, 0.0, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
    assert!(r.residual < 1e-8, "{r:?}");
    let r = check_cd_skew(1, 0.5, 0.0, c(0.2, 0.1), c(-0.4, 0.3)).unwrap();
    assert!(r.residual < 1e-10, "{r:?}");
}

#[test]
fn cd_skew_holds_at_tau_zero_and_large_n() {
    let r = check_cd_skew(40, 0.0, 1.0, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
    assert!(r.residual < 1e-10, "{r:?}");
    let r = check_cd_skew(400, 0.8, 2.5, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
    assert!(r.residual < 1e-8, "{r:?}");
    assert!(check_cd_skew(501, 0.5, 0.0, c(0.0, 0.0), c(0.1, 0.0)).is_err());
}

#[test]
fn first_inhomogeneous_term_is_symmetric() {
    for (z, w) in [(c(0.3, 0.2), c(-0.5, 0.1)), (c(1.0, -0.4), c(0.2, 0.9))] {
        let a = inhomogeneous_terms(7, 0.6, 0.8, z, w).unwrap().0.reconstruct();
        let b = inhomogeneous_terms(7, 0.6, 0.8, w, z).unwrap().0.reconstruct();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }
}

#[test]
fn cd_orthogonal_examples() {
    let r = check_cd_orthogonal(1, 0.7, c(1.2, 0.4), c(-2.0, 1.0)).unwrap();
    assert_eq!(r.lhs, c(0.0, 0.0));
    assert!(r.rhs.norm() < 1e-13, "{r:?}");
    let r = check_cd_orthogonal(10, 0.7, c(1.2, 0.4), c(-2.0, 1.0)).unwrap();
    assert!(r.residual < 1e-10, "{r:?}");
    let r = check_cd_orthogonal(12, 0.0, c(1.2, 0.4), c(-2.0, 1.0)).unwrap();
    assert!(r.residual < 1e-12, "{r:?}");
    assert!(check_cd_orthogonal(0, 0.5, c(0.0, 0.0), c(0.0, 0.0)).is_err());
}

#[test]
fn cd_orthogonal_large_n() {
    let r = check_cd_orthogonal(200, 0.5, c(1.0, 0.5), c(-0.8, 0.3)).unwrap();
    assert!(r.residual < 1e-8, "{r:?}");
}

#[test]
fn rn12_derivative_examples() {
    let (a, b) = check_rn12_derivatives(3, 0.4, 0.5, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
    assert!(a.residual < 1e-8 && b.residual < 1e-8, "{a:?} {b:?}");
    let (a, b) = check_rn12_derivatives(1, 0.1, 0.0, c(0.2, 0.1), c(0.3, -0.3)).unwrap();
    assert!(a.residual < 1e-10 && b.residual < 1e-10, "{a:?} {b:?}");
}

#[test]
fn rn12_prefactor_is_finite_in_log_space() {
    let l = rn12_log_prefactor(500, 0.5);
    assert!(l.is_finite() && l < -1000.0);
}

#[test]
fn limit_ode_examples() {
    let cl = UniversalityClass::ah_bulk(1.0, 0.0).unwrap();
    let r = check_limit_ode(&cl, c(0.0, 0.3), c(0.1, 0.0)).unwrap();
    assert!(r.residual < 1e-7, "{r:?}");
    let cl = UniversalityClass::ah_edge(1.0).unwrap();
    let r = check_limit_ode(&cl, c(0.2, 0.0), c(-0.1, 0.0)).unwrap();
    assert!(r.residual < 1e-6, "{r:?}");
    assert!(check_limit_ode(&UniversalityClass::Hard, c(0.2, 0.0), c(-0.1, 0.0)).is_err());
}

#[test]
fn limit_ode_on_the_diagonal() {
    let cl = UniversalityClass::ah_edge(1.5).unwrap();
    let z = c(-0.3, 0.2);
    assert_eq!(upsilon(&cl, z, z).unwrap(), c(0.0, 0.0));
    let r = check_limit_ode(&cl, z, z).unwrap();
    assert!(r.lhs.norm().is_finite() && r.residual < 1e-6, "{r:?}");
}

#[test]
fn cdi_limit_examples() {
    let cl = UniversalityClass::ah_edge(1.0).unwrap();
    let r = check_cdi_limit(&cl, c(0.1, 0.0), c(-0.2, 0.0)).unwrap();
    assert!(r.residual < 1e-6, "{r:?}");
    // on the diagonal the two representations of ∂_z υ agree with the ODE right-hand side
    let z = c(0.1, 0.3);
    let a = check_cdi_limit(&cl, z, z).unwrap();
    let b = limiting_inhomogeneous(&cl, z, z).unwrap();
    assert!((a.rhs - b).norm() < 1e-6);
    assert!(check_cdi_limit(&UniversalityClass::NHEdge, z, z).is_err());
}

#[test]
fn ah_bulk_inhomogeneous_term_tends_to_bulk_limit() {
    // c̃ → ∞: (2/√π)∫_ℝ e^{−t²}cos(2tb)dt = 2e^{−b²}
    let cl = UniversalityClass::ah_bulk(12.0, 0.0).unwrap();
    let (z, w) = (c(0.3, 0.2), c(-0.1, 0.4));
    let got = limiting_inhomogeneous(&cl, z, w).unwrap();
    let want = (-(z - w) * (z - w)).exp() * 2.0;
    assert!((got - want).norm() < 1e-12);
}

#[test]
fn exact_sweep_stays_below_tolerance() {
    let reports = exact_identity_sweep(100, 50, 11).unwrap();
    assert_eq!(reports.len(), 500);
    for r in &reports {
        assert!(r.residual < 1e-8, "{}", r.to_json_line());
    }
}

#[test]
fn reports_serialize_as_json_lines() {
    let r = check_cd_skew(2, 0.4, 0.1, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
    let line = r.to_json_line();
    assert!(!line.contains('\n'));
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["name"], "cd_skew");
    assert_eq!(v["params"]["n"], 2);
    assert!(v["residual"].as_f64().unwrap() >= 0.0);
    let back: IdentityReport = serde_json::from_str(&line).unwrap();
    assert_eq!((back.name.as_str(), back.points.clone(), back.params.clone()), (r.name.as_str(), r.points.clone(), r.params.clone()));
    assert!((back.residual - r.residual).abs() <= 1e-15 * r.residual);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cd_skew_random(n in 1usize..30, tau in 0.0f64..0.9, pf in 0.0f64..1.0,
                      x1 in -1.0f64..1.0, y1 in -1.0f64..1.0, x2 in -1.0f64..1.0, y2 in -1.0f64..1.0) {
        let p = pf * 2f64.sqrt() * (1.0 + tau);
        let r = check_cd_skew(n, tau, p, Complex64::new(x1, y1), Complex64::new(x2, y2)).unwrap();
        prop_assert!(r.residual >= 0.0 && r.residual < 1e-8);
    }
}
