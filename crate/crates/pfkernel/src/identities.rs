//! Numerical certificates for the Christoffel–Darboux identities of the
//! elliptic kernel, the derivative formulas of the inhomogeneous terms, and
//! their almost-Hermitian limits.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ensembles::{EnsembleSpec, Potential};
use crate::error::{Error, Result};
use crate::finite_kernel::{ln_omega, transformed_limit_check, KernelMode, WeightedPreKernel};
use crate::limit_kernel::{self, prekernel_wronskian, FVariant, UniversalityClass, KERNEL_TOL};
use crate::quad::integrate;
use crate::skewop::scaled_hermite;
use crate::specfun::{airy_scaled, hermite_scaled, ln_double_factorial, ln_factorial, ScaledSum, ScaledValue};

pub const MAX_IDENTITY_N: usize = 500;
pub const MAX_ORTHOGONAL_N: usize = 2000;
const CAUCHY_RADIUS: f64 = 1e-2;
const CAUCHY_NODES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub params: serde_json::Value,
    pub points: Vec<Complex64>,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

impl IdentityReport {
    fn new(name: &str, params: serde_json::Value, points: Vec<Complex64>, lhs: ScaledValue, rhs: ScaledValue) -> Self {
        Self { name: name.into(), params, points, lhs: lhs.reconstruct(), rhs: rhs.reconstruct(), residual: residual(lhs, rhs) }
    }

    fn plain(name: &str, params: serde_json::Value, points: Vec<Complex64>, lhs: Complex64, rhs: Complex64) -> Self {
        Self::new(name, params, points, ScaledValue::from_complex(lhs), ScaledValue::from_complex(rhs))
    }

    /// One JSON object: name, params, points, lhs, rhs, residual.
    pub fn to_json_line(&self) -> String {
        let pts: Vec<[f64; 2]> = self.points.iter().map(|z| [z.re, z.im]).collect();
        json!({
            "name": self.name,
            "params": self.params,
            "points": pts,
            "lhs": [self.lhs.re, self.lhs.im],
            "rhs": [self.rhs.re, self.rhs.im],
            "residual": self.residual,
        })
        .to_string()
    }
}

/// |lhs − rhs|/(1 + |lhs| + |rhs|), evaluated without overflow.
fn residual(lhs: ScaledValue, rhs: ScaledValue) -> f64 {
    let m = lhs.log_magnitude.max(rhs.log_magnitude);
    if !m.is_finite() {
        return if lhs.is_zero() && rhs.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let d = (lhs - rhs).scale_log(-m).reconstruct().norm();
    let a = lhs.scale_log(-m).reconstruct().norm() + rhs.scale_log(-m).reconstruct().norm();
    d / ((-m).exp() + a)
}

/// d/dz of a holomorphic function via the Cauchy integral on a small circle.
/// Values are passed in scaled form and normalised by the centre value.
pub fn cauchy_derivative(mut f: impl FnMut(Complex64) -> Result<ScaledValue>, z: Complex64) -> Result<ScaledValue> {
    let samples: Vec<(Complex64, ScaledValue)> = (0..CAUCHY_NODES)
        .map(|j| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CAUCHY_NODES as f64);
            f(z + e * CAUCHY_RADIUS).map(|v| (e, v))
        })
        .collect::<Result<_>>()?;
    let m = samples.iter().map(|(_, v)| v.log_magnitude).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Ok(ScaledValue::ZERO);
    }
    let sum: Complex64 = samples.iter().map(|(e, v)| v.scale_log(-m).reconstruct() / e).sum();
    Ok(ScaledValue::from_complex(sum / (CAUCHY_NODES as f64 * CAUCHY_RADIUS)).scale_log(m))
}

fn elliptic_spec(n: usize, tau: f64, p: f64) -> Result<EnsembleSpec> {
    if n > MAX_IDENTITY_N {
        return Err(Error::domain(format!("N = {n} exceeds {MAX_IDENTITY_N}")));
    }
    EnsembleSpec::new(Potential::Elliptic { tau }, n, p, 0.0)
}

/// ζ = p + γ_N z with γ_N = √(2(1−τ²)/N).
fn zeta_of(n: usize, tau: f64, p: f64, z: Complex64) -> Complex64 {
    z * (2.0 * (1.0 - tau * tau) / n as f64).sqrt() + p
}

/// The inhomogeneous terms (I_N, II_N) of the skew Christoffel–Darboux formula.
pub fn inhomogeneous_terms(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Result<(ScaledValue, ScaledValue)> {
    elliptic_spec(n, tau, p)?;
    let (zeta, eta) = (zeta_of(n, tau, p, z), zeta_of(n, tau, p, w));
    let hz = scaled_hermite(2 * n, zeta, n, tau);
    let hw = scaled_hermite(2 * n, eta, n, tau);
    let pref = ScaledValue::from_exp(ln_omega(n, tau, p, z, w)).scale_log((2.0 * (1.0 - tau * tau).sqrt()).ln());
    let mut s1 = ScaledSum::new();
    for k in 0..2 * n {
        s1.add((hz[k] * hw[k]).scale_log(-ln_factorial(k as u64)));
    }
    let mut s2 = ScaledSum::new();
    for l in 0..n {
        s2.add(hw[2 * l].scale_log(-ln_double_factorial(2 * l as u64)));
    }
    let one = pref * s1.value();
    let two = pref * hz[2 * n].scale_log(-ln_double_factorial(2 * n as u64 - 1)) * s2.value();
    Ok((one, two))
}

/// ln of (4/√τ)(τ/2)^{2N}/(2N−1)!, the prefactor of the H_{2N}H_{2N−1} terms.
pub fn rn12_log_prefactor(n: usize, tau: f64) -> f64 {
    (4.0f64).ln() - 0.5 * tau.ln() + 2.0 * n as f64 * (tau / 2.0).ln() - ln_factorial(2 * n as u64 - 1)
}

fn transformed_kernel(k: &WeightedPreKernel, z: Complex64, w: Complex64) -> Result<ScaledValue> {
    k.value_scaled(z, w, KernelMode::Transformed)
}

/// ∂_z κ̂_N = 2(z−w)κ̂_N + I_N − II_N.
pub fn check_cd_skew(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Result<IdentityReport> {
    let spec = elliptic_spec(n, tau, p)?;
    let k = WeightedPreKernel::new(&spec)?;
    let lhs = cauchy_derivative(|t| transformed_kernel(&k, t, w), z)?;
    let (one, two) = inhomogeneous_terms(n, tau, p, z, w)?;
    let rhs = transformed_kernel(&k, z, w)?.mul_complex((z - w) * 2.0) + one - two;
    Ok(IdentityReport::new("cd_skew", json!({"n": n, "tau": tau, "p": p}), vec![z, w], lhs, rhs))
}

/// S_N(ζ,η) = Σ_{k<N} (τ/2)^k/k!·H_k(ζ)H_k(η) and the term-wise derivative ∂_ζ S_N.
fn orthogonal_kernel(n: usize, tau: f64, zeta: Complex64, eta: Complex64) -> (ScaledValue, ScaledValue, Vec<ScaledValue>, Vec<ScaledValue>) {
    let hz = hermite_scaled(n, zeta);
    let hw = hermite_scaled(n, eta);
    let lt = (tau / 2.0).ln();
    let weight = |k: usize| if k == 0 { 0.0 } else { k as f64 * lt - ln_factorial(k as u64) };
    let mut s = ScaledSum::new();
    let mut d = ScaledSum::new();
    s.add(hz[0] * hw[0]);
    if tau > 0.0 {
        for k in 1..n {
            s.add((hz[k] * hw[k]).scale_log(weight(k)));
            d.add((hz[k - 1] * hw[k]).scale_log(weight(k) + (2.0 * k as f64).ln()));
        }
    }
    (s.value(), d.value(), hz, hw)
}

/// ∂_ζ S_N = (2τ/(1−τ²))(η−τζ)S_N + (2/(1−τ²))(τ/2)^N (τH_N(ζ)H_{N−1}(η) − H_{N−1}(ζ)H_N(η))/(N−1)!.
pub fn check_cd_orthogonal(n: usize, tau: f64, zeta: Complex64, eta: Complex64) -> Result<IdentityReport> {
    if n == 0 || n > MAX_ORTHOGONAL_N {
        return Err(Error::domain(format!("N = {n} must lie in 1..={MAX_ORTHOGONAL_N}")));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(format!("τ = {tau} must lie in [0, 1)")));
    }
    let (s, lhs, hz, hw) = orthogonal_kernel(n, tau, zeta, eta);
    let a = 1.0 - tau * tau;
    let first = s.mul_complex((eta - zeta * tau) * (2.0 * tau / a));
    let second = if tau > 0.0 {
        let pre = (2.0 / a).ln() + n as f64 * (tau / 2.0).ln() - ln_factorial(n as u64 - 1);
        ((hz[n] * hw[n - 1]).mul_complex(Complex64::new(tau, 0.0)) - hz[n - 1] * hw[n]).scale_log(pre)
    } else {
        ScaledValue::ZERO
    };
    let rhs = first + second;
    Ok(IdentityReport::new("cd_orthogonal", json!({"n": n, "tau": tau}), vec![zeta, eta], lhs, rhs))
}

/// Both derivative formulas: ∂_z I_N and ∂_w[e^{−(z−w)²} II_N].
pub fn check_rn12_derivatives(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Result<(IdentityReport, IdentityReport)> {
    elliptic_spec(n, tau, p)?;
    let params = json!({"n": n, "tau": tau, "p": p});
    let (zeta, eta) = (zeta_of(n, tau, p, z), zeta_of(n, tau, p, w));
    let hz = scaled_hermite(2 * n, zeta, n, tau);
    let hw = scaled_hermite(2 * n, eta, n, tau);
    // (4/√τ)(τ/2)^{2N}H_{2N}H_{2N−1} = 2√2·Ĥ_{2N}Ĥ_{2N−1}
    let pre = ScaledValue::from_exp(ln_omega(n, tau, p, z, w)).scale_log((2.0 * SQRT_2).ln() - ln_factorial(2 * n as u64 - 1));
    let (a, b) = (2 * n, 2 * n - 1);

    let lhs1 = cauchy_derivative(|t| Ok(inhomogeneous_terms(n, tau, p, t, w)?.0), z)?;
    let rhs1 = pre * ((hz[a] * hw[b]).mul_complex(Complex64::new(tau, 0.0)) - hz[b] * hw[a]);

    let lhs2 = cauchy_derivative(
        |t| {
            let two = inhomogeneous_terms(n, tau, p, z, t)?.1;
            Ok(two * ScaledValue::from_exp(-(z - t) * (z - t)))
        },
        w,
    )?;
    let rhs2 = (pre * hz[a] * hw[b] * ScaledValue::from_exp(-(z - w) * (z - w))).mul_complex(Complex64::new(tau - 1.0, 0.0));
    Ok((
        IdentityReport::new("rn1_derivative", params.clone(), vec![z, w], lhs1, rhs1),
        IdentityReport::new("rn2_derivative", params, vec![z, w], lhs2, rhs2),
    ))
}

/// Both sides of the transformed-kernel relation as a report.
pub fn check_transformed(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Result<IdentityReport> {
    let (lhs, rhs) = transformed_limit_check(n, tau, p, z, w)?;
    Ok(IdentityReport::plain("transformed_kernel", json!({"n": n, "tau": tau, "p": p}), vec![z, w], lhs, rhs))
}

// ---------------------------------------------------------------------------
// Limiting identities

/// υ(z,w) = e^{−z²−w²}κ(z,w) with κ from the Wronskian integral.
pub fn upsilon(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    if !class.gaussian_weight() {
        return Err(Error::Unsupported("υ is defined for the Gaussian-weight classes".into()));
    }
    Ok(prekernel_wronskian(class, FVariant::Standard, z, w, KERNEL_TOL)? * (-z * z - w * w).exp())
}

fn d_upsilon(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    Ok(cauchy_derivative(|t| Ok(ScaledValue::from_complex(upsilon(class, t, w)?)), z)?.reconstruct())
}

fn rel_integral(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64) -> Result<Complex64> {
    let m = (0..=8).map(|i| f(a + (b - a) * (i as f64 + 0.5) / 9.0).norm()).fold(0.0, f64::max);
    Ok(integrate(f, a, b, 1e-13 * (m * (b - a)).max(1e-300))?.value)
}

/// e^{c³s + c⁶/12}·Ai(2cs + c⁴/4) with the exponentials combined before evaluation.
fn airy_factor(cc: f64, s: Complex64) -> Complex64 {
    let arg = s * (2.0 * cc) + cc.powi(4) / 4.0;
    let e = s * cc.powi(3) + cc.powi(6) / 12.0 - arg.powf(1.5) * (2.0 / 3.0);
    airy_scaled(arg) * e.exp()
}

/// e^{−(z−w)²}(I(z,w) − II(z,w)) for the almost-Hermitian classes.
pub fn limiting_inhomogeneous(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    match *class {
        UniversalityClass::AHBulk { .. } => {
            // II ≡ 0; e^{−(z−w)²}I = (2/√π)∫_{−c̃}^{c̃} e^{−t²}cos(2t(z−w))dt
            let ct = class.c_tilde().unwrap();
            let b = z - w;
            Ok(rel_integral(|t| (b * (2.0 * t)).cos() * (-t * t).exp(), -ct, ct)? * (2.0 / PI.sqrt()))
        }
        UniversalityClass::AHEdge { c: cc } => {
            let lo = limit_kernel::ah_edge_lower_cut(cc, z, w);
            let one = rel_integral(|u| airy_factor(cc, z - u) * airy_factor(cc, w - u), lo, 0.0)?
                * (8.0 * PI.sqrt() * cc * cc);
            let two = rel_integral(|u| airy_factor(cc, w - u), lo, 0.0)? * airy_factor(cc, z) * (4.0 * PI.sqrt() * cc * cc);
            Ok(one - two)
        }
        _ => Err(Error::Unsupported("limiting inhomogeneous terms are given for the almost-Hermitian classes".into())),
    }
}

/// ∂_z υ = e^{−(z−w)²}(I − II).
pub fn check_limit_ode(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<IdentityReport> {
    let lhs = d_upsilon(class, z, w)?;
    let rhs = limiting_inhomogeneous(class, z, w)?;
    Ok(IdentityReport::plain("limit_ode", json!({"class": class.name()}), vec![z, w], lhs, rhs))
}

/// ∂_z υ = √π[−2∫_E ∂_z f_z·f′_w du + f_w ∂_z f_z |_{∂E}] at the almost-Hermitian edge,
/// where ∂_z f_z(u) = f′_z(0) − f′_z(u).
pub fn check_cdi_limit(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<IdentityReport> {
    let UniversalityClass::AHEdge { c: cc } = *class else {
        return Err(Error::Unsupported("the integrated identity is checked for the almost-Hermitian edge".into()));
    };
    let lhs = d_upsilon(class, z, w)?;
    let lo = limit_kernel::ah_edge_lower_cut(cc, z, w);
    let fp = |a: Complex64, u: f64| limit_kernel::f_prime(class, a, u).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let fz0 = fp(z, 0.0);
    let bulk = rel_integral(|u| (fz0 - fp(z, u)) * fp(w, u), lo, 0.0)? * -2.0;
    // f_w(0) = 0, f_w(−∞) = −∫_E f′_w
    let boundary = fz0 * rel_integral(|u| fp(w, u), lo, 0.0)?;
    let rhs = (bulk + boundary) * PI.sqrt();
    Ok(IdentityReport::plain("cdi_limit", json!({"class": class.name()}), vec![z, w], lhs, rhs))
}

/// Randomized sweep of the exact finite-N identities: N ≤ n_max, τ ∈ [0, 0.9],
/// p ∈ [0, √2(1+τ)], z, w in the unit box.
pub fn exact_identity_sweep(count: usize, n_max: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(4 * count);
    for _ in 0..count {
        let n = rng.random_range(1..=n_max);
        let tau = rng.random_range(0.0..=0.9);
        let p = rng.random_range(0.0..=SQRT_2 * (1.0 + tau));
        let mut pt = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (z, w) = (pt(), pt());
        let (zeta, eta) = (pt() * 2.0, pt() * 2.0);
        out.push(check_cd_skew(n, tau, p, z, w)?);
        out.push(check_cd_orthogonal(n, tau, zeta, eta)?);
        let (a, b) = check_rn12_derivatives(n, tau, p, z, w)?;
        out.push(a);
        out.push(b);
        out.push(check_transformed(n, tau, p, z, w)?);
    }
    Ok(out)
}
