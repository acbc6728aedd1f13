//! Skew-orthogonal polynomials and their norms: Hermite-based for the elliptic
//! potential, monomial-based for the radial (disk) potentials.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{potential_value, EnsembleSpec, Potential};
use crate::error::{Error, Result};
use crate::specfun::{ln_double_factorial, ln_factorial, ln_lower_gamma_real, phi_of, ScaledSum, ScaledValue};

pub const MAX_TABLE_N: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewOPTable {
    pub spec: EnsembleSpec,
    /// orthogonal norms h_0..h_{2N−1}
    pub h: Vec<ScaledValue>,
    /// skew norms r_0..r_{N−1}
    pub r: Vec<ScaledValue>,
    /// h_{m+1}/h_m
    pub ratio_h: Vec<f64>,
    ln_h: Vec<f64>,
    /// D_k = Σ_{i<k} (ln h_{2i+2} − ln h_{2i+1}), k = 0..N
    prefix_d: Vec<f64>,
}

/// Squared radius ρ² of the confining disk (ρ = 1 for the soft/hard disk).
pub(crate) fn rho_squared(potential: &Potential) -> Option<f64> {
    match *potential {
        Potential::Elliptic { .. } => None,
        Potential::SoftHardDisk => Some(1.0),
        Potential::HardDisk { rho } => Some(rho * rho),
    }
}

impl SkewOPTable {
    pub fn ln_h(&self) -> &[f64] {
        &self.ln_h
    }

    pub fn prefix_d(&self) -> &[f64] {
        &self.prefix_d
    }

    pub fn ln_r(&self, k: usize) -> f64 {
        self.r[k].log_magnitude
    }

    /// CSV dump with columns m, log_h_m.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,log_h_m\n");
        for (m, l) in self.ln_h.iter().enumerate() {
            s.push_str(&format!("{m},{l}\n"));
        }
        s
    }
}

pub fn build_table(spec: &EnsembleSpec) -> Result<SkewOPTable> {
    let n = spec.n;
    if n > MAX_TABLE_N {
        return Err(Error::domain(format!("N = {n} exceeds the table limit {MAX_TABLE_N}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let ln_h: Vec<f64> = match spec.potential {
        Potential::Elliptic { tau } => {
            let c = 0.5 * (1.0 - tau * tau).ln();
            (0..2 * n).map(|m| c + ln_factorial(m as u64) - (m as f64 + 1.0) * ln_n).collect()
        }
        _ => {
            let x = 2.0 * rho_squared(&spec.potential).unwrap() * nf;
            (0..2 * n).map(|m| ln_lower_gamma_real(m as f64 + 1.0, x) - (m as f64 + 1.0) * ln_n).collect()
        }
    };
    if ln_h.iter().any(|v| !v.is_finite()) {
        return Err(Error::accuracy("norm table has non-finite entries", Complex64::new(0.0, 0.0)));
    }
    let r: Vec<ScaledValue> = match spec.potential {
        Potential::Elliptic { tau } => {
            let c = LN_2 + 1.5 * (1.0 - tau).ln() + 0.5 * (1.0 + tau).ln();
            (0..n)
                .map(|k| ScaledValue::from_log(c + ln_factorial(2 * k as u64 + 1) - (2.0 * k as f64 + 2.0) * ln_n))
                .collect()
        }
        _ => (0..n).map(|k| ScaledValue::from_log(LN_2 + ln_h[2 * k + 1])).collect(),
    };
    let mut prefix_d = vec![0.0; n + 1];
    for k in 0..n {
        let step = if 2 * k + 2 < 2 * n { ln_h[2 * k + 2] - ln_h[2 * k + 1] } else { 0.0 };
        prefix_d[k + 1] = prefix_d[k] + step;
    }
    Ok(SkewOPTable {
        spec: *spec,
        h: ln_h.iter().map(|&l| ScaledValue::from_log(l)).collect(),
        r,
        ratio_h: ln_h.windows(2).map(|w| (w[1] - w[0]).exp()).collect(),
        ln_h,
        prefix_d,
    })
}

/// Ĥ_k(ζ) = (τ/2)^{k/2}·H_k(√(N/2τ)·ζ) for k = 0..=n_max, via
/// Ĥ_{k+1} = √N·ζ·Ĥ_k − kτ·Ĥ_{k−1}; regular at τ = 0 where Ĥ_k = (√N ζ)^k.
pub fn scaled_hermite(n_max: usize, zeta: Complex64, n: usize, tau: f64) -> Vec<ScaledValue> {
    let a = zeta * (n as f64).sqrt();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ScaledValue::ONE);
    let mut scale = 0.0;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for k in 0..n_max {
        let next = a * cur - prev * (k as f64 * tau);
        prev = cur;
        cur = next;
        let m = cur.norm().max(prev.norm());
        if (k + 1) % 32 == 0 || !(1e-150..=1e150).contains(&m) {
            if m > 0.0 && m.is_finite() {
                prev /= m;
                cur /= m;
                scale += m.ln();
            }
        }
        out.push(ScaledValue::from_complex(cur).scale_log(scale));
    }
    out
}

/// Monic skew-orthogonal polynomial q_m(ζ), m ∈ [0, 2N−1].
pub fn eval_qk(table: &SkewOPTable, m: usize, zeta: Complex64) -> Result<ScaledValue> {
    let spec = &table.spec;
    let n = spec.n;
    if m >= 2 * n {
        return Err(Error::Shape(format!("index {m} out of range 0..{}", 2 * n)));
    }
    let j = m / 2;
    match spec.potential {
        Potential::Elliptic { tau } => {
            let hh = scaled_hermite(m, zeta, n, tau);
            let ln_n = (n as f64).ln();
            if m % 2 == 1 {
                Ok(hh[m].scale_log(-(j as f64 + 0.5) * ln_n))
            } else {
                let mut s = ScaledSum::new();
                for l in 0..=j {
                    s.add(hh[2 * l].scale_log(-ln_double_factorial(2 * l as u64)));
                }
                let c = j as f64 * (LN_2 - ln_n) + ln_factorial(j as u64);
                Ok(s.value().scale_log(c))
            }
        }
        _ => {
            if m % 2 == 1 {
                Ok(power(zeta, m))
            } else {
                let d = table.prefix_d();
                let mut s = ScaledSum::new();
                for l in 0..=j {
                    s.add(power(zeta, 2 * l).scale_log(d[j] - d[l]));
                }
                Ok(s.value())
            }
        }
    }
}

/// ζ^m as a ScaledValue.
pub(crate) fn power(zeta: Complex64, m: usize) -> ScaledValue {
    if m == 0 {
        return ScaledValue::ONE;
    }
    let r = zeta.norm();
    if r == 0.0 {
        return ScaledValue::ZERO;
    }
    ScaledValue { log_magnitude: m as f64 * r.ln(), phase: Complex64::from_polar(1.0, m as f64 * zeta.arg()) }
}

/// Weighted orthonormal polynomial w_m(ζ) = h_m^{−1/2} ζ^m e^{−N|ζ|²/2} (radial only).
pub fn weighted_poly(table: &SkewOPTable, m: usize, zeta: Complex64) -> Result<Complex64> {
    let spec = &table.spec;
    if !spec.potential.is_radial() {
        return Err(Error::Unsupported("weighted_poly is defined for radial potentials".into()));
    }
    if m >= 2 * spec.n {
        return Err(Error::Shape(format!("index {m} out of range 0..{}", 2 * spec.n)));
    }
    let q = potential_value(spec, zeta);
    if q.is_infinite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(power(zeta, m).scale_log(-0.5 * table.ln_h()[m] - 0.5 * spec.n as f64 * q).reconstruct())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormRegime {
    /// |τ_m − 2ρ²| < 2δ_N
    Critical,
    /// 2(ρ² + δ_N) ≤ τ_m ≤ 2
    Supercritical,
}

/// ξ_m = √N(τ_m − 2ρ²)/(2ρ) with τ_m = m/N.
pub fn xi_m(spec: &EnsembleSpec, m: usize) -> Result<f64> {
    let rho2 = rho_squared(&spec.potential).ok_or_else(|| Error::Unsupported("ξ_m needs a disk potential".into()))?;
    let n = spec.n as f64;
    Ok(n.sqrt() * (m as f64 / n - 2.0 * rho2) / (2.0 * rho2.sqrt()))
}

pub fn norm_regime(spec: &EnsembleSpec, m: usize) -> Result<NormRegime> {
    let rho2 = rho_squared(&spec.potential).ok_or_else(|| Error::Unsupported("norm asymptotics need a disk potential".into()))?;
    let n = spec.n as f64;
    let delta = n.ln() / n.sqrt();
    let tau_m = m as f64 / n;
    if (tau_m - 2.0 * rho2).abs() < 2.0 * delta {
        Ok(NormRegime::Critical)
    } else if 2.0 * (rho2 + delta) <= tau_m && tau_m <= 2.0 {
        Ok(NormRegime::Supercritical)
    } else {
        Err(Error::domain(format!("m = {m} lies in neither asymptotic regime")))
    }
}

/// Asymptotic approximation of ln h_m for the disk potentials.
pub fn norm_asymptotic(spec: &EnsembleSpec, m: usize) -> Result<f64> {
    let regime = norm_regime(spec, m)?;
    let rho2 = rho_squared(&spec.potential).unwrap();
    let rho = rho2.sqrt();
    let n = spec.n as f64;
    let mf = m as f64;
    let tau_m = mf / n;
    Ok(match regime {
        NormRegime::Critical => {
            let lead = if m == 0 { 0.0 } else { -mf + mf * tau_m.ln() };
            lead + (2.0 * rho / n.sqrt()).ln() + phi_of(xi_m(spec, m)?).ln()
        }
        NormRegime::Supercritical => {
            (mf + 1.0) * (2.0 * rho2).ln() - 2.0 * rho2 * n - n.ln() - (tau_m - 2.0 * rho2).ln()
        }
    })
}
