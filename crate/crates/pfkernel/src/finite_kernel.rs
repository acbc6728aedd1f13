//! Finite-N pre-kernels and k-point correlation functions.
//!
//! Both the elliptic and the radial pre-kernels share the structure
//! ϰ_N(ζ,η) = Σ_{k<N} [a_k(ζ) b_k(η) − a_k(η) b_k(ζ)], where a_k carries the odd
//! skew-OP divided by its skew norm and b_k is a prefix sum over the even part.
//! Per-point sequences are built once in log space, so a kernel evaluation is
//! O(N) and never overflows.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{microscale, potential_value, EnsembleSpec, Potential, RescaleMap};
use crate::error::{Error, Result};
use crate::pfaffian::{pfaffian, SkewMatrix};
use crate::skewop::{build_table, power, scaled_hermite, SkewOPTable};
use crate::specfun::{ln_double_factorial, ScaledSum, ScaledValue};

pub const MAX_KERNEL_N: usize = 4000;
const RESIDUE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelMode {
    /// κ_N itself.
    Raw,
    /// e^{−N(Q(ζ)+Q(η))/2}·κ_N.
    Weighted,
    /// κ̂_N = ω_N·κ_N (elliptic, θ = 0 only).
    Transformed,
}

/// Per-point sequences (a_k, b_k) and the log-weight −N·Q(ζ)/2.
#[derive(Clone, Debug)]
pub struct PointData {
    pub zeta: Complex64,
    a: Vec<ScaledValue>,
    b: Vec<ScaledValue>,
    /// None outside the support of a hard-wall potential.
    log_weight: Option<f64>,
}

impl PointData {
    pub fn conj(&self) -> PointData {
        PointData {
            zeta: self.zeta.conj(),
            a: self.a.iter().map(|v| v.conj()).collect(),
            b: self.b.iter().map(|v| v.conj()).collect(),
            log_weight: self.log_weight,
        }
    }

    pub fn in_support(&self) -> bool {
        self.log_weight.is_some()
    }
}

/// Finite-N pre-kernel evaluator for one ensemble specification.
#[derive(Clone, Debug)]
pub struct WeightedPreKernel {
    pub spec: EnsembleSpec,
    pub table: SkewOPTable,
    pub map: RescaleMap,
}

impl WeightedPreKernel {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        if spec.n > MAX_KERNEL_N {
            return Err(Error::domain(format!("N = {} exceeds the kernel limit {MAX_KERNEL_N}", spec.n)));
        }
        Ok(Self { spec: *spec, table: build_table(spec)?, map: microscale(spec)? })
    }

    pub fn gamma_n(&self) -> f64 {
        self.map.gamma_n
    }

    pub fn point(&self, zeta: Complex64) -> PointData {
        let n = self.spec.n;
        let q = potential_value(&self.spec, zeta);
        let log_weight = q.is_finite().then(|| -0.5 * n as f64 * q);
        let (a, b) = match self.spec.potential {
            Potential::Elliptic { tau } => {
                let hh = scaled_hermite(2 * n - 1, zeta, n, tau);
                let nf = n as f64;
                let c = 1.5 * nf.ln() - LN_2 - 1.5 * (1.0 - tau).ln() - 0.5 * (1.0 + tau).ln();
                let mut a = Vec::with_capacity(n);
                let mut b = Vec::with_capacity(n);
                let mut s = ScaledSum::new();
                for k in 0..n {
                    a.push(hh[2 * k + 1].scale_log(c - ln_double_factorial(2 * k as u64 + 1)));
                    s.add(hh[2 * k].scale_log(-ln_double_factorial(2 * k as u64)));
                    b.push(s.value());
                }
                (a, b)
            }
            _ => {
                let ln_h = self.table.ln_h();
                let d = self.table.prefix_d();
                let mut a = Vec::with_capacity(n);
                let mut b = Vec::with_capacity(n);
                let mut s = ScaledSum::new();
                for k in 0..n {
                    a.push(power(zeta, 2 * k + 1).scale_log(d[k] - ln_h[2 * k + 1] - LN_2));
                    s.add(power(zeta, 2 * k).scale_log(-d[k]));
                    b.push(s.value());
                }
                (a, b)
            }
        };
        PointData { zeta, a, b, log_weight }
    }

    /// Unrescaled ϰ_N(ζ,η) in log space.
    pub fn pair_raw(&self, x: &PointData, y: &PointData) -> ScaledValue {
        if x.zeta == y.zeta {
            return ScaledValue::ZERO;
        }
        let mut s1 = ScaledSum::new();
        let mut s2 = ScaledSum::new();
        for k in 0..x.a.len() {
            s1.add(x.a[k] * y.b[k]);
            s2.add(y.a[k] * x.b[k]);
        }
        s1.value() - s2.value()
    }

    /// e^{−N(Q(ζ)+Q(η))/2}·ϰ_N(ζ,η); exact zero outside the support.
    pub fn pair_weighted(&self, x: &PointData, y: &PointData) -> ScaledValue {
        match (x.log_weight, y.log_weight) {
            (Some(lx), Some(ly)) => self.pair_raw(x, y).scale_log(lx + ly),
            _ => ScaledValue::ZERO,
        }
    }

    /// Unrescaled ϰ_N(ζ,η) in the requested mode (Transformed is not defined here).
    pub fn prekernel_zeta(&self, zeta: Complex64, eta: Complex64, mode: KernelMode) -> Result<ScaledValue> {
        let (x, y) = (self.point(zeta), self.point(eta));
        match mode {
            KernelMode::Raw => Ok(self.pair_raw(&x, &y)),
            KernelMode::Weighted => Ok(self.pair_weighted(&x, &y)),
            KernelMode::Transformed => {
                Err(Error::Unsupported("transformed mode needs rescaled coordinates".into()))
            }
        }
    }

    /// Rescaled κ_N(z,w) = γ_N³·ϰ_N(ζ,η) in log space.
    pub fn value_scaled(&self, z: Complex64, w: Complex64, mode: KernelMode) -> Result<ScaledValue> {
        if z == w {
            return Ok(ScaledValue::ZERO);
        }
        let g3 = 3.0 * self.gamma_n().ln();
        let (zeta, eta) = (self.map.to_zeta(z), self.map.to_zeta(w));
        let (x, y) = (self.point(zeta), self.point(eta));
        Ok(match mode {
            KernelMode::Raw => self.pair_raw(&x, &y).scale_log(g3),
            KernelMode::Weighted => self.pair_weighted(&x, &y).scale_log(g3),
            KernelMode::Transformed => {
                let Potential::Elliptic { tau } = self.spec.potential else {
                    return Err(Error::Unsupported("transformed kernel is elliptic only".into()));
                };
                if self.spec.theta != 0.0 {
                    return Err(Error::Unsupported("transformed kernel needs θ = 0".into()));
                }
                self.pair_raw(&x, &y).scale_log(g3) * ScaledValue::from_exp(ln_omega(self.spec.n, tau, self.spec.p, z, w))
            }
        })
    }

    pub fn value(&self, z: Complex64, w: Complex64, mode: KernelMode) -> Result<Complex64> {
        let v = self.value_scaled(z, w, mode)?.reconstruct();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::accuracy("kernel value overflows double precision", Complex64::new(f64::NAN, f64::NAN)))
        }
    }

    /// 𝐑_{N,k}(ζ_1..ζ_k) = Π(conj ζ_j − ζ_j)·Pf[weighted ϰ_N].
    pub fn correlation_unrescaled(&self, zetas: &[Complex64]) -> Result<f64> {
        self.correlation_impl(zetas, 0.0)
    }

    /// γ_N^{2k}·𝐑_{N,k} at ζ_j = p + e^{iθ}γ_N z_j, the density in microscopic units.
    pub fn correlation(&self, points: &[Complex64]) -> Result<f64> {
        let zetas: Vec<Complex64> = points.iter().map(|&z| self.map.to_zeta(z)).collect();
        self.correlation_impl(&zetas, 2.0 * self.gamma_n().ln())
    }

    fn correlation_impl(&self, zetas: &[Complex64], log_unit_per_point: f64) -> Result<f64> {
        if zetas.is_empty() {
            return Err(Error::Shape("at least one point required".into()));
        }
        if zetas.iter().any(|z| z.im == 0.0 || !self.spec.potential.in_support(*z)) {
            return Ok(0.0);
        }
        let mut data = Vec::with_capacity(2 * zetas.len());
        for &z in zetas {
            let d = self.point(z);
            let dc = d.conj();
            data.push(d);
            data.push(dc);
        }
        let dim = data.len();
        let mut upper = vec![ScaledValue::ZERO; dim * dim];
        let mut ref_log = f64::NEG_INFINITY;
        for i in 0..dim {
            for j in i + 1..dim {
                let v = self.pair_weighted(&data[i], &data[j]);
                ref_log = ref_log.max(v.log_magnitude);
                upper[i * dim + j] = v;
            }
        }
        if ref_log == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let m = SkewMatrix::from_upper(dim, |i, j| upper[i * dim + j].scale_log(-ref_log).reconstruct())?;
        let pf = pfaffian(&m);
        let bound: f64 = (0..dim)
            .map(|i| (0..dim).map(|j| m.get(i, j).norm_sqr()).sum::<f64>().sqrt().sqrt())
            .product();
        let mut log_pref = zetas.len() as f64 * (log_unit_per_point + ref_log);
        let mut phase = Complex64::new(1.0, 0.0);
        for z in zetas {
            log_pref += (2.0 * z.im).abs().ln();
            phase *= Complex64::new(0.0, -z.im.signum());
        }
        let v = pf * phase;
        if v.im.abs() > RESIDUE_TOL * bound.max(v.re.abs()) {
            return Err(Error::accuracy("correlation has a non-negligible imaginary part", v * log_pref.exp()));
        }
        Ok(v.re * log_pref.exp())
    }
}

/// ln ω_N(z,w) = τ(P+z)² + τ(P+w)² − 2(P+z)(P+w), P = p√(N/(2(1−τ²))).
pub fn ln_omega(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Complex64 {
    let big_p = p * (n as f64 / (2.0 * (1.0 - tau * tau))).sqrt();
    let (a, b) = (z + big_p, w + big_p);
    a * a * tau + b * b * tau - a * b * 2.0
}

/// Unimodular cocycle c_N(z,w) relating the weighted and transformed kernels.
pub fn cocycle(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Complex64 {
    let s = (2.0 * n as f64 * (1.0 - tau) / (1.0 + tau)).sqrt() * p;
    let arg = -s * z.im - s * w.im + tau * (z * z).im + tau * (w * w).im;
    Complex64::from_polar(1.0, arg)
}

pub fn elliptic_prekernel(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64, mode: KernelMode) -> Result<Complex64> {
    let spec = EnsembleSpec::new(Potential::Elliptic { tau }, n, p, 0.0)?;
    WeightedPreKernel::new(&spec)?.value(z, w, mode)
}

/// κ_N(z,w)·e^{−N(|ζ|²+|η|²)/2} for the disk potentials.
pub fn radial_prekernel(spec: &EnsembleSpec, z: Complex64, w: Complex64) -> Result<Complex64> {
    if !spec.potential.is_radial() {
        return Err(Error::Unsupported("radial_prekernel needs a disk potential".into()));
    }
    WeightedPreKernel::new(spec)?.value(z, w, KernelMode::Weighted)
}

pub fn correlation(spec: &EnsembleSpec, points: &[Complex64]) -> Result<f64> {
    WeightedPreKernel::new(spec)?.correlation(points)
}

pub fn correlation_unrescaled(spec: &EnsembleSpec, zetas: &[Complex64]) -> Result<f64> {
    WeightedPreKernel::new(spec)?.correlation_unrescaled(zetas)
}

/// Both sides of c_N·e^{−N(Q(ζ)+Q(η))/2}·κ_N = e^{−|z|²−|w|²+2zw}·κ̂_N.
pub fn transformed_limit_check(n: usize, tau: f64, p: f64, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
    let spec = EnsembleSpec::new(Potential::Elliptic { tau }, n, p, 0.0)?;
    let k = WeightedPreKernel::new(&spec)?;
    let lhs = k.value_scaled(z, w, KernelMode::Weighted)?.mul_complex(cocycle(n, tau, p, z, w));
    let g = -z.norm_sqr() - w.norm_sqr() + z * w * 2.0;
    let rhs = k.value_scaled(z, w, KernelMode::Transformed)? * ScaledValue::from_exp(g);
    Ok((lhs.reconstruct(), rhs.reconstruct()))
}
