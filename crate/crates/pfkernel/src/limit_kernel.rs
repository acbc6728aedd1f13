//! Limiting universality classes: the functions f_z, Wronskian pre-kernels κ,
//! one-point and k-point functions, and the complex counterparts 𝒦.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pfaffian::{pfaffian, SkewMatrix};
use crate::quad::{integrate, integrate_half_line, wronskian_sweep, Envelope, SweepPair};
use crate::specfun::{airy_scaled, erf, erfc, erfcx};

pub const KERNEL_TOL: f64 = 1e-12;
/// Half-width of the explicitly integrated window for the almost-Hermitian bulk Wronskian.
const AH_BULK_WINDOW: f64 = 400.0;
const TAIL_TERMS: usize = 14;
/// Gaussian decay margin: e^{−2·7²} ≈ 1e-43.
const GAUSS_MARGIN: f64 = 7.0;
/// Resolution floor for sweeps whose integrands carry ~1e-13 relative noise
/// (complex erfcx far out, Airy in the oscillatory sectors).
const NOISY_SWEEP_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum UniversalityClass {
    /// Non-Hermitian bulk, E = ℝ.
    NHBulk,
    /// Non-Hermitian edge, E = (−∞, 0).
    NHEdge,
    /// Almost-Hermitian bulk with τ_N = 1 − c²/(2N) at base point p, E = ℝ.
    AHBulk { c: f64, p: f64 },
    /// Almost-Hermitian edge with τ_N = 1 − c²/(2N)^{1/3}, E = (−∞, 0).
    AHEdge { c: f64 },
    /// Soft/hard edge of the disk-confined ensemble, E = (−∞, 0).
    SoftHard,
    /// Hard edge, E = (0, 1), no Gaussian weights.
    Hard,
}

/// Choice among equivalent f_z representations (they give the same κ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FVariant {
    /// The erfc forms for the non-Hermitian classes; the only form elsewhere.
    Standard,
    /// ½erf(√2(z−u)) in the bulk, ½(erfc(√2(z−u)) − erfc(√2z)) at the edge.
    Alternative,
}

impl UniversalityClass {
    pub fn ah_bulk(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0) || !(p.abs() < 2.0 * SQRT_2) {
            return Err(Error::domain(format!("almost-Hermitian bulk needs c > 0 and |p| < 2√2 (c = {c}, p = {p})")));
        }
        Ok(Self::AHBulk { c, p })
    }

    pub fn ah_edge(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain(format!("almost-Hermitian edge needs c > 0 (c = {c})")));
        }
        Ok(Self::AHEdge { c })
    }

    /// c̃ = c√(1 − p²/8).
    pub fn c_tilde(&self) -> Option<f64> {
        match *self {
            Self::AHBulk { c, p } => Some(c * (1.0 - p * p / 8.0).sqrt()),
            _ => None,
        }
    }

    /// Integration domain E as (lower, upper), with infinities.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::NHBulk | Self::AHBulk { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::NHEdge | Self::AHEdge { .. } | Self::SoftHard => (f64::NEG_INFINITY, 0.0),
            Self::Hard => (0.0, 1.0),
        }
    }

    /// Whether the rescaled process is confined to Re z ≤ 0 by a hard wall.
    pub fn has_wall(&self) -> bool {
        matches!(self, Self::SoftHard | Self::Hard)
    }

    /// Whether z can carry a point: off the real line and, for the wall classes, in Re z ≤ 0.
    pub fn supports(&self, z: Complex64) -> bool {
        z.im != 0.0 && !(self.has_wall() && z.re > 0.0)
    }

    pub fn gaussian_weight(&self) -> bool {
        !matches!(self, Self::Hard)
    }

    pub fn name(&self) -> String {
        match *self {
            Self::NHBulk => "nh-bulk".into(),
            Self::NHEdge => "nh-edge".into(),
            Self::AHBulk { c, p } => format!("ah-bulk(c={c},p={p})"),
            Self::AHEdge { c } => format!("ah-edge(c={c})"),
            Self::SoftHard => "soft-hard".into(),
            Self::Hard => "hard".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::AHBulk { c, p } => Self::ah_bulk(c, p).map(|_| ()),
            Self::AHEdge { c } => Self::ah_edge(c).map(|_| ()),
            _ => Ok(()),
        }
    }

    fn check_u(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if u.is_nan() || u < lo || u > hi {
            return Err(Error::domain(format!("u = {u} outside the closure of E = ({lo}, {hi}) for {}", self.name())));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// f and f′ per class

fn nh_f(z: Complex64, u: f64) -> Complex64 {
    erfc((z - u) * SQRT_2) * 0.5
}

fn nh_f_prime(z: Complex64, u: f64) -> Complex64 {
    let a = z - u;
    (-(a * a) * 2.0).exp() * (2.0 / PI).sqrt()
}

/// Absolute tolerance `rel` times a probed magnitude of ∫|f| over [a, b].
fn scaled_tol(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64, rel: f64) -> f64 {
    let m = (0..=8).map(|i| f(a + (b - a) * (i as f64 + 0.5) / 9.0).norm()).fold(0.0, f64::max);
    rel * (m * (b - a).abs()).max(1e-300)
}

/// ∫_a^b for either orientation of the endpoints, with relative tolerance `rel`.
fn signed_integral(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64, rel: f64) -> Result<Complex64> {
    if a == b {
        return Ok(c(0.0, 0.0));
    }
    let tol = scaled_tol(&mut f, a, b, rel);
    if a < b {
        Ok(integrate(f, a, b, tol)?.value)
    } else {
        Ok(-integrate(f, b, a, tol)?.value)
    }
}

/// F(a) = (1/π)∫_0^{c̃} e^{−t²/2} sin(2at)/t dt, so that f_z(u) = F(z − u) in the AH bulk.
fn ah_bulk_big_f(ct: f64, a: Complex64) -> Result<Complex64> {
    let g = |t: f64| {
        let x = a * (2.0 * t);
        let sinc = if x.norm() < 1e-8 { c(1.0, 0.0) - x * x / 6.0 } else { x.sin() / x };
        a * 2.0 * sinc * (-0.5 * t * t).exp()
    };
    Ok(signed_integral(g, 0.0, ct, 1e-13)? / PI)
}

/// F′(a) = (2/π)∫_0^{c̃} e^{−t²/2} cos(2at) dt in closed form.
fn ah_bulk_big_f_prime(ct: f64, a: Complex64) -> Complex64 {
    let i = c(0.0, 1.0);
    let xi1 = (i * a * -2.0 + ct) / SQRT_2;
    let xi2 = (i * a * 2.0 + ct) / SQRT_2;
    let gauss = (-(a * a) * 2.0).exp() * 2.0;
    let tail = ((i * a * (2.0 * ct)).exp() * erfcx(xi1) + (i * a * (-2.0 * ct)).exp() * erfcx(xi2)) * (-0.5 * ct * ct).exp();
    (gauss - tail) / (2.0 * PI).sqrt()
}

/// Exponent c³s + c⁶/12 − (2/3)ζ^{3/2} with ζ = 2cs + c⁴/4, written to avoid cancellation.
fn ah_edge_exponent(cc: f64, s: Complex64) -> Complex64 {
    let x = s * (8.0 / cc.powi(3));
    let k = cc.powi(6) / 12.0;
    let r = if x.norm() < 0.1 {
        // (1+x)^{3/2} − 1 − 3x/2 = Σ_{j≥2} C(3/2, j) x^j
        let mut coef = 1.0;
        let mut term = c(1.0, 0.0);
        let mut sum = c(0.0, 0.0);
        for j in 1..40 {
            coef *= (1.5 - (j - 1) as f64) / j as f64;
            term *= x;
            if j >= 2 {
                sum += term * coef;
            }
        }
        sum
    } else {
        (x + 1.0).powf(1.5) - 1.0 - x * 1.5
    };
    -r * k
}

fn ah_edge_f_prime(cc: f64, z: Complex64, u: f64) -> Complex64 {
    let s = z - u;
    let zeta = s * (2.0 * cc) + cc.powi(4) / 4.0;
    airy_scaled(zeta) * ah_edge_exponent(cc, s).exp() * (2.0 * cc)
}

fn soft_hard_f_prime(z: Complex64, u: f64) -> Complex64 {
    let a = z - u;
    (-(a * a) * 2.0).exp() * (2.0 / PI.sqrt()) / erfc(c(2.0 * u, 0.0)).re.sqrt()
}

/// f_z in the requested representation.
pub fn f_variant(class: &UniversalityClass, variant: FVariant, z: Complex64, u: f64) -> Result<Complex64> {
    class.validate()?;
    class.check_u(u)?;
    match (class, variant) {
        (UniversalityClass::NHBulk, FVariant::Alternative) => Ok(erf((z - u) * SQRT_2) * 0.5),
        (UniversalityClass::NHEdge, FVariant::Alternative) => Ok(nh_f(z, u) - nh_f(z, 0.0)),
        (UniversalityClass::NHBulk | UniversalityClass::NHEdge, _) => Ok(nh_f(z, u)),
        (UniversalityClass::AHBulk { .. }, _) => ah_bulk_big_f(class.c_tilde().unwrap(), z - u),
        (&UniversalityClass::AHEdge { c: cc }, _) => {
            signed_integral(|t| ah_edge_f_prime(cc, z, t), 0.0, u, 1e-13)
        }
        (UniversalityClass::SoftHard, _) => {
            let lo = (z.re.min(u) - GAUSS_MARGIN - z.im.abs()).min(-GAUSS_MARGIN);
            let head = nh_f(z, lo);
            Ok(head + signed_integral(|t| soft_hard_f_prime(z, t), lo, u, 1e-13)?)
        }
        (UniversalityClass::Hard, _) => {
            // t = v²: ∫_0^u t^{1/2}e^{2zt}dt = ∫_0^{√u} 2v² e^{2zv²} dv
            signed_integral(|v| (z * (2.0 * v * v)).exp() * (2.0 * v * v), 0.0, u.sqrt(), 1e-13)
        }
    }
}

pub fn f(class: &UniversalityClass, z: Complex64, u: f64) -> Result<Complex64> {
    f_variant(class, FVariant::Standard, z, u)
}

/// ∂_u f_z(u) for the standard representation (closed form for every class).
pub fn f_prime(class: &UniversalityClass, z: Complex64, u: f64) -> Result<Complex64> {
    class.validate()?;
    class.check_u(u)?;
    Ok(f_prime_unchecked(class, z, u))
}

fn f_prime_unchecked(class: &UniversalityClass, z: Complex64, u: f64) -> Complex64 {
    match *class {
        UniversalityClass::NHBulk | UniversalityClass::NHEdge => nh_f_prime(z, u),
        UniversalityClass::AHBulk { .. } => -ah_bulk_big_f_prime(class.c_tilde().unwrap(), z - u),
        UniversalityClass::AHEdge { c: cc } => ah_edge_f_prime(cc, z, u),
        UniversalityClass::SoftHard => soft_hard_f_prime(z, u),
        UniversalityClass::Hard => (z * (2.0 * u)).exp() * u.max(0.0).sqrt(),
    }
}

// ---------------------------------------------------------------------------
// Pre-kernels

fn prefactor(class: &UniversalityClass, z: Complex64, w: Complex64) -> Complex64 {
    if class.gaussian_weight() {
        (z * z + w * w).exp() * PI.sqrt()
    } else {
        c(1.0, 0.0)
    }
}

/// Lower point below which |f′| for both arguments is negligible (AH edge).
pub fn ah_edge_lower_cut(cc: f64, z: Complex64, w: Complex64) -> f64 {
    let top = z.re.max(w.re);
    let bottom = z.re.min(w.re);
    let ymax = z.im.abs().max(w.im.abs());
    let mut s = 1.0;
    while s < 1e6 {
        let e1 = ah_edge_exponent(cc, c(s, ymax)).re;
        let e2 = ah_edge_exponent(cc, c(s, 0.0)).re;
        if e1.max(e2) < -100.0 - 2.0 * ymax * ymax && s > top - bottom {
            break;
        }
        s *= 1.5;
    }
    (bottom - s).min(-1.0)
}

/// κ(z,w) = prefactor·∫_E W(f_w, f_z) du evaluated by a Chebyshev sweep.
pub fn prekernel_wronskian(
    class: &UniversalityClass,
    variant: FVariant,
    z: Complex64,
    w: Complex64,
    tol: f64,
) -> Result<Complex64> {
    class.validate()?;
    if z == w {
        return Ok(c(0.0, 0.0));
    }
    let h0 = 0.25;
    let value = match *class {
        UniversalityClass::NHBulk | UniversalityClass::NHEdge => {
            let sign = if variant == FVariant::Alternative && *class == UniversalityClass::NHBulk { -1.0 } else { 1.0 };
            let dz = move |u: f64| nh_f_prime(z, u) * sign;
            let dw = move |u: f64| nh_f_prime(w, u) * sign;
            let cls = *class;
            let cz = move |u: f64| f_variant(&cls, variant, z, u).unwrap_or(c(f64::NAN, f64::NAN));
            let cw = move |u: f64| f_variant(&cls, variant, w, u).unwrap_or(c(f64::NAN, f64::NAN));
            let ymax = z.im.abs().max(w.im.abs());
            let lo = z.re.min(w.re) - GAUSS_MARGIN - ymax;
            let hi = if *class == UniversalityClass::NHBulk { z.re.max(w.re) + GAUSS_MARGIN + ymax } else { 0.0 };
            let lo = lo.min(hi - 1.0);
            let pair = SweepPair { dz: &dz, dw: &dw, gz_anchor: cz(hi), gw_anchor: cw(hi), closed: Some((&cz, &cw)) };
            wronskian_sweep(&pair, hi, lo, hi, tol, h0)?.value
        }
        UniversalityClass::AHBulk { .. } => ah_bulk_wronskian(class.c_tilde().unwrap(), z, w, tol)?,
        UniversalityClass::AHEdge { c: cc } => {
            let dz = move |u: f64| ah_edge_f_prime(cc, z, u);
            let dw = move |u: f64| ah_edge_f_prime(cc, w, u);
            let lo = ah_edge_lower_cut(cc, z, w);
            let pair = SweepPair { dz: &dz, dw: &dw, gz_anchor: c(0.0, 0.0), gw_anchor: c(0.0, 0.0), closed: None };
            wronskian_sweep(&pair, 0.0, lo, 0.0, tol.max(NOISY_SWEEP_TOL), h0)?.value
        }
        UniversalityClass::SoftHard => {
            let ymax = z.im.abs().max(w.im.abs());
            let lo = (z.re.min(w.re) - GAUSS_MARGIN - ymax).min(-GAUSS_MARGIN);
            let dz = move |u: f64| soft_hard_f_prime(z, u);
            let dw = move |u: f64| soft_hard_f_prime(w, u);
            let pair = SweepPair { dz: &dz, dw: &dw, gz_anchor: nh_f(z, lo), gw_anchor: nh_f(w, lo), closed: None };
            wronskian_sweep(&pair, lo, lo, 0.0, tol, h0)?.value
        }
        UniversalityClass::Hard => {
            // u = v² turns W(f_w, f_z)du into the Wronskian of G(v) = f(v²) in v.
            let dz = move |v: f64| (z * (2.0 * v * v)).exp() * (2.0 * v * v);
            let dw = move |v: f64| (w * (2.0 * v * v)).exp() * (2.0 * v * v);
            let pair = SweepPair { dz: &dz, dw: &dw, gz_anchor: c(0.0, 0.0), gw_anchor: c(0.0, 0.0), closed: None };
            wronskian_sweep(&pair, 0.0, 0.0, 1.0, tol, h0)?.value
        }
    };
    Ok(prefactor(class, z, w) * value)
}

/// Closed forms: √π e^{z²+w²} erf(z−w) (NH bulk) and the single integral in the AH bulk.
pub fn prekernel_closed(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    class.validate()?;
    match *class {
        UniversalityClass::NHBulk => Ok(prefactor(class, z, w) * erf(z - w)),
        UniversalityClass::AHBulk { .. } => {
            let ct = class.c_tilde().unwrap();
            let b = z - w;
            let g = |t: f64| {
                let x = b * (2.0 * t);
                let sinc = if x.norm() < 1e-8 { c(1.0, 0.0) - x * x / 6.0 } else { x.sin() / x };
                b * 2.0 * sinc * (-t * t).exp()
            };
            let integral = signed_integral(g, 0.0, ct, 1e-13)? * 2.0;
            Ok((z * z + w * w).exp() * integral / PI.sqrt())
        }
        _ => Err(Error::Unsupported(format!("no closed-form pre-kernel for {}", class.name()))),
    }
}

/// κ(z,w): closed form where available, Wronskian sweep otherwise.
pub fn prekernel(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    match class {
        UniversalityClass::NHBulk | UniversalityClass::AHBulk { .. } => prekernel_closed(class, z, w),
        _ => prekernel_wronskian(class, FVariant::Standard, z, w, KERNEL_TOL),
    }
}

/// e^{−|z|²−|w|²}κ(z,w) for the Gaussian-weight classes, κ itself for the hard edge.
pub fn weighted_prekernel(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    let k = prekernel(class, z, w)?;
    Ok(if class.gaussian_weight() { k * (-z.norm_sqr() - w.norm_sqr()).exp() } else { k })
}

/// R(z) = (z̄ − z)·e^{−2|z|²}κ(z, z̄) (no Gaussian factor for the hard edge);
/// zero on the real line and beyond a hard wall.
pub fn one_point(class: &UniversalityClass, z: Complex64) -> Result<f64> {
    if !class.supports(z) {
        return Ok(0.0);
    }
    let v = (z.conj() - z) * weighted_prekernel(class, z, z.conj())?;
    Ok(v.re)
}

/// Limiting k-point function Π(z̄_j − z_j)·Pf[weighted κ on conjugate pairs].
pub fn correlation(class: &UniversalityClass, points: &[Complex64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Shape("at least one point required".into()));
    }
    if points.iter().any(|z| !class.supports(*z)) {
        return Ok(0.0);
    }
    let args: Vec<Complex64> = points.iter().flat_map(|z| [*z, z.conj()]).collect();
    let dim = args.len();
    let mut upper = vec![c(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            upper[i * dim + j] = weighted_prekernel(class, args[i], args[j])?;
        }
    }
    let m = SkewMatrix::from_upper(dim, |i, j| upper[i * dim + j])?;
    let pf = pfaffian(&m);
    let pref: Complex64 = points.iter().map(|z| z.conj() - z).product();
    let v = pref * pf;
    let scale: f64 = (0..dim)
        .map(|i| (0..dim).map(|j| m.get(i, j).norm_sqr()).sum::<f64>().sqrt().sqrt())
        .product::<f64>()
        * pref.norm();
    if v.im.abs() > 1e-8 * scale.max(v.re.abs()) {
        return Err(Error::accuracy("limiting correlation has a non-negligible imaginary part", v));
    }
    Ok(v.re)
}

// ---------------------------------------------------------------------------
// Complex counterparts

/// 𝒦(z,w) = 2√π e^{z²+w̄²}∫_E f′_z f′_{w̄} du (4∫_E f′_z f′_{w̄} du for the hard edge).
pub fn complex_counterpart(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    class.validate()?;
    let wb = w.conj();
    let tol = 1e-13;
    let ymax = z.im.abs().max(w.im.abs());
    match *class {
        UniversalityClass::AHBulk { .. } => complex_counterpart_closed(class, z, w),
        UniversalityClass::Hard => {
            let g = |v: f64| (z * (2.0 * v * v) + wb * (2.0 * v * v)).exp() * (2.0 * v * v * v);
            Ok(signed_integral(g, 0.0, 1.0, tol)? * 4.0)
        }
        _ => {
            let mut g = |u: f64| f_prime_unchecked(class, z, u) * f_prime_unchecked(class, wb, u);
            let hi = class.domain().1;
            let integral = if hi.is_finite() {
                let lo = match *class {
                    UniversalityClass::AHEdge { c: cc } => ah_edge_lower_cut(cc, z, wb),
                    _ => z.re.min(w.re).min(hi) - GAUSS_MARGIN - ymax,
                };
                signed_integral(g, lo, hi, tol)?
            } else {
                let center = 0.5 * (z.re + w.re);
                let width = std::f64::consts::FRAC_1_SQRT_2;
                let tol = scaled_tol(&mut g, center - 3.0, center + 3.0, tol);
                let left = integrate_half_line(g, center, Envelope::Gaussian { center, width }, tol)?.value;
                let right = integrate_half_line(
                    |u| g(-u),
                    -center,
                    Envelope::Gaussian { center: -center, width },
                    tol,
                )?
                .value;
                left + right
            };
            Ok((z * z + wb * wb).exp() * integral * (2.0 * PI.sqrt()))
        }
    }
}

/// Closed forms of 𝒦. The non-Hermitian edge and soft/hard lines carry the
/// constants produced by the defining integral (1 and 8/√π), which are the ones
/// that recover the bulk value 2 deep inside the droplet.
pub fn complex_counterpart_closed(class: &UniversalityClass, z: Complex64, w: Complex64) -> Result<Complex64> {
    class.validate()?;
    let wb = w.conj();
    match *class {
        UniversalityClass::NHBulk => Ok((z * wb * 2.0).exp() * 2.0),
        UniversalityClass::NHEdge => Ok((z * wb * 2.0).exp() * erfc(z + wb)),
        UniversalityClass::SoftHard => {
            let s = z + wb;
            let ymax = s.im.abs();
            let lo = (0.5 * s.re).min(0.0) - GAUSS_MARGIN - ymax;
            let g = |u: f64| (-(s - 2.0 * u) * (s - 2.0 * u)).exp() / erfc(c(2.0 * u, 0.0)).re;
            Ok((z * wb * 2.0).exp() * signed_integral(g, lo, 0.0, 1e-13)? * (8.0 / PI.sqrt()))
        }
        UniversalityClass::AHBulk { .. } => {
            let ct = class.c_tilde().unwrap();
            let b = z - wb;
            let integral = signed_integral(|t| (b * (2.0 * t)).cos() * (-t * t).exp(), 0.0, ct, 1e-13)? * 2.0;
            Ok((z * z + wb * wb).exp() * integral * (2.0 / PI.sqrt()))
        }
        UniversalityClass::Hard => {
            // 4∫_0^1 u e^{2us} du with s = z + w̄
            let s = z + wb;
            if s.norm() < 1e-6 {
                return Ok((c(1.0, 0.0) + s * (4.0 / 3.0) + s * s) * 2.0);
            }
            let a = s * 2.0;
            Ok(((a - 1.0) * a.exp() + 1.0) / (a * a) * 4.0)
        }
        _ => Err(Error::Unsupported(format!("no closed-form complex kernel for {}", class.name()))),
    }
}

/// (f at parameter c, its non-Hermitian limit) for the almost-Hermitian classes.
pub fn nh_limit_recovery(class: &UniversalityClass, z: Complex64, u: f64) -> Result<(Complex64, Complex64)> {
    let ah = f(class, z, u)?;
    let nh = match class {
        UniversalityClass::AHBulk { .. } => f_variant(&UniversalityClass::NHBulk, FVariant::Alternative, z, u)?,
        UniversalityClass::AHEdge { .. } => f_variant(&UniversalityClass::NHEdge, FVariant::Alternative, z, u)?,
        _ => return Err(Error::Unsupported("non-Hermitian recovery applies to the almost-Hermitian classes".into())),
    };
    Ok((ah, nh))
}

// ---------------------------------------------------------------------------
// Almost-Hermitian bulk Wronskian with analytic tails
//
// f_z(u) = ½erf(√2 a) − T(a), a = z − u, T(a) = (1/π)∫_{c̃}^∞ e^{−t²/2} sin(2at)/t dt.
// For |a| large, T(a) = e^{2iac̃}p₊ + e^{−2iac̃}p₋ with p± asymptotic series in 1/a.
// Beyond |u| = U the Wronskian splits into an exact boundary term, a smooth
// non-oscillating part (integrated numerically in s = U/|u|) and oscillating
// remainders of size O(U^{−3}).

struct TailSeries {
    ct: f64,
    /// g^{(m)}(c̃) for g(t) = e^{−t²/2}/t
    g: Vec<f64>,
}

impl TailSeries {
    fn new(ct: f64) -> Self {
        let e = (-0.5 * ct * ct).exp();
        // probabilists' Hermite He_k(c̃)
        let mut he = vec![1.0, ct];
        for k in 1..TAIL_TERMS {
            he.push(ct * he[k] - k as f64 * he[k - 1]);
        }
        let mut g = Vec::with_capacity(TAIL_TERMS);
        for m in 0..TAIL_TERMS {
            let mut s = 0.0;
            let mut binom = 1.0;
            for k in 0..=m {
                if k > 0 {
                    binom *= (m - k + 1) as f64 / k as f64;
                }
                let j = m - k;
                let inv_deriv = (if j % 2 == 0 { 1.0 } else { -1.0 }) * factorial(j) / ct.powi(j as i32 + 1);
                let gauss_deriv = (if k % 2 == 0 { 1.0 } else { -1.0 }) * he[k] * e;
                s += binom * gauss_deriv * inv_deriv;
            }
            g.push(s);
        }
        Self { ct, g }
    }

    /// P(x) = Σ g_m (ix)^{m+1} and P′(x).
    fn p(&self, x: Complex64) -> (Complex64, Complex64) {
        let ix = x * c(0.0, 1.0);
        let mut pow = ix;
        let mut val = c(0.0, 0.0);
        let mut der = c(0.0, 0.0);
        let mut pow_prev = c(1.0, 0.0);
        for (m, gm) in self.g.iter().enumerate() {
            val += pow * *gm;
            der += pow_prev * c(0.0, 1.0) * ((m + 1) as f64 * gm);
            pow_prev = pow;
            pow *= ix;
        }
        (val, der)
    }

    /// (p₊, p₋, dp₊/du, dp₋/du) for a = z − u.
    fn parts(&self, a: Complex64) -> [Complex64; 4] {
        let k = c(0.0, 2.0 * PI).inv();
        let xp = (a * 2.0).inv();
        let xm = -xp;
        let (pp, dpp) = self.p(xp);
        let (pm, dpm) = self.p(xm);
        [pp * k, -pm * k, dpp * xp * xp * 2.0 * k, dpm * xm * xm * 2.0 * k]
    }

    fn t_value(&self, a: Complex64) -> Complex64 {
        let [pp, pm, _, _] = self.parts(a);
        let ph = a * c(0.0, 2.0 * self.ct);
        ph.exp() * pp + (-ph).exp() * pm
    }

    /// Non-oscillating part of T(z−u)·∂_u T(w−u)... arranged as B·A′ − A·B′.
    fn non_oscillating(&self, z: Complex64, w: Complex64, u: f64) -> Complex64 {
        let pa = self.parts(z - u);
        let pb = self.parts(w - u);
        let mut total = c(0.0, 0.0);
        for (sigma, ia, ib) in [(1.0, 0usize, 1usize), (-1.0, 1, 0)] {
            let e = ((z - w) * c(0.0, 2.0 * self.ct * sigma)).exp();
            let (a, da) = (pa[ia], pa[ia + 2]);
            let (b, db) = (pb[ib], pb[ib + 2]);
            total += e * (a * b * c(0.0, -4.0 * sigma * self.ct) + b * da - a * db);
        }
        total
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn ah_bulk_wronskian(ct: f64, z: Complex64, w: Complex64, tol: f64) -> Result<Complex64> {
    let big_u = AH_BULK_WINDOW + z.norm().max(w.norm());
    let dz = move |u: f64| -ah_bulk_big_f_prime(ct, z - u);
    let dw = move |u: f64| -ah_bulk_big_f_prime(ct, w - u);
    let pair = SweepPair {
        dz: &dz,
        dw: &dw,
        gz_anchor: ah_bulk_big_f(ct, z)?,
        gw_anchor: ah_bulk_big_f(ct, w)?,
        closed: None,
    };
    let body = wronskian_sweep(&pair, 0.0, -big_u, big_u, tol.max(NOISY_SWEEP_TOL), 0.25)?.value;
    let series = TailSeries::new(ct);
    let boundary = |u: f64| (series.t_value(z - u) - series.t_value(w - u)) * -0.5;
    let upper = signed_integral(|s| series.non_oscillating(z, w, big_u / s) * (big_u / (s * s)), 0.0, 1.0, 1e-12)?;
    let lower = signed_integral(|s| series.non_oscillating(z, w, -big_u / s) * (big_u / (s * s)), 0.0, 1.0, 1e-12)?;
    Ok(body + boundary(big_u) + boundary(-big_u) + upper + lower)
}
