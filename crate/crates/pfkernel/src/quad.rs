//! Deterministic quadrature: adaptive Gauss–Kronrod, half-line integrals with
//! supplied decay envelopes, cumulative antiderivative tables, and a Chebyshev
//! panel sweep for Wronskian integrals of running antiderivatives.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const NESTED_TOL: f64 = 1e-8;
const MAX_EVALUATIONS: usize = 400_000;
const REL_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let value = resk * half;
    resasc *= half.abs();
    resabs *= half.abs();
    let mut err = ((resk - resg) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex integrand on [a, b].
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::domain(format!("integrate: need a < b and tol > 0 (a={a}, b={b}, tol={tol})")));
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v0, error: e0 });
    let mut total = v0;
    let mut total_err = e0;
    loop {
        let target = tol.max(REL_FLOOR * total.norm());
        if total_err <= target {
            break;
        }
        if evaluations >= MAX_EVALUATIONS {
            return Err(Error::accuracy(
                format!("integrate on [{a}, {b}] did not converge (error estimate {total_err:e})"),
                total,
            ));
        }
        let seg = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            return Err(Error::accuracy(format!("integrate on [{a}, {b}]: interval underflow"), total));
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // re-sum to remove drift from incremental updates
    let mut value = Complex64::new(0.0, 0.0);
    let mut error_estimate = 0.0;
    for s in heap.iter() {
        value += s.value;
        error_estimate += s.error;
    }
    Ok(QuadResult { value, error_estimate, evaluations })
}

/// Decay envelope of an integrand on (−∞, upper].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    /// |f(u)| ≲ A·exp(rate·u) with rate > 0.
    Exponential { rate: f64 },
    /// |f(u)| ≲ A·exp(−((u − center)/width)²).
    Gaussian { center: f64, width: f64 },
}

impl Envelope {
    /// Point below which the envelope, normalized to `amplitude` at `upper`, is below `level`.
    fn cut(&self, upper: f64, amplitude: f64, level: f64) -> f64 {
        let ratio = (amplitude / level).max(1.0).ln();
        match *self {
            Envelope::Exponential { rate } => upper - ratio / rate - 1.0 / rate,
            Envelope::Gaussian { center, width } => {
                let peak = center.min(upper);
                let base = ((upper - center) / width).powi(2).max(0.0);
                let extra = if upper < center { base } else { 0.0 };
                peak - width * (ratio + extra + 1.0).sqrt()
            }
        }
    }
}

/// ∫_{−∞}^{upper} f(u) du by certified truncation followed by adaptive integration.
pub fn integrate_half_line<F: FnMut(f64) -> Complex64>(
    mut f: F,
    upper: f64,
    envelope: Envelope,
    tol: f64,
) -> Result<QuadResult> {
    match envelope {
        Envelope::Exponential { rate } if !(rate > 0.0) => {
            return Err(Error::domain("integrate_half_line: exponential rate must be positive"))
        }
        Envelope::Gaussian { width, .. } if !(width > 0.0) => {
            return Err(Error::domain("integrate_half_line: gaussian width must be positive"))
        }
        _ => {}
    }
    let level = tol * 1e-2;
    let mut amplitude: f64 = 0.0;
    let probe_scale = match envelope {
        Envelope::Exponential { rate } => 1.0 / rate,
        Envelope::Gaussian { width, .. } => width,
    };
    for k in 0..8 {
        let u = match envelope {
            Envelope::Gaussian { center, .. } if center < upper => center - k as f64 * 0.25 * probe_scale,
            _ => upper - k as f64 * 0.25 * probe_scale,
        };
        amplitude = amplitude.max(f(u).norm());
    }
    let mut cut = envelope.cut(upper, amplitude.max(1.0), level);
    let mut certified = false;
    for _ in 0..60 {
        let width = (upper - cut).max(probe_scale);
        let probes = [cut, cut - 0.5 * probe_scale, cut - probe_scale];
        if probes.iter().all(|&u| f(u).norm() <= level) {
            certified = true;
            break;
        }
        cut = upper - 2.0 * width;
    }
    if !certified {
        return Err(Error::accuracy("integrate_half_line: decay envelope never certified", Complex64::new(0.0, 0.0)));
    }
    integrate(f, cut, upper, tol)
}

/// Running integrals ∫_{anchor}^{node} f for a sorted node list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativeTable {
    pub nodes: Vec<f64>,
    pub cumulative: Vec<Complex64>,
    pub anchor: f64,
}

impl CumulativeTable {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Table of ∫_{anchor}^{node_i} f, panel by panel.
pub fn cumulative<F: FnMut(f64) -> Complex64>(
    mut f: F,
    anchor: f64,
    nodes: &[f64],
    tol: f64,
) -> Result<CumulativeTable> {
    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("cumulative: nodes must be strictly increasing"));
    }
    let mut cum = vec![Complex64::new(0.0, 0.0); nodes.len()];
    let split = nodes.partition_point(|&x| x < anchor);
    let panel = |f: &mut F, a: f64, b: f64| -> Result<Complex64> {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        integrate(&mut *f, a, b, tol).map(|r| r.value).map_err(|e| match e {
            Error::Accuracy { message, best } => {
                Error::Accuracy { message: format!("cumulative panel [{a}, {b}]: {message}"), best }
            }
            other => other,
        })
    };
    let mut run = Complex64::new(0.0, 0.0);
    let mut prev = anchor;
    for i in split..nodes.len() {
        run += panel(&mut f, prev, nodes[i])?;
        cum[i] = run;
        prev = nodes[i];
    }
    let mut run = Complex64::new(0.0, 0.0);
    let mut prev = anchor;
    for i in (0..split).rev() {
        run -= panel(&mut f, nodes[i], prev)?;
        cum[i] = run;
        prev = nodes[i];
    }
    Ok(CumulativeTable { nodes: nodes.to_vec(), cumulative: cum, anchor })
}

// ---------------------------------------------------------------------------
// Chebyshev panel sweep

const CHEB_DEGREE: usize = 32;
const CHEB_POINTS: usize = CHEB_DEGREE + 1;

struct ChebRule {
    /// nodes on [−1, 1], ascending
    x: [f64; CHEB_POINTS],
    /// values → coefficients
    to_coef: Vec<[f64; CHEB_POINTS]>,
    /// values → ∫_{−1}^{x_i} of the interpolant
    integ: Vec<[f64; CHEB_POINTS]>,
}

fn cheb_rule() -> &'static ChebRule {
    static RULE: OnceLock<ChebRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = CHEB_DEGREE;
        let pi = std::f64::consts::PI;
        let mut x = [0.0; CHEB_POINTS];
        let theta: Vec<f64> = (0..=n).map(|j| pi - pi * j as f64 / n as f64).collect();
        for j in 0..=n {
            x[j] = theta[j].cos();
        }
        // coefficients a_k = (2/n) Σ'' f_j T_k(x_j), with a_0 and a_n halved
        let mut to_coef = vec![[0.0; CHEB_POINTS]; CHEB_POINTS];
        for k in 0..=n {
            for j in 0..=n {
                let mut w = 2.0 / n as f64 * (k as f64 * theta[j]).cos();
                if j == 0 || j == n {
                    w *= 0.5;
                }
                if k == 0 || k == n {
                    w *= 0.5;
                }
                to_coef[k][j] = w;
            }
        }
        // antiderivative of Σ a_k T_k in coefficient space (degree n+1)
        let mut integ = vec![[0.0; CHEB_POINTS]; CHEB_POINTS];
        for j in 0..=n {
            let a: Vec<f64> = (0..=n).map(|k| to_coef[k][j]).collect();
            let mut b = vec![0.0; n + 2];
            for k in 0..=n {
                match k {
                    0 => b[1] += a[0],
                    1 => b[2] += a[1] / 4.0,
                    _ => {
                        b[k + 1] += a[k] / (2.0 * (k + 1) as f64);
                        b[k - 1] -= a[k] / (2.0 * (k - 1) as f64);
                    }
                }
            }
            // evaluate at nodes and subtract the value at −1
            let at_minus_one: f64 = b.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum();
            for i in 0..=n {
                let v: f64 = b.iter().enumerate().map(|(k, bk)| bk * (k as f64 * theta[i]).cos()).sum();
                integ[i][j] = v - at_minus_one;
            }
        }
        ChebRule { x, to_coef, integ }
    })
}

fn coef_tail(rule: &ChebRule, v: &[Complex64; CHEB_POINTS]) -> (f64, f64) {
    let mut max: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for k in 0..CHEB_POINTS {
        let mut a = Complex64::new(0.0, 0.0);
        for j in 0..CHEB_POINTS {
            a += v[j] * rule.to_coef[k][j];
        }
        let m = a.norm();
        max = max.max(m);
        if k >= 3 * CHEB_DEGREE / 4 {
            tail = tail.max(m);
        }
    }
    (tail, max)
}

const SCALE_PROBES: usize = 64;

/// A pair of functions (g_z, g_w) known through their derivatives and their
/// values at an anchor point, optionally with closed forms for the values.
pub struct SweepPair<'a> {
    pub dz: &'a dyn Fn(f64) -> Complex64,
    pub dw: &'a dyn Fn(f64) -> Complex64,
    pub gz_anchor: Complex64,
    pub gw_anchor: Complex64,
    pub closed: Option<(&'a dyn Fn(f64) -> Complex64, &'a dyn Fn(f64) -> Complex64)>,
}

/// ∫_{lo}^{hi} (g_w·g_z′ − g_z·g_w′) du, sweeping outward from `anchor` with
/// adaptive Chebyshev panels; g is carried by spectral cumulative integration.
pub fn wronskian_sweep(pair: &SweepPair, anchor: f64, lo: f64, hi: f64, tol: f64, h0: f64) -> Result<QuadResult> {
    if !(lo <= anchor && anchor <= hi) {
        return Err(Error::domain(format!("wronskian_sweep: anchor {anchor} outside [{lo}, {hi}]")));
    }
    let mut out = QuadResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 };
    // Seed the resolution floor with a coarse look at the whole interval, so panels in a
    // decaying tail swept before the bulk are not held to full relative accuracy.
    let mut scale: f64 = 0.0;
    for k in 0..=SCALE_PROBES {
        let u = lo + (hi - lo) * k as f64 / SCALE_PROBES as f64;
        let m = (pair.dz)(u).norm().max((pair.dw)(u).norm());
        if m.is_finite() {
            scale = scale.max(m);
        }
    }
    out.evaluations += 2 * (SCALE_PROBES + 1);
    for dir in [1.0, -1.0] {
        let span = if dir > 0.0 { hi - anchor } else { anchor - lo };
        if span <= 0.0 {
            continue;
        }
        sweep_one_side(pair, anchor, dir, span, tol, h0, &mut scale, &mut out)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn sweep_one_side(
    pair: &SweepPair,
    anchor: f64,
    dir: f64,
    span: f64,
    tol: f64,
    h0: f64,
    scale: &mut f64,
    out: &mut QuadResult,
) -> Result<()> {
    let rule = cheb_rule();
    let h_min = span * 1e-9;
    let res_tol = (tol * 1e-2).max(2e-16);
    let (mut gz, mut gw) = (pair.gz_anchor, pair.gw_anchor);
    let mut s = 0.0;
    let mut h = h0.min(span);
    let mut dz = [Complex64::new(0.0, 0.0); CHEB_POINTS];
    let mut dw = [Complex64::new(0.0, 0.0); CHEB_POINTS];
    while s < span {
        let mut b = (s + h).min(span);
        if span - b < 0.25 * h {
            b = span;
        }
        let len = b - s;
        for j in 0..CHEB_POINTS {
            let u = anchor + dir * (s + 0.5 * len * (rule.x[j] + 1.0));
            dz[j] = (pair.dz)(u) * dir;
            dw[j] = (pair.dw)(u) * dir;
        }
        out.evaluations += 2 * CHEB_POINTS;
        let (tz, mz) = coef_tail(rule, &dz);
        let (tw, mw) = coef_tail(rule, &dw);
        *scale = scale.max(mz).max(mw);
        let floor = res_tol * 1e-3 * *scale;
        let unresolved = tz > res_tol * mz + floor || tw > res_tol * mw + floor;
        if unresolved && len > h_min {
            h = 0.5 * len;
            continue;
        }
        if unresolved {
            return Err(Error::accuracy(
                format!("wronskian_sweep: unresolved panel near u = {}", anchor + dir * s),
                out.value,
            ));
        }
        let mut vz = [Complex64::new(0.0, 0.0); CHEB_POINTS];
        let mut vw = [Complex64::new(0.0, 0.0); CHEB_POINTS];
        for i in 0..CHEB_POINTS {
            if let Some((cz, cw)) = pair.closed {
                let u = anchor + dir * (s + 0.5 * len * (rule.x[i] + 1.0));
                vz[i] = cz(u);
                vw[i] = cw(u);
            } else {
                let (mut iz, mut iw) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for j in 0..CHEB_POINTS {
                    iz += dz[j] * rule.integ[i][j];
                    iw += dw[j] * rule.integ[i][j];
                }
                vz[i] = gz + iz * (0.5 * len);
                vw[i] = gw + iw * (0.5 * len);
            }
        }
        let mut w = [Complex64::new(0.0, 0.0); CHEB_POINTS];
        for i in 0..CHEB_POINTS {
            w[i] = vw[i] * dz[i] - vz[i] * dw[i];
        }
        let mut panel = Complex64::new(0.0, 0.0);
        for j in 0..CHEB_POINTS {
            panel += w[j] * rule.integ[CHEB_POINTS - 1][j];
        }
        // w was built from s-derivatives; one factor of dir restores the u-orientation
        // and the panel measure |du| = ds.
        out.value += panel * (0.5 * len) * dir;
        let (tw_w, _) = coef_tail(rule, &w);
        out.error_estimate += tw_w * len;
        gz = vz[CHEB_POINTS - 1];
        gw = vw[CHEB_POINTS - 1];
        s = b;
        h = (1.6 * len).min(span);
    }
    Ok(())
}
