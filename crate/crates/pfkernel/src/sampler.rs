//! Single-site Metropolis sampling of the symplectic Gibbs measure on the upper
//! half-plane, and binned empirical one-point intensities with batch-means errors.
//!
//! Intensity convention: every sampled point ζ stands for the conjugate pair
//! {ζ, ζ̄}, each counted with weight ½, and counts are divided by the number of
//! configurations and by the rescaled bin area in units of dA = d²z/π. The
//! histogram then estimates R_{N,1} directly, for any rotation angle θ.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensembles::{potential_value, EnsembleSpec, Potential, RescaleMap};
use crate::error::{Error, Result};
use crate::numfmt::float;
use crate::quad::integrate;

/// Sweeps between full recomputations of the log density.
pub const DRIFT_CHECK_INTERVAL: u64 = 10_000;
/// Allowed relative drift of the incrementally updated log density.
pub const DRIFT_TOL: f64 = 1e-9;
/// Batches used by [`empirical_onepoint`] for standard errors.
pub const DEFAULT_BATCHES: usize = 40;
const TUNE_WINDOW: u64 = 100;
const TARGET_ACCEPTANCE: (f64, f64) = (0.2, 0.5);

/// 2Σ_{j>k}(ln|ζ_j−ζ_k| + ln|ζ_j−ζ̄_k|) + 2Σ_j ln|ζ_j−ζ̄_j| − NΣ_j Q(ζ_j);
/// −∞ if a point is real or outside the support.
pub fn log_gibbs_density(spec: &EnsembleSpec, points: &[Complex64]) -> f64 {
    let n = spec.n as f64;
    let mut total = 0.0;
    for (j, &a) in points.iter().enumerate() {
        let q = potential_value(spec, a);
        if a.im == 0.0 || q.is_infinite() {
            return f64::NEG_INFINITY;
        }
        total += 2.0 * (2.0 * a.im.abs()).ln() - n * q;
        for &b in &points[..j] {
            total += 2.0 * ((a - b).norm().ln() + (a - b.conj()).norm().ln());
        }
    }
    total
}

/// Contribution of site j at position z: the terms of the log density involving ζ_j.
fn site_energy(spec: &EnsembleSpec, points: &[Complex64], j: usize, z: Complex64) -> f64 {
    let mut e = 2.0 * (2.0 * z.im).ln() - spec.n as f64 * potential_value(spec, z);
    for (k, &b) in points.iter().enumerate() {
        if k != j {
            e += 2.0 * ((z - b).norm().ln() + (z - b.conj()).norm().ln());
        }
    }
    e
}

#[derive(Clone, Debug)]
pub struct ChainState {
    pub spec: EnsembleSpec,
    pub points: Vec<Complex64>,
    pub log_density: f64,
    rng: ChaCha8Rng,
    pub step_scale: f64,
    pub accepted: u64,
    pub proposed: u64,
    pub sweeps: u64,
    /// Largest relative drift seen at the periodic full recomputations.
    pub max_drift: f64,
}

impl ChainState {
    /// Random start inside the upper half of the droplet (or of the disk).
    pub fn new(spec: &EnsembleSpec, seed: u64, step_scale: f64) -> Result<Self> {
        if !(step_scale > 0.0 && step_scale.is_finite()) {
            return Err(Error::domain(format!("step scale {step_scale} must be positive")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = match spec.potential {
            Potential::Elliptic { tau } => (2f64.sqrt() * (1.0 + tau), 2f64.sqrt() * (1.0 - tau)),
            _ => {
                let r = spec.potential.wall_radius().unwrap_or(2f64.sqrt());
                (r, r)
            }
        };
        let mut points = Vec::with_capacity(spec.n);
        while points.len() < spec.n {
            let z = Complex64::new(a * rng.random_range(-1.0..1.0), b * rng.random_range(0.0..1.0));
            if z.im > 0.0 && (z.re / a).powi(2) + (z.im / b).powi(2) < 0.95 && spec.potential.in_support(z) {
                points.push(z);
            }
        }
        let log_density = log_gibbs_density(spec, &points);
        Ok(Self {
            spec: *spec,
            points,
            log_density,
            rng,
            step_scale,
            accepted: 0,
            proposed: 0,
            sweeps: 0,
            max_drift: 0.0,
        })
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// One Metropolis update per site, in index order.
    pub fn sweep(&mut self) {
        for j in 0..self.points.len() {
            let old = self.points[j];
            let dz = Complex64::new(self.rng.sample(StandardNormal), self.rng.sample(StandardNormal)) * self.step_scale;
            let new = old + dz;
            self.proposed += 1;
            if new.im <= 0.0 || !self.spec.potential.in_support(new) {
                continue;
            }
            let delta = site_energy(&self.spec, &self.points, j, new) - site_energy(&self.spec, &self.points, j, old);
            let u: f64 = self.rng.random();
            if delta >= 0.0 || u.ln() < delta {
                self.points[j] = new;
                self.log_density += delta;
                self.accepted += 1;
            }
        }
        self.sweeps += 1;
        if self.sweeps % DRIFT_CHECK_INTERVAL == 0 {
            self.resync();
        }
    }

    /// Recomputes the log density from scratch; returns the relative drift.
    pub fn resync(&mut self) -> f64 {
        let full = log_gibbs_density(&self.spec, &self.points);
        let drift = (full - self.log_density).abs() / full.abs().max(1.0);
        self.max_drift = self.max_drift.max(drift);
        self.log_density = full;
        drift
    }

    fn reset_counters(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub sweep: u64,
    pub points: Vec<Complex64>,
}

/// Post-burn-in configurations, one per sweep.
#[derive(Clone, Debug)]
pub struct SampleStream {
    state: ChainState,
    remaining: u64,
}

impl SampleStream {
    pub fn state(&self) -> &ChainState {
        &self.state
    }
}

impl Iterator for SampleStream {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        self.state.sweep();
        Some(Sample { sweep: self.state.sweeps, points: self.state.points.clone() })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SampleStream {}

/// Runs the burn-in (10% of `sweeps`, step scale tuned towards acceptance in
/// [0.2, 0.5]) and returns the stream of the remaining sweeps with the step frozen.
pub fn run_chain(spec: &EnsembleSpec, sweeps: u64, seed: u64, step_scale: f64) -> Result<SampleStream> {
    if sweeps == 0 {
        return Err(Error::domain("at least one sweep is required"));
    }
    let mut state = ChainState::new(spec, seed, step_scale)?;
    let burn = sweeps / 10;
    let window = TUNE_WINDOW.min(burn.max(1));
    for s in 1..=burn {
        state.sweep();
        if s % window == 0 {
            let rate = state.acceptance_rate();
            if rate < TARGET_ACCEPTANCE.0 {
                state.step_scale *= 0.7;
            } else if rate > TARGET_ACCEPTANCE.1 {
                state.step_scale *= 1.4;
            }
            state.reset_counters();
        }
    }
    state.reset_counters();
    Ok(SampleStream { state, remaining: sweeps - burn })
}

/// CSV dump of a sample stream: `sweep,index,re,im`.
pub fn write_samples_csv<W: Write>(mut out: W, samples: impl IntoIterator<Item = Sample>) -> io::Result<()> {
    writeln!(out, "sweep,index,re,im")?;
    for s in samples {
        for (i, z) in s.points.iter().enumerate() {
            writeln!(out, "{},{},{},{}", s.sweep, i, float(z.re), float(z.im))?;
        }
    }
    Ok(())
}

/// Rectangular binning window in rescaled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if !(y.0 >= 0.0) || ![x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("histogram window must be finite and lie in the closed upper half-plane"));
        }
        Ok(Self { x0: x.0, x1: x.1, y0: y.0, y1: y.1, nx, ny })
    }

    pub fn is_empty(&self) -> bool {
        self.nx == 0 || self.ny == 0 || !(self.x1 > self.x0) || !(self.y1 > self.y0)
    }

    pub fn bins(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.nx * self.ny
        }
    }

    fn dx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    fn dy(&self) -> f64 {
        (self.y1 - self.y0) / self.ny as f64
    }

    /// Bin area in units of dA = d²z/π.
    pub fn bin_area(&self) -> f64 {
        self.dx() * self.dy() / PI
    }

    /// Row-major (x fastest) bin index of z.
    pub fn bin_index(&self, z: Complex64) -> Option<usize> {
        if self.is_empty() || z.re < self.x0 || z.re >= self.x1 || z.im < self.y0 || z.im >= self.y1 {
            return None;
        }
        let i = (((z.re - self.x0) / self.dx()) as usize).min(self.nx - 1);
        let j = (((z.im - self.y0) / self.dy()) as usize).min(self.ny - 1);
        Some(j * self.nx + i)
    }

    /// (x0, x1, y0, y1) of bin b.
    pub fn bin_rect(&self, b: usize) -> (f64, f64, f64, f64) {
        let (i, j) = (b % self.nx, b / self.nx);
        let x = self.x0 + i as f64 * self.dx();
        let y = self.y0 + j as f64 * self.dy();
        (x, x + self.dx(), y, y + self.dy())
    }

    pub fn bin_center(&self, b: usize) -> Complex64 {
        let (x0, x1, y0, y1) = self.bin_rect(b);
        Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    }
}

/// Streaming accumulator for the empirical one-point intensity.
#[derive(Clone, Debug)]
pub struct OnePointAccumulator {
    map: RescaleMap,
    window: Window,
    batch_len: u64,
    counts: Vec<f64>,
    batch_counts: Vec<f64>,
    batch_sum: Vec<f64>,
    batch_sq: Vec<f64>,
    batches: usize,
    in_batch: u64,
    configs: u64,
}

impl OnePointAccumulator {
    pub fn new(map: RescaleMap, window: Window, batch_len: u64) -> Self {
        let b = window.bins();
        Self {
            map,
            window,
            batch_len: batch_len.max(1),
            counts: vec![0.0; b],
            batch_counts: vec![0.0; b],
            batch_sum: vec![0.0; b],
            batch_sq: vec![0.0; b],
            batches: 0,
            in_batch: 0,
            configs: 0,
        }
    }

    pub fn add(&mut self, points: &[Complex64]) {
        for &zeta in points {
            for w in [zeta, zeta.conj()] {
                if let Some(b) = self.window.bin_index(self.map.from_zeta(w)) {
                    self.batch_counts[b] += 0.5;
                }
            }
        }
        self.configs += 1;
        self.in_batch += 1;
        if self.in_batch == self.batch_len {
            let norm = self.batch_len as f64 * self.window.bin_area();
            for b in 0..self.counts.len() {
                let c = std::mem::take(&mut self.batch_counts[b]);
                self.counts[b] += c;
                self.batch_sum[b] += c / norm;
                self.batch_sq[b] += (c / norm).powi(2);
            }
            self.batches += 1;
            self.in_batch = 0;
        }
    }

    /// Merges an accumulator over the same map, window and batch length.
    pub fn merge(&mut self, other: &OnePointAccumulator) -> Result<()> {
        if self.window != other.window || self.map != other.map || self.batch_len != other.batch_len {
            return Err(Error::Shape("accumulators differ in map, window or batch length".into()));
        }
        for b in 0..self.counts.len() {
            self.counts[b] += other.counts[b];
            self.batch_counts[b] += other.batch_counts[b];
            self.batch_sum[b] += other.batch_sum[b];
            self.batch_sq[b] += other.batch_sq[b];
        }
        self.batches += other.batches;
        self.configs += other.configs;
        self.in_batch += other.in_batch;
        Ok(())
    }

    pub fn finish(mut self) -> OnePointHistogram {
        for b in 0..self.counts.len() {
            self.counts[b] += self.batch_counts[b];
        }
        let area = self.window.bin_area();
        let norm = self.configs.max(1) as f64 * area;
        let intensity: Vec<f64> = self.counts.iter().map(|c| c / norm).collect();
        let stderr = (0..self.counts.len())
            .map(|b| {
                if self.batches >= 2 {
                    let m = self.batches as f64;
                    let mean = self.batch_sum[b] / m;
                    ((self.batch_sq[b] / m - mean * mean).max(0.0) / (m - 1.0)).sqrt()
                } else {
                    // Poisson error of a sum of weight-½ hits
                    (0.5 * self.counts[b]).sqrt() / norm
                }
            })
            .collect();
        OnePointHistogram { window: self.window, configs: self.configs, batches: self.batches, counts: self.counts, intensity, stderr }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnePointHistogram {
    pub window: Window,
    pub configs: u64,
    pub batches: usize,
    /// Weighted hit counts per bin.
    pub counts: Vec<f64>,
    pub intensity: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Bin-by-bin comparison of a histogram with an analytic intensity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Bin averages of the analytic intensity.
    pub expected: Vec<f64>,
    /// |observed − expected|/stderr per bin (∞ where stderr vanishes but the values differ).
    pub z_scores: Vec<f64>,
    pub max_z: f64,
}

impl OnePointHistogram {
    pub fn is_empty(&self) -> bool {
        self.intensity.is_empty()
    }

    /// Σ intensity·area: the mean number of points per configuration in the window.
    pub fn mass(&self) -> f64 {
        self.intensity.iter().sum::<f64>() * self.window.bin_area()
    }

    /// CSV with columns `x,y,intensity,stderr` at the bin centres.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,intensity,stderr")?;
        for b in 0..self.intensity.len() {
            let c = self.window.bin_center(b);
            writeln!(out, "{},{},{},{}", float(c.re), float(c.im), float(self.intensity[b]), float(self.stderr[b]))?;
        }
        Ok(())
    }

    /// Compares against the bin averages of `density` (nested adaptive quadrature).
    pub fn compare<F: Fn(Complex64) -> Result<f64>>(&self, density: F) -> Result<Comparison> {
        let w = &self.window;
        let mut expected = Vec::with_capacity(self.intensity.len());
        for b in 0..self.intensity.len() {
            let (x0, x1, y0, y1) = w.bin_rect(b);
            let mut failure = None;
            let outer = integrate(
                |x| {
                    let inner = integrate(
                        |y| match density(Complex64::new(x, y)) {
                            Ok(v) => Complex64::new(v, 0.0),
                            Err(e) => {
                                failure.get_or_insert(e);
                                Complex64::new(0.0, 0.0)
                            }
                        },
                        y0,
                        y1,
                        1e-9,
                    );
                    match inner {
                        Ok(r) => r.value,
                        Err(e) => {
                            failure.get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                },
                x0,
                x1,
                1e-9,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            expected.push(outer.value.re / ((x1 - x0) * (y1 - y0)));
        }
        let z_scores: Vec<f64> = expected
            .iter()
            .zip(self.intensity.iter().zip(&self.stderr))
            .map(|(e, (o, s))| {
                let d = (o - e).abs();
                if *s > 0.0 {
                    d / s
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let max_z = z_scores.iter().cloned().fold(0.0, f64::max);
        Ok(Comparison { expected, z_scores, max_z })
    }
}

/// Histogram of stored configurations with [`DEFAULT_BATCHES`] batch means.
pub fn empirical_onepoint(samples: &[Vec<Complex64>], map: RescaleMap, window: Window) -> OnePointHistogram {
    let batch_len = (samples.len() / DEFAULT_BATCHES).max(1) as u64;
    let mut acc = OnePointAccumulator::new(map, window, batch_len);
    for s in samples {
        acc.add(s);
    }
    acc.finish()
}
