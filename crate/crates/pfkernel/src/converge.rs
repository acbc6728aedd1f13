//! Convergence harness: deviations R_{N,1} − R between finite-N and limiting
//! one-point functions, power-law rate fits and scaled profiles N^r(R_N − R).

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::finite_kernel::WeightedPreKernel;
use crate::limit_kernel::{one_point, UniversalityClass};
use crate::numfmt::float;

/// Deviations below this are treated as converged to round-off and left out of fits.
pub const NOISE_FLOOR: f64 = 1e-12;
pub const DEFAULT_LADDER: [usize; 4] = [50, 100, 200, 400];

/// A finite-N ensemble sequence paired with its limiting class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Elliptic with τ_N = 1 − c²/(2N)^{1/3} at the right edge p = √2(1+τ_N).
    AHEdge { c: f64 },
    /// Elliptic with τ_N = 1 − c²/(2N) at the fixed bulk point p.
    AHBulk { c: f64, p: f64 },
    /// Soft/hard disk at p = √2.
    SoftHard,
    /// Hard disk of radius √2ρ at p = √2ρ.
    Hard { rho: f64 },
}

impl Family {
    pub fn class(&self) -> Result<UniversalityClass> {
        match *self {
            Family::AHEdge { c } => UniversalityClass::ah_edge(c),
            Family::AHBulk { c, p } => UniversalityClass::ah_bulk(c, p),
            Family::SoftHard => Ok(UniversalityClass::SoftHard),
            Family::Hard { .. } => Ok(UniversalityClass::Hard),
        }
    }

    pub fn tau(&self, n: usize) -> Option<f64> {
        let n = n as f64;
        match *self {
            Family::AHEdge { c } => Some(1.0 - c * c / (2.0 * n).cbrt()),
            Family::AHBulk { c, .. } => Some(1.0 - c * c / (2.0 * n)),
            _ => None,
        }
    }

    pub fn spec(&self, n: usize) -> Result<EnsembleSpec> {
        self.class()?;
        match *self {
            Family::AHEdge { .. } => {
                let tau = self.tau(n).unwrap();
                if !(tau >= 0.0) {
                    return Err(Error::domain(format!("τ_N = {tau} < 0 at N = {n}; increase N or decrease c")));
                }
                EnsembleSpec::elliptic(tau, n, SQRT_2 * (1.0 + tau))
            }
            Family::AHBulk { p, .. } => {
                let tau = self.tau(n).unwrap();
                if !(tau >= 0.0) {
                    return Err(Error::domain(format!("τ_N = {tau} < 0 at N = {n}; increase N or decrease c")));
                }
                EnsembleSpec::elliptic(tau, n, p)
            }
            Family::SoftHard => EnsembleSpec::soft_hard(n, SQRT_2),
            Family::Hard { rho } => EnsembleSpec::hard_disk(rho, n, SQRT_2 * rho),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Family::AHEdge { c } => format!("ah-edge(c={c})"),
            Family::AHBulk { c, p } => format!("ah-bulk(c={c},p={p})"),
            Family::SoftHard => "softhard".into(),
            Family::Hard { rho } => format!("hard(rho={rho})"),
        }
    }
}

/// R_{N,1}(z) − R(z) on the same rescaled coordinates.
pub fn deviation(family: &Family, z: Complex64, n: usize) -> Result<f64> {
    let class = family.class()?;
    let kernel = WeightedPreKernel::new(&family.spec(n)?)?;
    Ok(kernel.correlation(&[z])? - one_point(&class, z)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// r in |R_N − R| ≈ e^{intercept}·N^{−r}.
    pub exponent: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// The N values and deviations that entered the fit.
    pub n_values: Vec<usize>,
    pub deviations: Vec<f64>,
    /// Ladder entries dropped because |deviation| was below the noise floor.
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
}

impl RateFit {
    /// CSV with columns `N,deviation,scaled_deviation` (scaled by N^r).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "N,deviation,scaled_deviation")?;
        for (n, d) in self.n_values.iter().zip(&self.deviations) {
            writeln!(out, "{},{},{}", n, float(*d), float(d * (*n as f64).powf(self.exponent)))?;
        }
        Ok(())
    }
}

/// Least-squares slope of ln|deviation| against ln N, negated.
pub fn fit_exponent(n_values: &[usize], deviations: &[f64]) -> Result<RateFit> {
    if n_values.len() != deviations.len() {
        return Err(Error::Shape("ladder and deviations differ in length".into()));
    }
    let mut kept = (Vec::new(), Vec::new());
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for (&n, &d) in n_values.iter().zip(deviations) {
        if d.is_finite() && d.abs() >= NOISE_FLOOR {
            kept.0.push(n);
            kept.1.push(d);
        } else {
            excluded.push(n);
            warnings.push(format!("N = {n}: |deviation| = {:e} below the noise floor, excluded", d.abs()));
        }
    }
    if kept.0.len() < 3 {
        return Err(Error::Fit(format!("only {} usable deviations; at least 3 are needed", kept.0.len())));
    }
    let signs_agree = kept.1.iter().all(|d| d.signum() == kept.1[0].signum());
    if !signs_agree {
        warnings.push("deviation changes sign along the ladder; the fit uses magnitudes".into());
    }
    let x: Vec<f64> = kept.0.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = kept.1.iter().map(|d| d.abs().ln()).collect();
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("the ladder needs at least two distinct N".into()));
    }
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / m).sqrt();
    Ok(RateFit { exponent: -slope, intercept, residual_rms, n_values: kept.0, deviations: kept.1, excluded, warnings })
}

/// Deviations over the ladder (evaluated in parallel) and their rate fit.
pub fn fit_rate(family: &Family, z: Complex64, n_values: &[usize]) -> Result<RateFit> {
    if n_values.len() < 4 {
        return Err(Error::Fit(format!("a rate fit needs at least 4 values of N, got {}", n_values.len())));
    }
    let deviations = n_values.par_iter().map(|&n| deviation(family, z, n)).collect::<Result<Vec<f64>>>()?;
    fit_exponent(n_values, &deviations)
}

/// A horizontal or vertical segment sampled at `count` equispaced points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GridLine {
    Horizontal { y: f64, x0: f64, x1: f64, count: usize },
    Vertical { x: f64, y0: f64, y1: f64, count: usize },
}

impl GridLine {
    pub fn points(&self) -> Vec<Complex64> {
        let lin = |a: f64, b: f64, k: usize, i: usize| if k == 1 { a } else { a + (b - a) * i as f64 / (k - 1) as f64 };
        match *self {
            GridLine::Horizontal { y, x0, x1, count } => (0..count).map(|i| Complex64::new(lin(x0, x1, count, i), y)).collect(),
            GridLine::Vertical { x, y0, y1, count } => (0..count).map(|i| Complex64::new(x, lin(y0, y1, count, i))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub z: Complex64,
    pub finite: f64,
    pub limit: f64,
    /// N^r(R_N − R).
    pub scaled: f64,
}

/// N^r(R_{N,1} − R) along a grid line.
pub fn profile(family: &Family, r: f64, n: usize, line: &GridLine) -> Result<Vec<ProfilePoint>> {
    let class = family.class()?;
    let kernel = WeightedPreKernel::new(&family.spec(n)?)?;
    let scale = (n as f64).powf(r);
    line.points()
        .into_par_iter()
        .map(|z| {
            let finite = kernel.correlation(&[z])?;
            let limit = one_point(&class, z)?;
            Ok(ProfilePoint { z, finite, limit, scaled: scale * (finite - limit) })
        })
        .collect()
}

/// CSV with columns `x,y,finite,limit,scaled`.
pub fn write_profile_csv<W: Write>(mut out: W, points: &[ProfilePoint]) -> io::Result<()> {
    writeln!(out, "x,y,finite,limit,scaled")?;
    for p in points {
        writeln!(out, "{},{},{},{},{}", float(p.z.re), float(p.z.im), float(p.finite), float(p.limit), float(p.scaled))?;
    }
    Ok(())
}
