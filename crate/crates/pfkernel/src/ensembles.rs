//! Ensemble specifications: potentials, droplets, microscopic scales, the
//! rescaling map and the Gaussian weight in log space.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::ScaledValue;

const EDGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// Q(ζ) = (|ζ|² − τ·Re ζ²)/(1 − τ²).
    Elliptic { tau: f64 },
    /// Q(ζ) = |ζ|² inside |ζ| ≤ √2, +∞ outside.
    SoftHardDisk,
    /// Q(ζ) = |ζ|² inside |ζ| ≤ √2·ρ, +∞ outside.
    HardDisk { rho: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub potential: Potential,
    pub n: usize,
    pub p: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropletRegion {
    Interior,
    Boundary,
    Exterior,
}

impl Potential {
    fn validate(&self) -> Result<()> {
        match *self {
            Potential::Elliptic { tau } if !(0.0..1.0).contains(&tau) => {
                Err(Error::domain(format!("elliptic τ = {tau} must lie in [0, 1)")))
            }
            Potential::HardDisk { rho } if !(rho > 0.0 && rho < 1.0) => {
                Err(Error::domain(format!("hard disk ρ = {rho} must lie in (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    /// Rightmost real point of the droplet.
    pub fn edge_point(&self) -> f64 {
        match *self {
            Potential::Elliptic { tau } => SQRT_2 * (1.0 + tau),
            Potential::SoftHardDisk => SQRT_2,
            Potential::HardDisk { rho } => SQRT_2 * rho,
        }
    }

    /// Radius of the hard wall, if any.
    pub fn wall_radius(&self) -> Option<f64> {
        match *self {
            Potential::Elliptic { .. } => None,
            Potential::SoftHardDisk => Some(SQRT_2),
            Potential::HardDisk { rho } => Some(SQRT_2 * rho),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Potential::Elliptic { .. })
    }

    pub fn in_support(&self, zeta: Complex64) -> bool {
        match self.wall_radius() {
            None => true,
            Some(r) => zeta.norm() <= r * (1.0 + 1e-15),
        }
    }
}

impl EnsembleSpec {
    pub fn new(potential: Potential, n: usize, p: f64, theta: f64) -> Result<Self> {
        potential.validate()?;
        if n == 0 {
            return Err(Error::domain("matrix size N must be positive"));
        }
        if !p.is_finite() || !theta.is_finite() {
            return Err(Error::domain("base point and angle must be finite"));
        }
        Ok(Self { potential, n, p, theta })
    }

    /// Spec with the default angle: θ = π at the left real edge, 0 otherwise.
    pub fn with_default_angle(potential: Potential, n: usize, p: f64) -> Result<Self> {
        let edge = potential.edge_point();
        let theta = if p < 0.0 && (p.abs() - edge).abs() <= EDGE_SLACK * edge.max(1.0) { PI } else { 0.0 };
        Self::new(potential, n, p, theta)
    }

    pub fn elliptic(tau: f64, n: usize, p: f64) -> Result<Self> {
        Self::with_default_angle(Potential::Elliptic { tau }, n, p)
    }

    pub fn soft_hard(n: usize, p: f64) -> Result<Self> {
        Self::with_default_angle(Potential::SoftHardDisk, n, p)
    }

    pub fn hard_disk(rho: f64, n: usize, p: f64) -> Result<Self> {
        Self::with_default_angle(Potential::HardDisk { rho }, n, p)
    }

    pub fn edge_point(&self) -> f64 {
        self.potential.edge_point()
    }

    pub fn tau(&self) -> Option<f64> {
        match self.potential {
            Potential::Elliptic { tau } => Some(tau),
            _ => None,
        }
    }

    pub fn region(&self, zeta: Complex64) -> DropletRegion {
        droplet_region(&self.potential, zeta)
    }

    /// Flat key=value form, e.g. `potential=elliptic tau=0.5 n=64 p=0 theta=0`.
    pub fn to_config_string(&self) -> String {
        let head = match self.potential {
            Potential::Elliptic { tau } => format!("potential=elliptic tau={tau}"),
            Potential::SoftHardDisk => "potential=softhard".to_string(),
            Potential::HardDisk { rho } => format!("potential=hard rho={rho}"),
        };
        format!("{head} n={} p={} theta={}", self.n, self.p, self.theta)
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config_string())
    }
}

/// Parses `key=value` pairs separated by whitespace, commas or newlines;
/// `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{tok}`")))?;
            out.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
    }
    Ok(out)
}

fn parse_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("{key}: not a number: `{v}`"))))
        .transpose()
}

impl EnsembleSpec {
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let kind = map.get("potential").ok_or_else(|| Error::Parse("missing `potential`".into()))?;
        let potential = match kind.to_ascii_lowercase().as_str() {
            "elliptic" => Potential::Elliptic {
                tau: parse_f64(map, "tau")?.ok_or_else(|| Error::Parse("elliptic needs `tau`".into()))?,
            },
            "softhard" | "soft-hard" | "softharddisk" => Potential::SoftHardDisk,
            "hard" | "harddisk" | "hard-disk" => Potential::HardDisk {
                rho: parse_f64(map, "rho")?.ok_or_else(|| Error::Parse("hard disk needs `rho`".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown potential `{other}`"))),
        };
        let n = map
            .get("n")
            .ok_or_else(|| Error::Parse("missing `n`".into()))?
            .parse::<usize>()
            .map_err(|_| Error::Parse("`n` must be a non-negative integer".into()))?;
        let p = match map.get("p").map(|s| s.as_str()) {
            None => 0.0,
            Some("edge") => potential.edge_point(),
            Some("-edge") => -potential.edge_point(),
            Some(_) => parse_f64(map, "p")?.unwrap_or(0.0),
        };
        match parse_f64(map, "theta")? {
            Some(theta) => Self::new(potential, n, p, theta),
            None => Self::with_default_angle(potential, n, p),
        }
    }
}

impl FromStr for EnsembleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_key_values(&parse_key_values(s)?)
    }
}

pub fn droplet_region(potential: &Potential, zeta: Complex64) -> DropletRegion {
    let level = match *potential {
        Potential::Elliptic { tau } => {
            let a = SQRT_2 * (1.0 + tau);
            let b = SQRT_2 * (1.0 - tau);
            (zeta.re / a).powi(2) + (zeta.im / b).powi(2)
        }
        _ => (zeta.norm() / potential.edge_point()).powi(2),
    };
    if (level - 1.0).abs() <= 1e-12 {
        DropletRegion::Boundary
    } else if level < 1.0 {
        DropletRegion::Interior
    } else {
        DropletRegion::Exterior
    }
}

/// Q(ζ); +∞ outside the confinement region of the disk potentials.
pub fn potential_value(spec: &EnsembleSpec, zeta: Complex64) -> f64 {
    potential_value_of(&spec.potential, zeta)
}

pub fn potential_value_of(potential: &Potential, zeta: Complex64) -> f64 {
    match *potential {
        Potential::Elliptic { tau } => {
            (zeta.norm_sqr() - tau * (zeta.re * zeta.re - zeta.im * zeta.im)) / (1.0 - tau * tau)
        }
        _ => {
            if potential.in_support(zeta) {
                zeta.norm_sqr()
            } else {
                f64::INFINITY
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleMap {
    pub gamma_n: f64,
    pub p: f64,
    pub theta: f64,
}

impl RescaleMap {
    pub fn new(gamma_n: f64, p: f64, theta: f64) -> Self {
        Self { gamma_n, p, theta }
    }

    /// ζ = p + e^{iθ}·γ_N·z.
    pub fn to_zeta(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.p, 0.0) + Complex64::from_polar(self.gamma_n, self.theta) * z
    }

    pub fn from_zeta(&self, zeta: Complex64) -> Complex64 {
        (zeta - self.p) * Complex64::from_polar(1.0 / self.gamma_n, -self.theta)
    }

    /// Whether the map commutes with complex conjugation (θ ∈ {0, π}).
    pub fn commutes_with_conjugation(&self) -> bool {
        self.theta.sin().abs() < 1e-15
    }
}

/// Microscopic scale: γ_N = √(2/(N·ΔQ(p))) with Δ = ∂∂̄, except the hard disk,
/// where γ_N = √2ρ/(N(1 − ρ²)).
pub fn microscale(spec: &EnsembleSpec) -> Result<RescaleMap> {
    let p = Complex64::new(spec.p, 0.0);
    if droplet_region(&spec.potential, p) == DropletRegion::Exterior {
        return Err(Error::domain(format!("base point p = {} lies outside the droplet", spec.p)));
    }
    let n = spec.n as f64;
    let gamma_n = match spec.potential {
        Potential::Elliptic { tau } => (2.0 * (1.0 - tau * tau) / n).sqrt(),
        Potential::SoftHardDisk => (2.0 / n).sqrt(),
        Potential::HardDisk { rho } => SQRT_2 * rho / (n * (1.0 - rho * rho)),
    };
    Ok(RescaleMap::new(gamma_n, spec.p, spec.theta))
}

/// e^{−N·Q(ζ)/2} at ζ = p + e^{iθ}γ_N z, in log space; exact zero outside the support.
pub fn weight_factor(spec: &EnsembleSpec, z: Complex64) -> Result<ScaledValue> {
    let map = microscale(spec)?;
    Ok(weight_at_zeta(spec, map.to_zeta(z)))
}

pub fn weight_at_zeta(spec: &EnsembleSpec, zeta: Complex64) -> ScaledValue {
    let q = potential_value(spec, zeta);
    if q.is_infinite() {
        ScaledValue::ZERO
    } else {
        ScaledValue::from_log(-0.5 * spec.n as f64 * q)
    }
}
