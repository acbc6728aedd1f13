//! Subcommand implementations.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use pfkernel::converge::{fit_rate, profile, write_profile_csv, Family};
use pfkernel::ensembles::{microscale, EnsembleSpec, RescaleMap};
use pfkernel::finite_kernel::{KernelMode, WeightedPreKernel};
use pfkernel::identities::{
    check_cd_orthogonal, check_cd_skew, check_cdi_limit, check_limit_ode, check_rn12_derivatives, check_transformed,
    exact_identity_sweep, IdentityReport, MAX_IDENTITY_N, MAX_ORTHOGONAL_N,
};
use pfkernel::limit_kernel::{self, UniversalityClass};
use pfkernel::numfmt::float;
use pfkernel::sampler::{run_chain, OnePointAccumulator, Window, DRIFT_TOL};
use pfkernel::specfun;

use crate::cli::{
    CheckArgs, ClassArgs, ClassKind, ConvergeArgs, DensityArgs, EvalArgs, FamilyKind, KernelKind, SampleArgs, SpecArgs,
    SpecialArgs, SpecialFn,
};
use crate::failure::{numeric, usage, CmdResult, Failure};
use crate::output::{open, write_header, Format, Resolved};

const EXACT_THRESHOLD: f64 = 1e-8;
const LIMIT_THRESHOLD: f64 = 1e-5;
/// Sampler comparison fails when some bin deviates by this many standard errors.
const MAX_Z: f64 = 4.0;

fn complex_str(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { "" } else { "+" };
    format!("{}{sign}{}i", float(z.re), float(z.im))
}

fn complex_list(zs: &[Complex64]) -> String {
    zs.iter().map(|&z| complex_str(z)).collect::<Vec<_>>().join(",")
}

fn put(cfg: &mut Resolved, key: &str, value: impl ToString) {
    cfg.insert(key.to_string(), value.to_string());
}

fn resolve_class(a: &ClassArgs, cfg: &mut Resolved) -> Result<UniversalityClass, Failure> {
    let kind = a.class.ok_or_else(|| usage("--class is required"))?;
    let class = match kind {
        ClassKind::NhBulk => UniversalityClass::NHBulk,
        ClassKind::NhEdge => UniversalityClass::NHEdge,
        ClassKind::AhBulk => {
            let ct = a.ctilde.ok_or_else(|| usage("class ah-bulk requires --ctilde"))?;
            put(cfg, "ctilde", float(ct));
            UniversalityClass::ah_bulk(ct, 0.0).map_err(usage)?
        }
        ClassKind::AhEdge => {
            let c = a.c.ok_or_else(|| usage("class ah-edge requires --c"))?;
            put(cfg, "c", float(c));
            UniversalityClass::ah_edge(c).map_err(usage)?
        }
        ClassKind::Softhard => UniversalityClass::SoftHard,
        ClassKind::Hard => UniversalityClass::Hard,
    };
    let name = match kind {
        ClassKind::NhBulk => "nh-bulk",
        ClassKind::NhEdge => "nh-edge",
        ClassKind::AhBulk => "ah-bulk",
        ClassKind::AhEdge => "ah-edge",
        ClassKind::Softhard => "softhard",
        ClassKind::Hard => "hard",
    };
    put(cfg, "class", name);
    Ok(class)
}

fn resolve_spec(a: &SpecArgs, cfg: &mut Resolved) -> Result<EnsembleSpec, Failure> {
    let kind = a.potential.ok_or_else(|| usage("--potential is required"))?;
    let n = a.n.ok_or_else(|| usage("--n is required"))?;
    let mut map = BTreeMap::new();
    map.insert("potential".to_string(), kind.name().to_string());
    map.insert("n".to_string(), n.to_string());
    if let Some(t) = a.tau {
        map.insert("tau".into(), t.to_string());
    }
    if let Some(r) = a.rho {
        map.insert("rho".into(), r.to_string());
    }
    if let Some(p) = &a.p {
        map.insert("p".into(), p.clone());
    }
    if let Some(t) = a.theta {
        map.insert("theta".into(), t.to_string());
    }
    let spec = EnsembleSpec::from_key_values(&map).map_err(usage)?;
    put(cfg, "potential", kind.name());
    put(cfg, "n", n);
    if let Some(t) = spec.tau() {
        put(cfg, "tau", float(t));
    }
    if let pfkernel::ensembles::Potential::HardDisk { rho } = spec.potential {
        put(cfg, "rho", float(rho));
    }
    put(cfg, "p", float(spec.p));
    put(cfg, "theta", float(spec.theta));
    Ok(spec)
}

fn check_exclusive(finite: bool, class: &ClassArgs) -> CmdResult {
    match (finite, class.class.is_some()) {
        (true, true) => Err(usage("--finite and --class are mutually exclusive")),
        (false, false) => Err(usage("either --class or --finite (with --potential) is required")),
        _ => Ok(()),
    }
}

pub fn density(a: &DensityArgs) -> CmdResult {
    check_exclusive(a.finite, &a.class)?;
    let mut cfg = Resolved::new();
    put(&mut cfg, "grid", a.grid);
    put(&mut cfg, "format", a.output.format.name());
    let points = a.grid.points();
    let values: Vec<f64> = if a.finite {
        let spec = resolve_spec(&a.spec, &mut cfg)?;
        put(&mut cfg, "finite", true);
        let kernel = WeightedPreKernel::new(&spec).map_err(usage)?;
        points.par_iter().map(|z| kernel.correlation(&[*z])).collect::<Result<_, _>>().map_err(numeric)?
    } else {
        let class = resolve_class(&a.class, &mut cfg)?;
        points.par_iter().map(|z| limit_kernel::one_point(&class, *z)).collect::<Result<_, _>>().map_err(numeric)?
    };
    let mut out = open(a.output.out.as_deref())?;
    write_header(&mut *out, a.output.format, "density", &cfg)?;
    match a.output.format {
        Format::Csv => {
            writeln!(out, "x,y,R")?;
            for (z, r) in points.iter().zip(&values) {
                writeln!(out, "{},{},{}", float(z.re), float(z.im), float(*r))?;
            }
        }
        Format::Json => {
            for (z, r) in points.iter().zip(&values) {
                writeln!(out, "{}", json!({"x": z.re, "y": z.im, "R": r}))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn eval(a: &EvalArgs) -> CmdResult {
    check_exclusive(a.finite, &a.class)?;
    let mut cfg = Resolved::new();
    put(&mut cfg, "z", complex_list(&a.z.0));
    let pairs: Vec<(Complex64, Complex64)> = match &a.w {
        Some(w) => {
            put(&mut cfg, "w", complex_list(&w.0));
            a.z.0.iter().flat_map(|&z| w.0.iter().map(move |&w| (z, w))).collect()
        }
        None => a.z.0.iter().map(|&z| (z, z.conj())).collect(),
    };
    let kernel_name = match a.kernel {
        KernelKind::Raw => "raw",
        KernelKind::Weighted => "weighted",
        KernelKind::Complex => "complex",
    };
    put(&mut cfg, "kernel", kernel_name);
    put(&mut cfg, "format", a.output.format.name());
    let values: Vec<Complex64> = if a.finite {
        let spec = resolve_spec(&a.spec, &mut cfg)?;
        put(&mut cfg, "finite", true);
        let mode = match a.kernel {
            KernelKind::Raw => KernelMode::Raw,
            KernelKind::Weighted => KernelMode::Weighted,
            KernelKind::Complex => return Err(usage("--kernel complex is available for the limiting classes only")),
        };
        let kernel = WeightedPreKernel::new(&spec).map_err(usage)?;
        pairs.par_iter().map(|&(z, w)| kernel.value(z, w, mode)).collect::<Result<_, _>>().map_err(numeric)?
    } else {
        let class = resolve_class(&a.class, &mut cfg)?;
        let f = match a.kernel {
            KernelKind::Raw => limit_kernel::prekernel,
            KernelKind::Weighted => limit_kernel::weighted_prekernel,
            KernelKind::Complex => limit_kernel::complex_counterpart,
        };
        pairs.par_iter().map(|&(z, w)| f(&class, z, w)).collect::<Result<_, _>>().map_err(numeric)?
    };
    let mut out = open(a.output.out.as_deref())?;
    write_header(&mut *out, a.output.format, "eval", &cfg)?;
    match a.output.format {
        Format::Csv => {
            writeln!(out, "z_re,z_im,w_re,w_im,re,im")?;
            for ((z, w), v) in pairs.iter().zip(&values) {
                writeln!(out, "{},{},{},{},{},{}", float(z.re), float(z.im), float(w.re), float(w.im), float(v.re), float(v.im))?;
            }
        }
        Format::Json => {
            for ((z, w), v) in pairs.iter().zip(&values) {
                writeln!(out, "{}", json!({"z": [z.re, z.im], "w": [w.re, w.im], "value": [v.re, v.im]}))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn resolve_family(a: &ConvergeArgs, cfg: &mut Resolved) -> Result<Family, Failure> {
    let need = |v: Option<f64>, flag: &str, fam: &str| v.ok_or_else(|| usage(format!("family {fam} requires --{flag}")));
    let family = match a.family {
        FamilyKind::AhEdge => {
            let c = need(a.c, "c", "ah-edge")?;
            put(cfg, "c", float(c));
            Family::AHEdge { c }
        }
        FamilyKind::AhBulk => {
            let c = need(a.c, "c", "ah-bulk")?;
            let p = a.p.unwrap_or(0.0);
            put(cfg, "c", float(c));
            put(cfg, "p", float(p));
            Family::AHBulk { c, p }
        }
        FamilyKind::Softhard => Family::SoftHard,
        FamilyKind::Hard => {
            let rho = need(a.rho, "rho", "hard")?;
            put(cfg, "rho", float(rho));
            Family::Hard { rho }
        }
    };
    let kind = match a.family {
        FamilyKind::AhEdge => "ah-edge",
        FamilyKind::AhBulk => "ah-bulk",
        FamilyKind::Softhard => "softhard",
        FamilyKind::Hard => "hard",
    };
    put(cfg, "family", kind);
    family.class().map_err(usage)?;
    Ok(family)
}

pub fn converge(a: &ConvergeArgs) -> CmdResult {
    let mut cfg = Resolved::new();
    let family = resolve_family(a, &mut cfg)?;
    let ns = &a.n.0;
    if ns.len() < 4 {
        return Err(usage(format!("the N ladder needs at least 4 values, got {}", ns.len())));
    }
    for &n in ns {
        family.spec(n).map_err(usage)?;
    }
    put(&mut cfg, "z", complex_str(a.z));
    put(&mut cfg, "n", ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    put(&mut cfg, "format", a.format.name());
    if a.profile.is_some() && a.profile_out.is_none() {
        return Err(usage("--profile needs --profile-out"));
    }
    let fit = fit_rate(&family, a.z, ns).map_err(numeric)?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = open(a.out.as_deref())?;
    write_header(&mut *out, a.format, "converge", &cfg)?;
    match a.format {
        Format::Csv => fit.write_csv(&mut out)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&fit).map_err(numeric)?)?,
    }
    out.flush()?;
    if let Some(line) = a.profile {
        let n = a.profile_n.unwrap_or(*ns.iter().max().unwrap());
        let r = a.r.unwrap_or(fit.exponent);
        let pts = profile(&family, r, n, &line).map_err(numeric)?;
        let mut pcfg = cfg.clone();
        pcfg.remove("format");
        put(&mut pcfg, "profile-n", n);
        put(&mut pcfg, "r", float(r));
        let mut pout = open(a.profile_out.as_deref())?;
        write_header(&mut *pout, Format::Csv, "converge-profile", &pcfg)?;
        write_profile_csv(&mut pout, &pts)?;
        pout.flush()?;
    }
    Ok(())
}

const IDENTITIES: [&str; 7] = ["cd-skew", "cd-orthogonal", "rn12", "transformed", "limit-ode", "cdi-limit", "sweep"];

fn unit_box(rng: &mut ChaCha8Rng, half_width: f64, half_height: f64) -> Complex64 {
    Complex64::new(rng.random_range(-half_width..half_width), rng.random_range(-half_height..half_height))
}

#[derive(Clone, Copy)]
struct ExactDraw {
    n: usize,
    tau: f64,
    p: f64,
    z: Complex64,
    w: Complex64,
}

fn exact_reports(name: &str, a: &CheckArgs, cfg: &mut Resolved) -> Result<Vec<IdentityReport>, Failure> {
    let max_n = if name == "cd-orthogonal" { MAX_ORTHOGONAL_N } else { MAX_IDENTITY_N };
    if let Some(&bad) = a.n.0.iter().find(|&&n| n == 0 || n > max_n) {
        return Err(usage(format!("N = {bad} outside 1..={max_n}")));
    }
    if let Some(t) = a.tau {
        if !(0.0..1.0).contains(&t) {
            return Err(usage(format!("τ = {t} must lie in [0, 1)")));
        }
        put(cfg, "tau", float(t));
    }
    if let Some(p) = a.p {
        put(cfg, "p", float(p));
    }
    let list = &a.n.0;
    put(cfg, "n", list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut draws = Vec::with_capacity(list.len() * a.samples);
    for &n in list {
        for _ in 0..a.samples {
            let tau = a.tau.unwrap_or_else(|| rng.random_range(0.0..=0.9));
            let p = a.p.unwrap_or_else(|| rng.random_range(0.0..=SQRT_2 * (1.0 + tau)));
            let scale = if name == "cd-orthogonal" { 2.0 } else { 1.0 };
            let z = unit_box(&mut rng, scale, scale);
            let w = unit_box(&mut rng, scale, scale);
            draws.push(ExactDraw { n, tau, p, z, w });
        }
    }
    let per_draw = |d: &ExactDraw| -> pfkernel::Result<Vec<IdentityReport>> {
        Ok(match name {
            "cd-skew" => vec![check_cd_skew(d.n, d.tau, d.p, d.z, d.w)?],
            "cd-orthogonal" => vec![check_cd_orthogonal(d.n, d.tau, d.z, d.w)?],
            "rn12" => {
                let (x, y) = check_rn12_derivatives(d.n, d.tau, d.p, d.z, d.w)?;
                vec![x, y]
            }
            _ => vec![check_transformed(d.n, d.tau, d.p, d.z, d.w)?],
        })
    };
    let nested = draws.par_iter().map(per_draw).collect::<pfkernel::Result<Vec<_>>>().map_err(numeric)?;
    Ok(nested.into_iter().flatten().collect())
}

fn limit_reports(name: &str, a: &CheckArgs, cfg: &mut Resolved) -> Result<Vec<IdentityReport>, Failure> {
    let class = resolve_class(&a.class, cfg)?;
    let supported = match name {
        "limit-ode" => matches!(class, UniversalityClass::AHBulk { .. } | UniversalityClass::AHEdge { .. }),
        _ => matches!(class, UniversalityClass::AHEdge { .. }),
    };
    if !supported {
        return Err(usage(format!("{name} is not defined for class {}", class.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let pairs: Vec<(Complex64, Complex64)> =
        (0..a.samples).map(|_| (unit_box(&mut rng, 1.0, 0.5), unit_box(&mut rng, 1.0, 0.5))).collect();
    let check = if name == "limit-ode" { check_limit_ode } else { check_cdi_limit };
    pairs.par_iter().map(|&(z, w)| check(&class, z, w)).collect::<pfkernel::Result<Vec<_>>>().map_err(numeric)
}

pub fn check(a: &CheckArgs) -> CmdResult {
    let name = a.identity.as_str();
    if !IDENTITIES.contains(&name) {
        return Err(usage(format!("unknown identity `{name}`; expected one of {}", IDENTITIES.join(", "))));
    }
    let is_limit = matches!(name, "limit-ode" | "cdi-limit");
    let threshold = a.threshold.unwrap_or(if is_limit { LIMIT_THRESHOLD } else { EXACT_THRESHOLD });
    let mut cfg = Resolved::new();
    put(&mut cfg, "identity", name);
    put(&mut cfg, "samples", a.samples);
    put(&mut cfg, "seed", a.seed);
    put(&mut cfg, "threshold", float(threshold));
    put(&mut cfg, "format", a.format.name());
    let reports = match name {
        "sweep" => {
            let n_max = *a.n.0.iter().max().unwrap();
            if n_max == 0 || n_max > MAX_IDENTITY_N {
                return Err(usage(format!("N = {n_max} outside 1..={MAX_IDENTITY_N}")));
            }
            put(&mut cfg, "n-max", n_max);
            exact_identity_sweep(a.samples, n_max, a.seed).map_err(numeric)?
        }
        _ if is_limit => limit_reports(name, a, &mut cfg)?,
        _ => exact_reports(name, a, &mut cfg)?,
    };
    let mut out = open(a.out.as_deref())?;
    write_header(&mut *out, a.format, "check", &cfg)?;
    match a.format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        Format::Csv => {
            writeln!(out, "name,params,residual,lhs_re,lhs_im,rhs_re,rhs_im")?;
            for r in &reports {
                let params = match &r.params {
                    serde_json::Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
                    other => other.to_string(),
                };
                let params = params.replace('"', "");
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.name,
                    params,
                    float(r.residual),
                    float(r.lhs.re),
                    float(r.lhs.im),
                    float(r.rhs.re),
                    float(r.rhs.im)
                )?;
            }
        }
    }
    out.flush()?;
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failed = reports.iter().filter(|r| !(r.residual < threshold)).count();
    eprintln!("{name}: {} reports, max residual {worst:e}, {failed} above {threshold:e}", reports.len());
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} residuals at or above {threshold:e}", reports.len())));
    }
    Ok(())
}

struct ChainResult {
    acc: OnePointAccumulator,
    acceptance: f64,
    step: f64,
    drift: f64,
}

/// Everything a chain needs besides its index.
struct ChainJob<'a> {
    spec: EnsembleSpec,
    map: RescaleMap,
    window: Window,
    step: f64,
    batch_len: u64,
    args: &'a SampleArgs,
}

fn run_one(job: &ChainJob, chain: u64, mut dump: Option<&mut dyn Write>) -> Result<ChainResult, Failure> {
    let a = job.args;
    let mut stream = run_chain(&job.spec, a.sweeps, a.seed.wrapping_add(chain), job.step).map_err(numeric)?;
    let mut acc = OnePointAccumulator::new(job.map, job.window, job.batch_len);
    for s in &mut stream {
        acc.add(&s.points);
        if let Some(out) = dump.as_deref_mut() {
            if s.sweep % a.thin == 0 {
                for (i, z) in s.points.iter().enumerate() {
                    writeln!(out, "{},{},{},{}", s.sweep, i, float(z.re), float(z.im))?;
                }
            }
        }
    }
    let st = stream.state();
    Ok(ChainResult { acc, acceptance: st.acceptance_rate(), step: st.step_scale, drift: st.max_drift })
}

pub fn sample(a: &SampleArgs) -> CmdResult {
    let mut cfg = Resolved::new();
    let spec = resolve_spec(&a.spec, &mut cfg)?;
    if a.sweeps == 0 || a.chains == 0 || a.batches == 0 || a.thin == 0 {
        return Err(usage("--sweeps, --chains, --batches and --thin must be positive"));
    }
    if a.samples_out.is_some() && a.chains > 1 {
        return Err(usage("--samples-out needs a single chain"));
    }
    let map = microscale(&spec).map_err(usage)?;
    let step = a.step.unwrap_or(map.gamma_n);
    let g = a.window;
    let window = Window::new((g.x.lo, g.x.hi), (g.y.lo, g.y.hi), g.x.count, g.y.count).map_err(usage)?;
    let batch_len = ((a.sweeps - a.sweeps / 10) / a.batches).max(1);
    for (k, v) in [
        ("sweeps", a.sweeps.to_string()),
        ("seed", a.seed.to_string()),
        ("step", float(step)),
        ("window", g.to_string()),
        ("batches", a.batches.to_string()),
        ("chains", a.chains.to_string()),
        ("compare", a.compare.to_string()),
        ("format", a.output.format.name().to_string()),
    ] {
        put(&mut cfg, k, v);
    }
    let job = ChainJob { spec, map, window, step, batch_len, args: a };
    let results: Vec<ChainResult> = match &a.samples_out {
        Some(path) => {
            let mut scfg = cfg.clone();
            scfg.remove("format");
            put(&mut scfg, "thin", a.thin);
            put(&mut scfg, "coordinates", "zeta");
            let mut dump = open(Some(path))?;
            write_header(&mut *dump, Format::Csv, "sample", &scfg)?;
            writeln!(dump, "sweep,index,re,im")?;
            let r = run_one(&job, 0, Some(&mut *dump))?;
            dump.flush()?;
            vec![r]
        }
        None => (0..a.chains)
            .into_par_iter()
            .map(|c| run_one(&job, c, None))
            .collect::<Result<_, _>>()?,
    };
    let mut acc = results[0].acc.clone();
    for r in &results[1..] {
        acc.merge(&r.acc).map_err(numeric)?;
    }
    for (c, r) in results.iter().enumerate() {
        eprintln!("chain {c}: acceptance {:.3}, step {:.4}, max drift {:e}", r.acceptance, r.step, r.drift);
    }
    if let Some(r) = results.iter().find(|r| r.drift > DRIFT_TOL) {
        return Err(numeric(format!("log-density drift {:e} exceeds {DRIFT_TOL:e}", r.drift)));
    }
    let h = acc.finish();
    let expected = if a.compare {
        let kernel = WeightedPreKernel::new(&spec).map_err(usage)?;
        Some(h.compare(|z| kernel.correlation(&[z])).map_err(numeric)?)
    } else {
        None
    };
    let signed_z = |b: usize, e: f64| {
        let d = h.intensity[b] - e;
        if h.stderr[b] > 0.0 {
            d / h.stderr[b]
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    };
    let mut out = open(a.output.out.as_deref())?;
    write_header(&mut *out, a.output.format, "sample", &cfg)?;
    match a.output.format {
        Format::Csv => {
            match &expected {
                Some(_) => writeln!(out, "x,y,intensity,stderr,expected,z")?,
                None => writeln!(out, "x,y,intensity,stderr")?,
            }
            for b in 0..h.intensity.len() {
                let c = window.bin_center(b);
                write!(out, "{},{},{},{}", float(c.re), float(c.im), float(h.intensity[b]), float(h.stderr[b]))?;
                if let Some(cmp) = &expected {
                    let e = cmp.expected[b];
                    write!(out, ",{},{}", float(e), float(signed_z(b, e)))?;
                }
                writeln!(out)?;
            }
        }
        Format::Json => {
            for b in 0..h.intensity.len() {
                let c = window.bin_center(b);
                let mut row = json!({"x": c.re, "y": c.im, "intensity": h.intensity[b], "stderr": h.stderr[b]});
                if let Some(cmp) = &expected {
                    let e = cmp.expected[b];
                    row["expected"] = json!(e);
                    row["z"] = json!(signed_z(b, e));
                }
                writeln!(out, "{row}")?;
            }
        }
    }
    out.flush()?;
    eprintln!("{} configurations, {} batches, mass in window {:.6}", h.configs, h.batches, h.mass());
    if let Some(cmp) = expected {
        let bins = cmp.z_scores.len();
        let beyond2 = cmp.z_scores.iter().filter(|z| **z > 2.0).count();
        eprintln!(
            "compared {bins} bins: max |z| = {:.3}, {beyond2} beyond 2 standard errors (about {:.1} expected)",
            cmp.max_z,
            0.0455 * bins as f64
        );
        if !(cmp.max_z < MAX_Z) {
            return Err(Failure::Check(format!("max |z| = {:.3} is not below {MAX_Z}", cmp.max_z)));
        }
    }
    Ok(())
}

pub fn special(a: &SpecialArgs) -> CmdResult {
    let mut cfg = Resolved::new();
    let fname = match a.function {
        SpecialFn::Erf => "erf",
        SpecialFn::Erfc => "erfc",
        SpecialFn::Erfcx => "erfcx",
        SpecialFn::Airy => "airy",
        SpecialFn::AiryScaled => "airy-scaled",
        SpecialFn::LowerGamma => "lower-gamma",
        SpecialFn::Hermite => "hermite",
    };
    put(&mut cfg, "function", fname);
    put(&mut cfg, "format", a.output.format.name());
    let zs = &a.z.0;
    put(&mut cfg, "z", complex_list(zs));
    // rows of (point index, k, value as ln|v| and phase)
    let mut rows: Vec<(usize, usize, Complex64, f64)> = Vec::new();
    let plain = |v: Complex64| (v, v.norm().ln());
    for (i, &z) in zs.iter().enumerate() {
        let vals: Vec<(Complex64, f64)> = match a.function {
            SpecialFn::Erf => vec![plain(specfun::erf(z))],
            SpecialFn::Erfc => vec![plain(specfun::erfc(z))],
            SpecialFn::Erfcx => vec![plain(specfun::erfcx(z))],
            SpecialFn::Airy => {
                let (ai, aip) = specfun::airy_pair(z);
                vec![plain(ai), plain(aip)]
            }
            SpecialFn::AiryScaled => vec![plain(specfun::airy_scaled(z))],
            SpecialFn::LowerGamma => {
                let s = a.a.ok_or_else(|| usage("lower-gamma requires --a"))?;
                put(&mut cfg, "a", float(s));
                vec![plain(specfun::lower_gamma(s, z).map_err(numeric)?)]
            }
            SpecialFn::Hermite => {
                put(&mut cfg, "n", a.n);
                specfun::hermite_scaled_c(a.n, z)
                    .map_err(usage)?
                    .into_iter()
                    .map(|h| (h.reconstruct(), h.log_magnitude))
                    .collect()
            }
        };
        rows.extend(vals.into_iter().enumerate().map(|(k, (v, l))| (i, k, v, l)));
    }
    let mut out = open(a.output.out.as_deref())?;
    write_header(&mut *out, a.output.format, "special", &cfg)?;
    match a.output.format {
        Format::Csv => {
            writeln!(out, "x,y,k,re,im,ln_abs")?;
            for (i, k, v, l) in rows {
                let z = zs[i];
                writeln!(out, "{},{},{k},{},{},{}", float(z.re), float(z.im), float(v.re), float(v.im), float(l))?;
            }
        }
        Format::Json => {
            for (i, k, v, l) in rows {
                let z = zs[i];
                let ln_abs = if l.is_finite() { json!(l) } else { json!(null) };
                writeln!(out, "{}", json!({"z": [z.re, z.im], "k": k, "value": [v.re, v.im], "ln_abs": ln_abs}))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
