//! Independent test oracles: Gauss–Legendre rules, polar-grid area quadrature
//! and a combinatorial Pfaffian.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { t } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pm) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// ∫ f over [a, b] with an n-point Gauss–Legendre rule.
pub fn gl_integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let (x, w) = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(xi, wi)| f(m + h * xi) * (wi * h)).sum()
}

/// ∫ f dA over the disk |ζ| ≤ rmax with dA = d²ζ/π, on an nr × nt polar grid.
pub fn polar_area(f: impl Fn(Complex64) -> Complex64, rmax: f64, nr: usize, nt: usize) -> Complex64 {
    let (xr, wr) = gauss_legendre(nr);
    let mut total = c(0.0, 0.0);
    for (xi, wi) in xr.iter().zip(&wr) {
        let r = 0.5 * rmax * (xi + 1.0);
        let mut ring = c(0.0, 0.0);
        for j in 0..nt {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / nt as f64;
            ring += f(Complex64::from_polar(r, th));
        }
        total += ring * (2.0 / nt as f64) * r * wi * 0.5 * rmax;
    }
    total
}

/// ⟨f, g⟩_s = ∫ (f(ζ)g(ζ̄) − g(ζ)f(ζ̄))(ζ − ζ̄)e^{−NQ(ζ)} dA.
pub fn skew_form(
    f: &dyn Fn(Complex64) -> Complex64,
    g: &dyn Fn(Complex64) -> Complex64,
    n_q: &dyn Fn(Complex64) -> f64,
    rmax: f64,
    nodes: usize,
) -> Complex64 {
    polar_area(
        |z| {
            let zb = z.conj();
            (f(z) * g(zb) - g(z) * f(zb)) * (z - zb) * (-n_q(z)).exp()
        },
        rmax,
        nodes,
        nodes,
    )
}

/// Pfaffian by expansion along the first row (small matrices only).
pub fn pfaffian_brute(a: &[Vec<Complex64>]) -> Complex64 {
    let idx: Vec<usize> = (0..a.len()).collect();
    pf_rec(a, &idx)
}

fn pf_rec(a: &[Vec<Complex64>], idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return c(1.0, 0.0);
    }
    let i = idx[0];
    let mut total = c(0.0, 0.0);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx.iter().copied().filter(|&k| k != i && k != j).collect();
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += a[i][j] * pf_rec(a, &rest) * sign;
    }
    total
}

pub fn assert_close(got: f64, want: f64, rel: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(1e-300);
    assert!(err <= rel, "{what}: got {got:e}, want {want:e}, rel err {err:e} > {rel:e}");
}

pub fn assert_close_c(got: Complex64, want: Complex64, tol: f64, what: &str) {
    let err = (got - want).norm();
    assert!(err <= tol, "{what}: got {got}, want {want}, |diff| {err:e} > {tol:e}");
}

/// CDF of Im ζ for the N = 1, τ = 0 Gibbs measure, density (4/√π)y²e^{−y²} on y > 0.
pub fn n1_im_cdf(y: f64) -> f64 {
    statrs::function::erf::erf(y) - 2.0 / std::f64::consts::PI.sqrt() * y * (-y * y).exp()
}

/// Chi-square p-value of `ys` against `cdf` on `bins` equiprobable bins.
pub fn chi_square_p(ys: &[f64], cdf: impl Fn(f64) -> f64, bins: usize) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let edges: Vec<f64> = (1..bins)
        .map(|k| {
            let target = k as f64 / bins as f64;
            let (mut lo, mut hi) = (0.0, 50.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    let mut counts = vec![0usize; bins];
    for &y in ys {
        counts[edges.partition_point(|&e| e <= y)] += 1;
    }
    let expected = ys.len() as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    ChiSquared::new((bins - 1) as f64).unwrap().sf(stat)
}
