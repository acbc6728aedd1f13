mod common;

use std::f64::consts::{PI, SQRT_2};

use common::{c, chi_square_p, n1_im_cdf};
use pfkernel::ensembles::{microscale, EnsembleSpec, RescaleMap};
use pfkernel::finite_kernel::WeightedPreKernel;
use pfkernel::sampler::{
    empirical_onepoint, log_gibbs_density, run_chain, write_samples_csv, ChainState, OnePointAccumulator, Window,
    DRIFT_TOL,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Thinning for the N = 1 chain: the Im ζ autocorrelation is below 1% by lag 20.
const THIN: usize = 25;

#[test]
fn log_density_examples() {
    let spec = EnsembleSpec::elliptic(0.0, 1, 0.0).unwrap();
    assert!((log_gibbs_density(&spec, &[c(0.0, 1.0)]) - (4f64.ln() - 1.0)).abs() < 1e-15);
    let spec = EnsembleSpec::elliptic(0.3, 3, 0.0).unwrap();
    assert_eq!(log_gibbs_density(&spec, &[c(0.1, 0.2), c(0.5, 0.0), c(-0.3, 0.4)]), f64::NEG_INFINITY);
    let disk = EnsembleSpec::hard_disk(0.5, 2, 0.5 * SQRT_2).unwrap();
    assert_eq!(log_gibbs_density(&disk, &[c(0.1, 0.2), c(0.0, 0.8)]), f64::NEG_INFINITY);
    assert!(log_gibbs_density(&disk, &[c(0.1, 0.2), c(0.0, 0.6)]).is_finite());
}

#[test]
fn log_density_two_points_by_hand() {
    let spec = EnsembleSpec::elliptic(0.0, 2, 0.0).unwrap();
    let (a, b) = (c(0.3, 0.5), c(-0.4, 1.1));
    let want = 2.0 * ((a - b).norm() * (a - b.conj()).norm()).ln() + 2.0 * (2.0 * a.im * 2.0 * b.im).ln()
        - 2.0 * (a.norm_sqr() + b.norm_sqr());
    assert!((log_gibbs_density(&spec, &[a, b]) - want).abs() < 1e-13);
}

proptest! {
    #[test]
    fn log_density_is_symmetric(pts in proptest::collection::vec((-1.5f64..1.5, 0.01f64..1.5), 2..6), i in 0usize..6, j in 0usize..6) {
        let spec = EnsembleSpec::elliptic(0.4, pts.len(), 0.0).unwrap();
        let mut z: Vec<_> = pts.iter().map(|&(x, y)| c(x, y)).collect();
        let base = log_gibbs_density(&spec, &z);
        let (i, j) = (i % z.len(), j % z.len());
        z.swap(i, j);
        prop_assert!((log_gibbs_density(&spec, &z) - base).abs() <= 1e-12 * base.abs().max(1.0));
        z[i] = z[i].conj();
        prop_assert!((log_gibbs_density(&spec, &z) - base).abs() <= 1e-12 * base.abs().max(1.0));
    }
}

#[test]
fn chain_is_deterministic() {
    let spec = EnsembleSpec::elliptic(0.2, 4, 0.0).unwrap();
    let a: Vec<_> = run_chain(&spec, 2000, 99, 0.3).unwrap().collect();
    let b: Vec<_> = run_chain(&spec, 2000, 99, 0.3).unwrap().collect();
    let d: Vec<_> = run_chain(&spec, 2000, 100, 0.3).unwrap().collect();
    assert_eq!(a.len(), 1800);
    assert_eq!(a, b);
    assert_ne!(a, d);
}

#[test]
fn hard_disk_samples_stay_inside() {
    let spec = EnsembleSpec::hard_disk(0.5, 6, 0.5 * SQRT_2).unwrap();
    let wall = 0.5 * SQRT_2;
    for s in run_chain(&spec, 20_000, 5, 0.2).unwrap() {
        for z in s.points {
            assert!(z.norm() <= wall * (1.0 + 1e-15) && z.im > 0.0, "{z}");
        }
    }
}

#[test]
fn incremental_density_does_not_drift() {
    let spec = EnsembleSpec::soft_hard(10, SQRT_2).unwrap();
    let mut st = ChainState::new(&spec, 17, 0.2).unwrap();
    for _ in 0..25_000 {
        st.sweep();
    }
    assert!(st.max_drift < DRIFT_TOL, "{}", st.max_drift);
    assert!(st.resync() < DRIFT_TOL);
}

#[test]
fn burn_in_tunes_acceptance() {
    for step in [0.01, 10.0] {
        let spec = EnsembleSpec::elliptic(0.0, 4, 0.0).unwrap();
        let mut s = run_chain(&spec, 20_000, 1, step).unwrap();
        s.by_ref().for_each(drop);
        let rate = s.state().acceptance_rate();
        assert!((0.15..=0.55).contains(&rate), "step {step}: acceptance {rate}");
    }
}

#[test]
fn n1_marginal_chi_square() {
    let spec = EnsembleSpec::elliptic(0.0, 1, 0.0).unwrap();
    let ys: Vec<f64> = run_chain(&spec, 1_000_000, 3, 1.0).unwrap().step_by(THIN).map(|s| s.points[0].im).collect();
    let p = chi_square_p(&ys, n1_im_cdf, 20);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn uniform_points_give_flat_histogram() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples: Vec<Vec<_>> =
        (0..20_000).map(|_| (0..5).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(0.0..1.0))).collect()).collect();
    let map = RescaleMap::new(1.0, 0.0, 0.0);
    let h = empirical_onepoint(&samples, map, Window::new((-1.0, 1.0), (0.0, 1.0), 4, 2).unwrap());
    // five points per configuration, weight ½ each, over an area of 2/π
    let flat = 0.5 * 5.0 / (2.0 / PI);
    for (v, s) in h.intensity.iter().zip(&h.stderr) {
        assert!((v - flat).abs() < 4.0 * s, "{v} vs {flat} ± {s}");
    }
    assert!((h.mass() - 2.5).abs() < 1e-12);
    let fine = empirical_onepoint(&samples, map, Window::new((-1.0, 1.0), (0.0, 1.0), 8, 2).unwrap());
    let coarse_total: f64 = h.counts.iter().sum();
    let fine_total: f64 = fine.counts.iter().sum();
    assert_eq!(coarse_total, fine_total);
    for j in 0..2 {
        for i in 0..4 {
            let merged = fine.counts[j * 8 + 2 * i] + fine.counts[j * 8 + 2 * i + 1];
            assert_eq!(merged, h.counts[j * 4 + i]);
        }
    }
    let mean_fine = fine_total / 16.0;
    let mean_coarse = coarse_total / 8.0;
    assert!((mean_fine / mean_coarse - 0.5).abs() < 1e-12);
}

#[test]
fn empty_window_gives_empty_histogram() {
    let map = RescaleMap::new(1.0, 0.0, 0.0);
    let h = empirical_onepoint(&[vec![c(0.1, 0.2)]], map, Window::new((0.0, 0.0), (0.0, 1.0), 4, 4).unwrap());
    assert!(h.is_empty());
    let h = empirical_onepoint(&[vec![c(0.1, 0.2)]], map, Window::new((0.0, 1.0), (0.0, 1.0), 0, 4).unwrap());
    assert!(h.is_empty());
    assert!(Window::new((0.0, 1.0), (-1.0, 1.0), 4, 4).is_err());
}

#[test]
fn left_edge_rotation_folds_into_upper_half() {
    // θ = π maps ℍ₊ to ℍ₋; the conjugate partner lands in the window instead
    let spec = EnsembleSpec::soft_hard(4, -SQRT_2).unwrap();
    let map = microscale(&spec).unwrap();
    let zeta = map.to_zeta(c(-0.5, 0.5)).conj();
    assert!(zeta.im > 0.0);
    let h = empirical_onepoint(&[vec![zeta]], map, Window::new((-1.0, 0.0), (0.0, 1.0), 1, 1).unwrap());
    assert_eq!(h.counts, vec![0.5]);
}

#[test]
fn samples_csv_layout() {
    let spec = EnsembleSpec::elliptic(0.0, 2, 0.0).unwrap();
    let mut out = Vec::new();
    write_samples_csv(&mut out, run_chain(&spec, 30, 1, 0.5).unwrap()).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sweep,index,re,im");
    assert_eq!(lines.len(), 1 + 27 * 2);
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!((f[0], f[1]), ("4", "0"));
    assert!(f[3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn n8_histogram_matches_finite_kernel() {
    let spec = EnsembleSpec::elliptic(0.0, 8, 0.0).unwrap();
    let map = microscale(&spec).unwrap();
    let window = Window::new((-3.0, 3.0), (0.0, 3.0), 10, 5).unwrap();
    let sweeps = 2_000_000;
    let mut acc = OnePointAccumulator::new(map, window, (sweeps - sweeps / 10) / 40);
    for s in run_chain(&spec, sweeps, 7, map.gamma_n).unwrap() {
        acc.add(&s.points);
    }
    let h = acc.finish();
    assert_eq!(h.batches, 40);
    let k = WeightedPreKernel::new(&spec).unwrap();
    let cmp = h.compare(|z| k.correlation(&[z])).unwrap();
    assert_eq!(cmp.z_scores.len(), 50);
    assert!(cmp.max_z < 4.0, "max |dev|/stderr = {}", cmp.max_z);
}

#[test]
fn folded_intensity_integrates_to_n() {
    let spec = EnsembleSpec::elliptic(0.0, 8, 0.0).unwrap();
    let map = microscale(&spec).unwrap();
    // the droplet |ζ| ≤ √2 is |z| ≤ 2√2 here; the window adds a Gaussian margin
    let window = Window::new((-5.0, 5.0), (0.0, 5.0), 20, 10).unwrap();
    let mut acc = OnePointAccumulator::new(map, window, 5_000);
    for s in run_chain(&spec, 200_000, 8, map.gamma_n).unwrap() {
        acc.add(&s.points);
    }
    let folded = 2.0 * acc.finish().mass();
    assert!((folded - 8.0).abs() < 0.03 * 8.0, "{folded}");
}
