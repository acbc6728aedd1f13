mod common;

use common::{c, pfaffian_brute};
use nalgebra::DMatrix;
use num_complex::Complex64;
use pfkernel::error::Error;
use pfkernel::pfaffian::{assemble_correlation_matrix, pfaffian, pfaffian_checked, SkewMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut a = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[i][j] = v;
            a[j][i] = -v;
        }
    }
    a
}

fn det(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i][j]).determinant()
}

#[test]
fn two_by_two() {
    let a = c(2.0, -3.0);
    let m = SkewMatrix::new(vec![vec![c(0.0, 0.0), a], vec![-a, c(0.0, 0.0)]]).unwrap();
    assert_eq!(pfaffian(&m), a);
}

#[test]
fn four_by_four_matches_matchings() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rows = random_skew(4, &mut rng);
    let (a, b, cc, d, e, f) = (rows[0][1], rows[0][2], rows[0][3], rows[1][2], rows[1][3], rows[2][3]);
    let want = a * f - b * e + cc * d;
    let got = pfaffian(&SkewMatrix::new(rows.clone()).unwrap());
    assert!((got - want).norm() < 1e-14);
    assert!((pfaffian_brute(&rows) - want).norm() < 1e-14);
}

#[test]
fn square_is_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 4, 6, 8, 10, 12] {
        let rows = random_skew(n, &mut rng);
        let pf = pfaffian(&SkewMatrix::new(rows.clone()).unwrap());
        let d = det(&rows);
        assert!((pf * pf - d).norm() < 1e-10 * d.norm(), "n = {n}");
    }
}

#[test]
fn matches_brute_force_at_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rows = random_skew(6, &mut rng);
    let pf = pfaffian(&SkewMatrix::new(rows.clone()).unwrap());
    assert!((pf - pfaffian_brute(&rows)).norm() < 1e-13);
}

#[test]
fn rejects_odd_and_non_skew() {
    let odd = vec![vec![c(0.0, 0.0); 3]; 3];
    assert!(matches!(SkewMatrix::new(odd), Err(Error::Shape(_))));
    let bad = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    assert!(matches!(SkewMatrix::new(bad), Err(Error::Data(_))));
}

#[test]
fn symmetrization_zeroes_diagonal() {
    let rows = vec![vec![c(1e-15, 0.0), c(1.0, 0.0)], vec![c(-1.0, 1e-15), c(0.0, 0.0)]];
    let m = SkewMatrix::new(rows).unwrap();
    assert_eq!(m.get(0, 0), c(0.0, 0.0));
    assert_eq!(m.get(0, 1), -m.get(1, 0));
}

#[test]
fn checked_rejects_nan() {
    let m = SkewMatrix::from_upper(2, |_, _| c(f64::NAN, 0.0)).unwrap();
    assert!(pfaffian_checked(&m).is_err());
}

#[test]
fn assembly_single_point() {
    let m = assemble_correlation_matrix(|z, w| Ok(z - w), &[c(0.0, 1.0)]).unwrap();
    assert_eq!(m.get(0, 1), c(0.0, 2.0));
    assert_eq!(m.get(1, 0), c(0.0, -2.0));
    assert_eq!(m.get(0, 0), c(0.0, 0.0));
}

#[test]
fn cocycle_scaling_preserves_modulus() {
    // D A D with d_{2j} d_{2j+1} = g(z)g(conj z) = 1
    let pts = [c(0.3, 0.7), c(-0.5, 1.1), c(1.2, 0.4)];
    let kernel = |z: Complex64, w: Complex64| Ok((z - w) * (z * w * 0.3).exp());
    let m = assemble_correlation_matrix(kernel, &pts).unwrap();
    let g = |z: Complex64| Complex64::from_polar(1.0, z.re * 1.7 + z.im * z.re);
    let args: Vec<Complex64> = pts.iter().flat_map(|z| [*z, z.conj()]).collect();
    let d: Vec<Complex64> = args
        .iter()
        .enumerate()
        .map(|(i, z)| if i % 2 == 0 { g(*z) } else { g(z.conj()).inv() })
        .collect();
    let scaled = SkewMatrix::from_upper(args.len(), |i, j| d[i] * m.get(i, j) * d[j]).unwrap();
    let (a, b) = (pfaffian(&m), pfaffian(&scaled));
    assert!((a.norm() - b.norm()).abs() < 1e-12 * a.norm());
}

proptest! {
    #[test]
    fn permutation_sign(seed in 0u64..1000, swaps in proptest::collection::vec((0usize..6, 0usize..6), 1..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_skew(6, &mut rng);
        let mut perm: Vec<usize> = (0..6).collect();
        let mut sign = 1.0;
        for (i, j) in swaps {
            if i != j {
                perm.swap(i, j);
                sign = -sign;
            }
        }
        let permuted: Vec<Vec<Complex64>> = (0..6).map(|i| (0..6).map(|j| rows[perm[i]][perm[j]]).collect()).collect();
        let a = pfaffian(&SkewMatrix::new(rows).unwrap());
        let b = pfaffian(&SkewMatrix::new(permuted).unwrap());
        prop_assert!((b - a * sign).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn homogeneity(seed in 0u64..1000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_skew(6, &mut rng);
        let s = c(re, im);
        let scaled: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
        let a = pfaffian(&SkewMatrix::new(rows).unwrap());
        let b = pfaffian(&SkewMatrix::new(scaled).unwrap());
        prop_assert!((b - a * s.powi(3)).norm() < 1e-12 * (a * s.powi(3)).norm().max(1e-12));
    }

    #[test]
    fn square_is_determinant_random(seed in 0u64..10_000, half in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_skew(2 * half, &mut rng);
        let pf = pfaffian(&SkewMatrix::new(rows.clone()).unwrap());
        let d = det(&rows);
        prop_assert!((pf * pf - d).norm() <= 1e-10 * d.norm().max(1e-300));
    }
}
