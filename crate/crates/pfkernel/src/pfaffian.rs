//! Pfaffians of complex skew-symmetric matrices and assembly of the conjugate
//! block matrices that define Pfaffian correlation functions.

use num_complex::Complex64;

use crate::error::{Error, Result};

const SKEW_TOL: f64 = 1e-12;

/// Even-dimensional complex skew-symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    dimension: usize,
    entries: Vec<Complex64>,
}

impl SkewMatrix {
    /// Validates skew-symmetry (relative to the largest entry) and symmetrizes.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix must be square".into()));
        }
        if n % 2 != 0 {
            return Err(Error::Shape(format!("Pfaffian needs even dimension, got {n}")));
        }
        let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
        Self::from_entries(n, entries)
    }

    pub fn from_entries(dimension: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dimension * dimension {
            return Err(Error::Shape("entry count does not match dimension".into()));
        }
        if dimension % 2 != 0 {
            return Err(Error::Shape(format!("Pfaffian needs even dimension, got {dimension}")));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut m = SkewMatrix { dimension, entries };
        for i in 0..dimension {
            for j in i..dimension {
                let a = m.get(i, j);
                let b = m.get(j, i);
                if (a + b).norm() > SKEW_TOL * scale {
                    return Err(Error::Data(format!("skew-symmetry violated at ({i},{j}): {a} vs {b}")));
                }
                let s = (a - b) * 0.5;
                m.set(i, j, s);
                m.set(j, i, -s);
            }
        }
        Ok(m)
    }

    /// Builds from a strictly-upper-triangle closure; the lower triangle is implied.
    pub fn from_upper(dimension: usize, mut upper: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dimension % 2 != 0 {
            return Err(Error::Shape(format!("Pfaffian needs even dimension, got {dimension}")));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dimension * dimension];
        for i in 0..dimension {
            for j in i + 1..dimension {
                let v = upper(i, j);
                entries[i * dimension + j] = v;
                entries[j * dimension + i] = -v;
            }
        }
        Ok(SkewMatrix { dimension, entries })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dimension + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dimension + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dimension).map(|r| r.to_vec()).collect()
    }
}

/// Pf(A) by Parlett–Reid skew tridiagonalization with partial pivoting.
pub fn pfaffian(a: &SkewMatrix) -> Complex64 {
    let n = a.dimension;
    let mut m = a.entries.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = m[idx(k + 1, k)].norm();
        for r in k + 2..n {
            let v = m[idx(r, k)].norm();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            for c in k..n {
                m.swap(idx(k + 1, c), idx(kp, c));
            }
            for r in k..n {
                m.swap(idx(r, k + 1), idx(r, kp));
            }
            pf = -pf;
        }
        let pivot = m[idx(k, k + 1)];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|c| m[idx(k, c)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|r| m[idx(r, k + 1)]).collect();
            for (ii, r) in (k + 2..n).enumerate() {
                for (jj, c) in (k + 2..n).enumerate() {
                    m[idx(r, c)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Checked variant rejecting non-finite entries.
pub fn pfaffian_checked(a: &SkewMatrix) -> Result<Complex64> {
    if a.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Data("non-finite matrix entry".into()));
    }
    Ok(pfaffian(a))
}

/// 2k×2k matrix of κ on all conjugate combinations:
/// rows/cols (2j, 2j+1) ↔ (z_j, conj z_j).
pub fn assemble_correlation_matrix<K>(mut kernel: K, points: &[Complex64]) -> Result<SkewMatrix>
where
    K: FnMut(Complex64, Complex64) -> Result<Complex64>,
{
    if points.is_empty() {
        return Err(Error::Shape("at least one point required".into()));
    }
    let args: Vec<Complex64> = points.iter().flat_map(|z| [*z, z.conj()]).collect();
    let n = args.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = kernel(args[i], args[j])?;
            entries[i * n + j] = v;
            entries[j * n + i] = -v;
        }
    }
    Ok(SkewMatrix { dimension: n, entries })
}
