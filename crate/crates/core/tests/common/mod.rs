//! Test-only helpers, including a brute-force coherence-weight oracle for
//! `d <= 3` that shares no code with the library solver.
#![allow(dead_code)]

use cweight::hermitian::ComplexMatrix;
use cweight::states::{sample_one, DensityMatrix, EnsembleKind};
use cweight::C64;

pub fn ginibre(dim: usize, seed: u64, index: u64) -> DensityMatrix {
    sample_one(EnsembleKind::GinibreMixed, dim, seed, index).unwrap()
}

pub fn real_state(rows: &[&[f64]]) -> DensityMatrix {
    DensityMatrix::new(ComplexMatrix::from_real_rows(rows)).unwrap()
}

/// Dense row-major copy, so the oracle never touches library linear algebra.
fn entries(rho: &DensityMatrix) -> Vec<Vec<C64>> {
    let d = rho.dim();
    (0..d).map(|i| (0..d).map(|j| rho.get(i, j)).collect()).collect()
}

/// All principal minors of a Hermitian matrix of size at most 3 are `>= -tol`.
fn psd_by_minors(m: &[Vec<C64>], tol: f64) -> bool {
    let d = m.len();
    if m.iter().enumerate().any(|(i, row)| row[i].re < -tol) {
        return false;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let minor = m[i][i].re * m[j][j].re - m[i][j].norm_sqr();
            if minor < -tol {
                return false;
            }
        }
    }
    if d == 3 {
        let a = |i: usize, j: usize| m[i][j];
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        if det.re < -tol {
            return false;
        }
    }
    true
}

/// Largest `s` with `rho - s diag(p) >= 0`, by bisection.
fn max_step(rho: &[Vec<C64>], p: &[f64]) -> f64 {
    let feasible = |s: f64| {
        let mut m = rho.to_vec();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= C64::new(s * p[i], 0.0);
        }
        psd_by_minors(&m, 1e-15)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if feasible(hi) {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Points of the probability simplex around `center` on a grid of spacing `h`
/// spanning `radius` steps in every direction.
fn simplex_patch(center: &[f64], h: f64, radius: i64) -> Vec<Vec<f64>> {
    let d = center.len();
    let mut out = Vec::new();
    let offsets: Vec<i64> = (-radius..=radius).collect();
    let mut idx = vec![0usize; d - 1];
    loop {
        let mut p: Vec<f64> = (0..d - 1).map(|k| center[k] + h * offsets[idx[k]] as f64).collect();
        let last = 1.0 - p.iter().sum::<f64>();
        p.push(last);
        if p.iter().all(|&x| x >= -1e-15) {
            out.push(p.into_iter().map(|x| x.max(0.0)).collect());
        }
        let mut k = 0;
        loop {
            if k == d - 1 {
                return out;
            }
            idx[k] += 1;
            if idx[k] < offsets.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `1 - max sum(lambda)` over a coarse simplex grid of directions followed by
/// successive local refinements; each direction is scaled by bisection.
pub fn brute_force_weight(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    assert!((2..=3).contains(&d), "oracle handles d <= 3 only");
    let m = entries(rho);
    let coarse = 60;
    let h0 = 1.0 / coarse as f64;
    let start = vec![1.0 / d as f64; d];
    let mut best = (0.0, start.clone());
    for p in simplex_patch(&vec![0.0; d], h0, coarse) {
        let s = max_step(&m, &p);
        if s > best.0 {
            best = (s, p);
        }
    }
    let mut h = h0;
    for _ in 0..12 {
        h /= 4.0;
        for p in simplex_patch(&best.1.clone(), h, 6) {
            let s = max_step(&m, &p);
            if s > best.0 {
                best = (s, p);
            }
        }
    }
    1.0 - best.0
}
