//! Maximal subtraction of one or two rank-one projectors from a state.
//!
//! `Lambda` is maximal for `rho` and `P = |psi><psi|` when `rho - Lambda P >= 0`
//! and no larger multiple keeps positivity. For a pair the rule depends on
//! whether each vector lies in the range of `rho` and on the Gram entries of
//! the pseudo-inverse `rho^+`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, min_eigenvalue, normalized, pseudo_inverse_from_eig, range_residual, ComplexMatrix, C64};
use crate::states::DensityMatrix;

/// Cross term within this (relative) of a diagonal Gram entry counts as equal.
const GRAM_TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    /// Neither vector in the range.
    A,
    /// Exactly one vector in the range.
    B,
    /// Both in range, vanishing cross term.
    C,
    /// Both in range, both diagonals dominate the cross term.
    D,
    /// Both in range, cross term between the two diagonals.
    E,
}

impl PairCase {
    pub fn label(self) -> char {
        match self {
            PairCase::A => 'a',
            PairCase::B => 'b',
            PairCase::C => 'c',
            PairCase::D => 'd',
            PairCase::E => 'e',
        }
    }
}

/// Gram data of `rho^+` in the original argument order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GramData {
    pub g11: f64,
    pub g22: f64,
    pub cross: f64,
    /// `g11 g22 - cross^2`
    pub det: f64,
    pub in_range: (bool, bool),
    /// `|cross - min(g11, g22)|`, recorded for near-boundary classifications.
    pub boundary_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairMaximalResult {
    pub lambda1: f64,
    pub lambda2: f64,
    pub case: PairCase,
    pub gram: GramData,
}

/// Maximal pair `(Lambda_1, Lambda_2)` for `rho` and the projectors onto `psi1`, `psi2`.
///
/// Range membership and the pseudo-inverse both use `tol` as relative
/// eigenvalue cutoff.
pub fn pair_maximal(rho: &DensityMatrix, psi1: &[C64], psi2: &[C64], tol: f64) -> Result<PairMaximalResult> {
    for v in [psi1, psi2] {
        if v.len() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: v.len() });
        }
    }
    let psi1 = normalized(psi1)?;
    let psi2 = normalized(psi2)?;
    let eig = eig_hermitian(rho.matrix())?;
    let pinv = pseudo_inverse_from_eig(&eig, tol)?;
    let in1 = range_residual(&eig, &psi1, tol)? <= tol;
    let in2 = range_residual(&eig, &psi2, tol)? <= tol;

    let g11 = pinv.sandwich(&psi1, &psi1).re;
    let g22 = pinv.sandwich(&psi2, &psi2).re;
    let cross = pinv.sandwich(&psi1, &psi2).norm();
    let gram = GramData {
        g11,
        g22,
        cross,
        det: g11 * g22 - cross * cross,
        in_range: (in1, in2),
        boundary_distance: (cross - g11.min(g22)).abs(),
    };

    let (lambda1, lambda2, case) = match (in1, in2) {
        (false, false) => (0.0, 0.0, PairCase::A),
        (false, true) => (0.0, 1.0 / g22, PairCase::B),
        (true, false) => (1.0 / g11, 0.0, PairCase::B),
        (true, true) => {
            // Order so that `big` carries the larger diagonal Gram entry.
            let swapped = g22 > g11;
            let (big, small) = if swapped { (g22, g11) } else { (g11, g22) };
            let scale = big.max(1.0);
            let (l_big, l_small, case) = if cross <= GRAM_TIE_TOL * scale {
                (1.0 / big, 1.0 / small, PairCase::C)
            } else {
                let det = big * small - cross * cross;
                if small >= cross - GRAM_TIE_TOL * scale && det > GRAM_TIE_TOL * big * small {
                    ((small - cross) / det, (big - cross) / det, PairCase::D)
                } else {
                    (0.0, 1.0 / small, PairCase::E)
                }
            };
            if swapped {
                (l_small, l_big, case)
            } else {
                (l_big, l_small, case)
            }
        }
    };
    Ok(PairMaximalResult { lambda1, lambda2, case, gram })
}

/// Largest `Lambda` with `rho - Lambda |psi><psi| >= 0`: zero off the range,
/// `1 / <psi|rho^+|psi>` on it.
pub fn max_single_subtraction(rho: &DensityMatrix, psi: &[C64], tol: f64) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: psi.len() });
    }
    let psi = normalized(psi)?;
    let eig = eig_hermitian(rho.matrix())?;
    if range_residual(&eig, &psi, tol)? > tol {
        return Ok(0.0);
    }
    let pinv = pseudo_inverse_from_eig(&eig, tol)?;
    Ok(1.0 / pinv.sandwich(&psi, &psi).re)
}

fn subtract(rho: &ComplexMatrix, terms: &[(&[C64], f64)]) -> ComplexMatrix {
    let mut m = rho.clone();
    for (v, l) in terms {
        m = &m - &ComplexMatrix::outer(v).scale(*l);
    }
    m
}

/// Feasible within `psd_tol`, and each weight pushed up by `eps` breaks positivity.
pub fn is_maximal_pair(
    rho: &DensityMatrix,
    psi1: &[C64],
    psi2: &[C64],
    lambda1: f64,
    lambda2: f64,
    eps: f64,
    psd_tol: f64,
) -> Result<bool> {
    let psi1 = normalized(psi1)?;
    let psi2 = normalized(psi2)?;
    let m = rho.matrix();
    let feasible = min_eigenvalue(&subtract(m, &[(&psi1, lambda1), (&psi2, lambda2)]))? >= -psd_tol;
    let up1 = min_eigenvalue(&subtract(m, &[(&psi1, lambda1 + eps), (&psi2, lambda2)]))? < 0.0;
    let up2 = min_eigenvalue(&subtract(m, &[(&psi1, lambda1), (&psi2, lambda2 + eps)]))? < 0.0;
    Ok(feasible && up1 && up2)
}

pub fn is_maximal_single(rho: &DensityMatrix, psi: &[C64], lambda: f64, eps: f64, psd_tol: f64) -> Result<bool> {
    let psi = normalized(psi)?;
    let m = rho.matrix();
    let feasible = min_eigenvalue(&subtract(m, &[(&psi, lambda)]))? >= -psd_tol;
    let up = min_eigenvalue(&subtract(m, &[(&psi, lambda + eps)]))? < 0.0;
    Ok(feasible && up)
}
