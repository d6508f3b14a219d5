//! Closed-form qubit results and Bloch-ball utilities.

mod pair;
mod volume;

pub use pair::{
    is_maximal_pair, is_maximal_single, max_single_subtraction, pair_maximal, GramData, PairCase, PairMaximalResult,
};
pub use volume::{analytic_cone_ratio, census, cone_excess, volume_ratio, VolumeCensus};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{pseudo_inverse, ComplexMatrix, C64, DEFAULT_RANK_TOL};
use crate::states::DensityMatrix;

/// On/off-line threshold for `C_w = C_l1`.
pub const ON_LINE_TOL: f64 = 1e-10;

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[1.0, -1.0])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl BlochVector {
    pub fn new(u1: f64, u2: f64, u3: f64) -> Result<Self> {
        let v = Self { u1, u2, u3 };
        let norm = v.norm();
        if !(norm <= 1.0 + 1e-10) {
            return Err(Error::BlochNormExceeded { norm });
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3).sqrt()
    }

    /// Length of the projection onto the equatorial plane.
    pub fn transverse(&self) -> f64 {
        self.u1.hypot(self.u2)
    }

    pub fn negated(&self) -> Self {
        Self { u1: -self.u1, u2: -self.u2, u3: -self.u3 }
    }
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, found: rho.dim() });
    }
    Ok(())
}

/// `(1 + u . sigma) / 2`
pub fn bloch_to_state(u: &BlochVector) -> Result<DensityMatrix> {
    let u = BlochVector::new(u.u1, u.u2, u.u3)?;
    let m = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(0.5 * (1.0 + u.u3), 0.0),
        (1, 1) => C64::new(0.5 * (1.0 - u.u3), 0.0),
        (0, 1) => C64::new(0.5 * u.u1, -0.5 * u.u2),
        _ => C64::new(0.5 * u.u1, 0.5 * u.u2),
    });
    Ok(DensityMatrix::new_unchecked(m))
}

pub fn state_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    require_qubit(rho)?;
    let r01 = rho.get(0, 1);
    Ok(BlochVector { u1: 2.0 * r01.re, u2: -2.0 * r01.im, u3: rho.get(0, 0).re - rho.get(1, 1).re })
}

/// Max-entry deviation from `rho_u^{-1} = rho_{-u} / det(rho_u)` for a full-rank qubit.
pub fn inverse_identity_residual(u: &BlochVector) -> Result<f64> {
    let rho = bloch_to_state(u)?;
    let det = (1.0 - u.norm().powi(2)) / 4.0;
    if !(det > 0.0) {
        return Err(Error::BadParameters("Bloch vector on the sphere has no inverse".into()));
    }
    let inv = pseudo_inverse(rho.matrix(), DEFAULT_RANK_TOL)?;
    let expected = bloch_to_state(&u.negated())?.matrix().scale(1.0 / det);
    Ok((&inv - &expected).max_abs_entry())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitBranch {
    /// `rho00, rho11 >= |rho01|`: weight `2 |rho01|`.
    Balanced,
    /// Otherwise: weight `1 - det / min(rho00, rho11)`.
    Unbalanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitWeight {
    pub weight: f64,
    pub branch: QubitBranch,
    pub rho00: f64,
    pub rho11: f64,
    pub abs_rho01: f64,
    pub det: f64,
}

pub fn qubit_weight_detail(rho: &DensityMatrix) -> Result<QubitWeight> {
    require_qubit(rho)?;
    let rho00 = rho.get(0, 0).re;
    let rho11 = rho.get(1, 1).re;
    let abs_rho01 = rho.get(0, 1).norm();
    let det = rho00 * rho11 - abs_rho01 * abs_rho01;
    let (branch, weight) = if rho00 >= abs_rho01 && rho11 >= abs_rho01 {
        (QubitBranch::Balanced, 2.0 * abs_rho01)
    } else {
        (QubitBranch::Unbalanced, 1.0 - det / rho00.min(rho11))
    };
    Ok(QubitWeight { weight, branch, rho00, rho11, abs_rho01, det })
}

/// Closed-form coherence weight of a qubit.
pub fn qubit_weight(rho: &DensityMatrix) -> Result<f64> {
    Ok(qubit_weight_detail(rho)?.weight)
}

/// `C_w^2 + M`, never above one.
pub fn mixedness_tradeoff_check(rho: &DensityMatrix) -> Result<f64> {
    let cw = qubit_weight(rho)?;
    Ok(cw * cw + 2.0 * (1.0 - rho.purity()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L1Comparison {
    pub cw: f64,
    pub cl1: f64,
    /// `|cw - cl1| <= ON_LINE_TOL`
    pub on_line: bool,
}

pub fn l1_comparison(rho: &DensityMatrix) -> Result<L1Comparison> {
    let cw = qubit_weight(rho)?;
    let cl1 = rho.l1_coherence();
    Ok(L1Comparison { cw, cl1, on_line: (cw - cl1).abs() <= ON_LINE_TOL })
}
